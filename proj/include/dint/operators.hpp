#pragma once

// Maximally monotone operator atoms, given by their resolvents, and the
// direct-integral operator A on H acting blockwise: (Ax)_k = A_k x_k.
//
// J_{gamma A} and the Yosida approximation of A are computed atom by atom
// and do not depend on the weights. The inverse family (A_k^{-1}) is
// reached through J_{A^{-1}} = Id - J_A, so no second oracle is needed.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dint/functions.hpp"
#include "dint/measure_field.hpp"
#include "dint/sampling.hpp"

namespace dint {

using ResolventFn = std::function<Vector(double gamma, const Vector&)>;

class MonotoneAtom {
 public:
  MonotoneAtom(std::size_t dim, ResolventFn resolvent, std::optional<MapFn> forward, std::string label);

  std::size_t dim() const { return dim_; }
  const std::string& label() const { return label_; }

  /// J_{gamma A}(v) = (Id + gamma A)^{-1} v.
  Vector resolvent(double gamma, const Vector& v) const;
  bool has_forward() const { return forward_.has_value(); }
  /// A(u) for single-valued atoms.
  Vector forward(const Vector& u) const;

 private:
  std::size_t dim_;
  ResolventFn resolvent_;
  std::optional<MapFn> forward_;
  std::string label_;
};

// --- atom library ------------------------------------------------------------

/// x -> c x, c >= 0. c = 0 gives the zero operator.
MonotoneAtom scaled_identity(std::size_t dim, double c);
MonotoneAtom zero_operator(std::size_t dim);
/// x -> M x + b with M + M^T positive semidefinite.
MonotoneAtom affine_operator(Matrix m, Vector b);
/// Normal cone of a closed convex set; the resolvent is the projection.
MonotoneAtom normal_cone(const ConvexSetAtom& set);
/// Subdifferential of a convex atom; the resolvent is the prox. Single-valued
/// (has a forward map) when the atom exposes a gradient.
MonotoneAtom subdifferential(const ConvexAtom& f);
/// Graph of a nondecreasing function g: R -> R. The resolvent solves
/// u + gamma g(u) = v by bisection on an automatically expanded bracket.
MonotoneAtom scalar_monotone(std::function<double(double)> g, std::string label);
/// u -> c sign(u) |u|^p with c >= 0, p > 0.
MonotoneAtom scalar_power(double c, double p);
/// Yosida approximation (Id - J_{lambda B}) / lambda of an atom B. Single
/// valued and lambda-cocoercive; its resolvent is
/// J_{g B_lambda} = Id + g / (g + lambda) (J_{(g + lambda) B} - Id).
MonotoneAtom yosida_atom(const MonotoneAtom& inner, double lambda);

// --- direct integrals ----------------------------------------------------------

class DirectIntegralOperator {
 public:
  DirectIntegralOperator(HilbertField field, std::vector<MonotoneAtom> atoms);

  const HilbertField& field() const { return field_; }
  const std::vector<MonotoneAtom>& atoms() const { return atoms_; }
  const MonotoneAtom& atom(std::size_t k) const { return atoms_[k]; }
  bool all_forward() const;

  DirectIntegralOperator with_field(HilbertField field) const;

 private:
  HilbertField field_;
  std::vector<MonotoneAtom> atoms_;
};

BlockVector di_resolvent(const DirectIntegralOperator& op, double gamma, const BlockVector& x);
BlockVector di_yosida(const DirectIntegralOperator& op, double gamma, const BlockVector& x);
/// Blockwise J_{A_k^{-1}}(x_k) = x_k - J_{A_k}(x_k).
BlockVector inverse_resolvent(const DirectIntegralOperator& op, const BlockVector& x);
/// Blockwise J_{gamma A_k^{-1}}(x_k) = x_k - gamma J_{A_k / gamma}(x_k / gamma).
BlockVector inverse_resolvent(const DirectIntegralOperator& op, double gamma, const BlockVector& x);
/// Blockwise A_k(x_k); every atom needs a forward map.
BlockVector di_forward(const DirectIntegralOperator& op, const BlockVector& x);

struct MinimalSelectionOptions {
  std::vector<double> schedule;  // decreasing; empty: 2^-n, n = 0..20
  /// Increments growing by at least this factor over `window` consecutive
  /// steps mean the sequence diverges, i.e. x is outside the domain.
  double growth_ratio = 1.5;
  std::size_t window = 3;
};

struct MinimalSelection {
  BlockVector value;
  /// ||A_{g_N} x - A_{g_{N-1}} x||_H between the last two schedule points.
  double increment = 0.0;
};

/// Estimate of the minimal-norm selection A^0 x as the Yosida approximation
/// at the smallest schedule parameter.
MinimalSelection minimal_selection(const DirectIntegralOperator& op, const BlockVector& x,
                                   const MinimalSelectionOptions& options = {});

struct MonotonicityReport {
  double min_product = 0.0;
  std::size_t samples = 0;
};

/// Minimum over random pairs of <x - y, Ax - Ay>_H.
MonotonicityReport monotonicity_probe(const DirectIntegralOperator& op, std::size_t samples, std::uint64_t seed);

enum class Regularity { lipschitz, cocoercive, averaged };

struct RegularityReport {
  /// Worst constant over the joint and per-atom estimates: largest for
  /// lipschitz/averaged, smallest for cocoercive.
  double estimate = 0.0;
  /// Estimate from pairs differing in all blocks at once.
  double joint = 0.0;
  /// Estimates from pairs differing only in block k.
  std::vector<double> per_atom;
};

using BlockMap = std::function<BlockVector(const BlockVector&)>;

/// Sampled regularity constant of a blockwise map T on the field.
RegularityReport regularity_probe(const HilbertField& field, const BlockMap& map, Regularity kind,
                                  std::size_t samples, std::uint64_t seed);
/// Same for the forward map of the operator.
RegularityReport regularity_probe(const DirectIntegralOperator& op, Regularity kind, std::size_t samples,
                                  std::uint64_t seed);

}  // namespace dint
