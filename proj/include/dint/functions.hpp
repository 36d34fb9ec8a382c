#pragma once

// Convex function atoms f_k in Gamma_0(R^{d_k}) and the calculus of their
// direct integral f(x) = sum_k alpha_k f_k(x_k) on the weighted space H.
//
// Prox, envelope, conjugate and recession of f are all assembled blockwise.
// For the prox the weights cancel between f and the metric, so the result
// never depends on them; scalar quantities (values, envelopes, conjugates,
// recession values) are integrated with the weights.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dint/measure_field.hpp"

namespace dint {

using EvalFn = std::function<double(const Vector&)>;
using ProxFn = std::function<Vector(double gamma, const Vector&)>;
using MapFn = std::function<Vector(const Vector&)>;
using MembershipFn = std::function<bool(const Vector&)>;

/// Convex, lower semicontinuous, proper function on R^dim described by its
/// value and proximity operator. Optional oracles: conjugate value, analytic
/// recession function and gradient (smooth atoms only).
class ConvexAtom {
 public:
  struct Oracles {
    EvalFn eval;
    ProxFn prox;
    std::optional<EvalFn> conjugate;
    std::optional<EvalFn> recession;
    std::optional<MapFn> gradient;
  };

  /// `witness` must be a point where the function is finite (properness).
  ConvexAtom(std::size_t dim, Oracles oracles, Vector witness, std::string label);

  std::size_t dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const Vector& witness() const { return witness_; }

  double eval(const Vector& x) const;
  Vector prox(double gamma, const Vector& x) const;

  bool has_conjugate() const { return oracles_.conjugate.has_value(); }
  bool has_recession() const { return oracles_.recession.has_value(); }
  bool has_gradient() const { return oracles_.gradient.has_value(); }
  double conjugate(const Vector& x) const;
  double recession(const Vector& x) const;
  Vector gradient(const Vector& x) const;

 private:
  std::size_t dim_;
  Oracles oracles_;
  Vector witness_;
  std::string label_;
};

/// Nonempty closed convex subset of R^dim.
class ConvexSetAtom {
 public:
  struct Oracles {
    MembershipFn contains;
    MapFn projection;
    std::optional<EvalFn> support;
    /// Membership in the recession cone; gives the recession function of
    /// the indicator.
    std::optional<MembershipFn> recession_contains;
  };

  ConvexSetAtom(std::size_t dim, Oracles oracles, std::string label);

  std::size_t dim() const { return dim_; }
  const std::string& label() const { return label_; }

  bool contains(const Vector& x) const;
  Vector project(const Vector& x) const;
  bool has_support() const { return oracles_.support.has_value(); }
  double support(const Vector& x) const;
  bool has_recession_cone() const { return oracles_.recession_contains.has_value(); }
  bool recession_contains(const Vector& x) const;

 private:
  std::size_t dim_;
  Oracles oracles_;
  std::string label_;
};

// --- set library -----------------------------------------------------------

ConvexSetAtom box_set(Vector lo, Vector hi);
ConvexSetAtom ball_set(Vector center, double radius);
/// {x : <a, x> <= beta}, a != 0.
ConvexSetAtom halfspace_set(Vector a, double beta);
ConvexSetAtom nonnegative_orthant(std::size_t dim);
/// {x : A x = b} with A of full row rank.
ConvexSetAtom affine_set(Matrix a, Vector b);
ConvexSetAtom singleton_set(Vector point);

// --- function library ------------------------------------------------------

ConvexAtom zero_function(std::size_t dim);
/// 0.5 x^T Q x + b^T x with Q symmetric positive semidefinite.
ConvexAtom quadratic(Matrix q, Vector b);
/// sum_i |x_i|; in one dimension this is the absolute value.
ConvexAtom l1_norm(std::size_t dim);
ConvexAtom l2_norm(std::size_t dim);
ConvexAtom linear_function(Vector c);
/// Indicator of a set atom; its prox is the set projection itself.
ConvexAtom indicator(const ConvexSetAtom& set);
/// Support function of the box [lo, hi].
ConvexAtom box_support(Vector lo, Vector hi);
/// The Fenchel conjugate as an atom, with prox from Moreau's decomposition.
/// Requires the atom to expose its conjugate value.
ConvexAtom conjugate_atom(const ConvexAtom& f);

// --- direct integrals ------------------------------------------------------

class DirectIntegralFunction {
 public:
  DirectIntegralFunction(HilbertField field, std::vector<ConvexAtom> atoms);

  const HilbertField& field() const { return field_; }
  const std::vector<ConvexAtom>& atoms() const { return atoms_; }
  const ConvexAtom& atom(std::size_t k) const { return atoms_[k]; }
  /// Point r with f(r) finite, assembled from the atom witnesses.
  BlockVector witness() const;

  DirectIntegralFunction with_field(HilbertField field) const;

 private:
  HilbertField field_;
  std::vector<ConvexAtom> atoms_;
};

class DirectIntegralSet {
 public:
  DirectIntegralSet(HilbertField field, std::vector<ConvexSetAtom> atoms);

  const HilbertField& field() const { return field_; }
  const std::vector<ConvexSetAtom>& atoms() const { return atoms_; }
  const ConvexSetAtom& atom(std::size_t k) const { return atoms_[k]; }

 private:
  HilbertField field_;
  std::vector<ConvexSetAtom> atoms_;
};

DirectIntegralFunction indicator(const DirectIntegralSet& set);
/// Direct integral of the conjugates; every atom must expose its conjugate.
DirectIntegralFunction conjugate_function(const DirectIntegralFunction& f);

double di_eval(const DirectIntegralFunction& f, const BlockVector& x);
BlockVector di_prox(const DirectIntegralFunction& f, double gamma, const BlockVector& x);
double di_envelope(const DirectIntegralFunction& f, double gamma, const BlockVector& x);

/// Blockwise (x_k - prox_{gamma f_k}(x_k)) / gamma.
///
/// These are the per-atom Euclidean Yosida values. The gradient of the
/// envelope with respect to the weighted metric of H is exactly this block
/// vector; its Euclidean partial derivatives in block k are alpha_k times
/// the block, so the two agree when all weights are one.
BlockVector envelope_gradient(const DirectIntegralFunction& f, double gamma, const BlockVector& x);

struct ConjugateOptions {
  /// Estimate atoms without a conjugate oracle from the increasing sequence
  /// |x*|^2 / (2 g_n) - env_{1/g_n} f(x* / g_n), g_n along `schedule`.
  bool allow_estimate = false;
  std::vector<double> schedule;  // empty: 2^-n, n = 0..20
};

struct ConjugateValue {
  double value = 0.0;
  /// Difference between the last two estimator terms, 0 when exact.
  double increment = 0.0;
  bool estimated = false;
};

ConjugateValue di_conjugate(const DirectIntegralFunction& f, const BlockVector& xstar,
                            const ConjugateOptions& options = {});

/// Blockwise prox_{gamma f_k*}(x_k) = x_k - gamma prox_{f_k / gamma}(x_k / gamma).
BlockVector conjugate_prox(const DirectIntegralFunction& f, double gamma, const BlockVector& x);

struct RecessionOptions {
  std::vector<double> schedule;  // increasing; empty: 10^n, n = 0..14
  bool use_analytic = true;
  double divergence_bound = 1e12;
};

struct RecessionValue {
  double value = 0.0;
  double increment = 0.0;
  bool diverged = false;
  bool analytic = false;
};

/// Recession function of f at x from the difference quotients
/// (f(r + a x) - f(r)) / a, nondecreasing in a, with r the witness.
RecessionValue recession_estimate(const DirectIntegralFunction& f, const BlockVector& x,
                                  const RecessionOptions& options = {});

/// ||x - prox_f(x + x*)||_H, zero iff x* is a subgradient of f at x.
double subgradient_residual(const DirectIntegralFunction& f, const BlockVector& x,
                            const BlockVector& xstar);

BlockVector project(const DirectIntegralSet& set, const BlockVector& x);
bool contains(const DirectIntegralSet& set, const BlockVector& x);
/// Weighted support function sum_k alpha_k sigma_{C_k}(x_k).
double support(const DirectIntegralSet& set, const BlockVector& x);

std::vector<double> geometric_schedule(double first, double ratio, std::size_t count);

}  // namespace dint
