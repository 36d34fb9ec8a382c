#pragma once

// Families of linear maps L_k: R^m -> R^{d_k}, the synthesized operator
// L: G -> H, z -> (L_k z)_k, and its adjoint for the weighted pairing,
// L* x* = sum_k alpha_k L_k^T x*_k.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "dint/functions.hpp"
#include "dint/measure_field.hpp"

namespace dint {

class LinearFamily {
 public:
  LinearFamily(HilbertField field, std::size_t source_dim, std::vector<Matrix> mats);

  const HilbertField& field() const { return field_; }
  std::size_t source_dim() const { return source_dim_; }
  const std::vector<Matrix>& mats() const { return mats_; }
  const Matrix& mat(std::size_t k) const { return mats_[k]; }
  /// sum_k alpha_k ||L_k||^2 with spectral norms.
  double norm_bound_sq() const { return norm_bound_sq_; }

  LinearFamily with_field(HilbertField field) const;

 private:
  HilbertField field_;
  std::size_t source_dim_;
  std::vector<Matrix> mats_;
  double norm_bound_sq_ = 0.0;
};

/// Identity maps R^m -> R^m on every atom; the field must have all dims m.
LinearFamily identity_family(const HilbertField& field);

BlockVector apply(const LinearFamily& family, const Vector& z);
Vector adjoint(const LinearFamily& family, const BlockVector& xstar);
/// sqrt(sum_k alpha_k ||L_k||^2), an upper bound on ||L||.
double norm_bound(const LinearFamily& family);
/// Power-iteration estimate of ||L|| from L* L; never above the true norm
/// up to rounding.
double norm_estimate(const LinearFamily& family, std::size_t iters = 500, std::uint64_t seed = 0);

/// z -> sum_k alpha_k L_k^T prox_{f_k}(L_k z). Requires sum_k alpha_k
/// ||L_k||^2 <= 1, under which the map is the proximity operator of a
/// function in Gamma_0(R^m).
Vector prox_mixture(const DirectIntegralFunction& f, const LinearFamily& family, const Vector& z);

using VectorMap = std::function<Vector(const Vector&)>;

struct CyclicReport {
  /// Largest sampled sum_i <z_{i+1} - z_i, T z_i> over closed cycles.
  double max_violation = 0.0;
  std::size_t cycles = 0;
};

/// Samples `cycles` closed cycles of length 2..max_len in R^dim.
CyclicReport cyclic_probe(const VectorMap& map, std::size_t dim, std::size_t cycles, std::size_t max_len,
                          std::uint64_t seed);

/// g = f o L on R^m.
class CompositeFunction {
 public:
  CompositeFunction(DirectIntegralFunction f, LinearFamily family);

  const DirectIntegralFunction& f() const { return f_; }
  const LinearFamily& family() const { return family_; }
  std::size_t dim() const { return family_.source_dim(); }

 private:
  DirectIntegralFunction f_;
  LinearFamily family_;
};

double composite_eval(const CompositeFunction& g, const Vector& z);

struct CompositeSubgradientOptions {
  std::vector<double> schedule;  // decreasing; empty: 2^-n, n = 0..30
  double growth_ratio = 1.5;
  std::size_t window = 3;
};

struct CompositeSubgradient {
  Vector value;
  double increment = 0.0;
};

/// L*(blockwise prox_{f_k*/g}(L_k z / g)) along g in the schedule, which
/// converges to a subgradient of f o L at z as g -> 0.
CompositeSubgradient composite_subgradient(const CompositeFunction& g, const Vector& z,
                                           const CompositeSubgradientOptions& options = {});

}  // namespace dint
