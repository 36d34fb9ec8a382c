#pragma once

// Finite atomic measure spaces, Hilbert fields over them and block vectors.
//
// With atoms k = 1..p of measure alpha_k > 0 and per-atom spaces R^{d_k},
// the direct integral of the field is the weighted direct sum
//
//     H = R^{d_1} x ... x R^{d_p},   <x, y>_H = sum_k alpha_k <x_k, y_k>.
//
// Every element of the product is measurable here, so no separate
// "measurable vector field" type exists.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dint {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Extended reals in ]-inf, +inf] are plain doubles; +inf is the only
/// non-finite value accepted.
inline bool is_plus_infinity(double v) { return v == kInfinity; }

class AtomicMeasureSpace {
 public:
  explicit AtomicMeasureSpace(std::vector<double> weights);

  std::size_t count() const { return weights_.size(); }
  double weight(std::size_t k) const { return weights_[k]; }
  std::span<const double> weights() const { return weights_; }

  bool operator==(const AtomicMeasureSpace&) const = default;

 private:
  std::vector<double> weights_;
};

class HilbertField {
 public:
  HilbertField(AtomicMeasureSpace space, std::vector<std::size_t> dims);

  const AtomicMeasureSpace& space() const { return space_; }
  std::size_t count() const { return dims_.size(); }
  std::size_t dim(std::size_t k) const { return dims_[k]; }
  std::span<const std::size_t> dims() const { return dims_; }
  std::size_t total_dim() const;
  double weight(std::size_t k) const { return space_.weight(k); }

  /// Same field with different weights; dims are kept.
  HilbertField reweighted(std::vector<double> weights) const;

  bool operator==(const HilbertField&) const = default;

 private:
  AtomicMeasureSpace space_;
  std::vector<std::size_t> dims_;
};

class BlockVector {
 public:
  BlockVector() = default;
  explicit BlockVector(std::vector<Vector> blocks) : blocks_(std::move(blocks)) {}

  static BlockVector zeros(const HilbertField& field);
  /// Splits a flat vector into blocks following the field dims.
  static BlockVector from_flat(const HilbertField& field, std::span<const double> flat);

  std::size_t size() const { return blocks_.size(); }
  Vector& operator[](std::size_t k) { return blocks_[k]; }
  const Vector& operator[](std::size_t k) const { return blocks_[k]; }
  const std::vector<Vector>& blocks() const { return blocks_; }

  std::vector<double> flatten() const;
  bool conforms(const HilbertField& field) const;
  bool all_finite() const;

  bool operator==(const BlockVector& other) const;

 private:
  std::vector<Vector> blocks_;
};

/// Throws StructuralError unless x has the field's block structure and
/// finite entries. `what` names the argument in the message.
void require_conforming(const HilbertField& field, const BlockVector& x, const char* what = "x");

double inner_product(const HilbertField& field, const BlockVector& x, const BlockVector& y);
double norm(const HilbertField& field, const BlockVector& x);

/// Weighted sum of extended-real values. Any +inf yields +inf; -inf and NaN
/// are rejected.
double integrate(const AtomicMeasureSpace& space, std::span<const double> values);

/// Blockwise a*x + b*y.
BlockVector axpy(const HilbertField& field, double a, const BlockVector& x, double b,
                 const BlockVector& y);

/// Unchecked blockwise helpers used on hot paths once shapes are known.
BlockVector add(const BlockVector& x, const BlockVector& y);
BlockVector subtract(const BlockVector& x, const BlockVector& y);
BlockVector scale(double a, const BlockVector& x);

}  // namespace dint
