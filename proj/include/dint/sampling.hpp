#pragma once

#include <cmath>
#include <random>

#include "dint/measure_field.hpp"

namespace dint {

/// Standard-normal vector scaled down to Euclidean norm <= max_norm.
template <class Rng>
Vector sample_vector(std::size_t dim, Rng& rng, double max_norm = 10.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  const double n = v.norm();
  if (n > max_norm) v *= max_norm / n;
  return v;
}

/// Block vector with standard-normal entries, scaled down so that its flat
/// Euclidean norm is at most max_norm.
template <class Rng>
BlockVector sample_block_vector(const HilbertField& field, Rng& rng, double max_norm = 10.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> blocks;
  double sq = 0.0;
  for (std::size_t k = 0; k < field.count(); ++k) {
    Vector b(static_cast<Eigen::Index>(field.dim(k)));
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = normal(rng);
    sq += b.squaredNorm();
    blocks.push_back(std::move(b));
  }
  const double n = std::sqrt(sq);
  if (n > max_norm) {
    for (auto& b : blocks) b *= max_norm / n;
  }
  return BlockVector(std::move(blocks));
}

}  // namespace dint
