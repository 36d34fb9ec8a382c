#pragma once

#include <initializer_list>
#include <random>
#include <vector>

#include "dint/measure_field.hpp"

namespace testing_helpers {

using dint::BlockVector;
using dint::HilbertField;
using dint::Vector;

inline HilbertField field(std::vector<double> weights, std::vector<std::size_t> dims) {
  return HilbertField(dint::AtomicMeasureSpace(std::move(weights)), std::move(dims));
}

// Scalar field with the given weights (every d_k = 1).
inline HilbertField scalar_field(std::vector<double> weights) {
  const std::vector<std::size_t> dims(weights.size(), 1);
  return field(std::move(weights), dims);
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline BlockVector blocks(std::initializer_list<std::initializer_list<double>> b) {
  std::vector<Vector> out;
  for (const auto& v : b) out.push_back(vec(v));
  return BlockVector(std::move(out));
}

inline BlockVector scalars(std::initializer_list<double> v) {
  std::vector<Vector> out;
  for (double x : v) out.push_back(vec({x}));
  return BlockVector(std::move(out));
}

inline double max_abs_diff(const BlockVector& x, const BlockVector& y) {
  double m = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, (x[k] - y[k]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace testing_helpers
