#pragma once

// Internal helpers shared by the blockwise modules.

#include <cmath>
#include <cstddef>
#include <exception>
#include <string>

#include "dint/errors.hpp"
#include "dint/measure_field.hpp"

namespace dint::detail {

inline void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw PreconditionError("gamma must be positive and finite");
  }
}

inline void require_dim(const Vector& x, std::size_t dim, const std::string& label) {
  if (static_cast<std::size_t>(x.size()) != dim) {
    throw StructuralError(label + ": expected a vector of dimension " + std::to_string(dim) + ", got " +
                          std::to_string(x.size()));
  }
}

// Runs one per-atom oracle call, tagging foreign failures with the atom index.
template <class F>
auto on_atom(std::size_t k, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(k, e.what());
  }
}

inline double checked_value(std::size_t k, double v) {
  if (std::isnan(v) || v == -kInfinity) throw NumericalError(k, "function value outside ]-inf,+inf]");
  return v;
}

inline Vector checked_point(std::size_t k, Vector v, std::size_t dim) {
  if (static_cast<std::size_t>(v.size()) != dim) throw NumericalError(k, "oracle returned wrong dimension");
  if (!v.allFinite()) throw NumericalError(k, "oracle returned non-finite entries");
  return v;
}

}  // namespace dint::detail
