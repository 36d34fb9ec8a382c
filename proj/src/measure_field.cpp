#include "dint/measure_field.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dint/errors.hpp"

namespace dint {

AtomicMeasureSpace::AtomicMeasureSpace(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw StructuralError("measure space needs at least one atom");
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double w = weights_[k];
    if (!std::isfinite(w) || !(w > 0.0)) {
      throw StructuralError("weight of atom " + std::to_string(k) +
                            " must be strictly positive and finite");
    }
  }
}

HilbertField::HilbertField(AtomicMeasureSpace space, std::vector<std::size_t> dims)
    : space_(std::move(space)), dims_(std::move(dims)) {
  if (dims_.size() != space_.count()) {
    throw StructuralError("field has " + std::to_string(dims_.size()) + " dims for " +
                          std::to_string(space_.count()) + " atoms");
  }
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] == 0) throw StructuralError("dimension of atom " + std::to_string(k) + " is zero");
  }
}

std::size_t HilbertField::total_dim() const {
  return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0});
}

HilbertField HilbertField::reweighted(std::vector<double> weights) const {
  return HilbertField(AtomicMeasureSpace(std::move(weights)), dims_);
}

BlockVector BlockVector::zeros(const HilbertField& field) {
  std::vector<Vector> blocks;
  blocks.reserve(field.count());
  for (std::size_t k = 0; k < field.count(); ++k) blocks.push_back(Vector::Zero(field.dim(k)));
  return BlockVector(std::move(blocks));
}

BlockVector BlockVector::from_flat(const HilbertField& field, std::span<const double> flat) {
  if (flat.size() != field.total_dim()) {
    throw StructuralError("flat vector has length " + std::to_string(flat.size()) +
                          ", field expects " + std::to_string(field.total_dim()));
  }
  std::vector<Vector> blocks;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < field.count(); ++k) {
    const auto d = field.dim(k);
    blocks.push_back(Eigen::Map<const Vector>(flat.data() + offset, static_cast<Eigen::Index>(d)));
    offset += d;
  }
  return BlockVector(std::move(blocks));
}

std::vector<double> BlockVector::flatten() const {
  std::vector<double> out;
  for (const auto& b : blocks_) out.insert(out.end(), b.data(), b.data() + b.size());
  return out;
}

bool BlockVector::conforms(const HilbertField& field) const {
  if (blocks_.size() != field.count()) return false;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (static_cast<std::size_t>(blocks_[k].size()) != field.dim(k)) return false;
  }
  return true;
}

bool BlockVector::all_finite() const {
  for (const auto& b : blocks_) {
    if (!b.allFinite()) return false;
  }
  return true;
}

bool BlockVector::operator==(const BlockVector& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (blocks_[k].size() != other.blocks_[k].size()) return false;
    if (blocks_[k] != other.blocks_[k]) return false;
  }
  return true;
}

void require_conforming(const HilbertField& field, const BlockVector& x, const char* what) {
  if (!x.conforms(field)) {
    throw StructuralError(std::string(what) + " does not conform to the field");
  }
  if (!x.all_finite()) throw StructuralError(std::string(what) + " has non-finite entries");
}

double inner_product(const HilbertField& field, const BlockVector& x, const BlockVector& y) {
  require_conforming(field, x, "x");
  require_conforming(field, y, "y");
  double acc = 0.0;
  for (std::size_t k = 0; k < field.count(); ++k) acc += field.weight(k) * x[k].dot(y[k]);
  return acc;
}

double norm(const HilbertField& field, const BlockVector& x) {
  return std::sqrt(inner_product(field, x, x));
}

double integrate(const AtomicMeasureSpace& space, std::span<const double> values) {
  if (values.size() != space.count()) {
    throw StructuralError("integrate: " + std::to_string(values.size()) + " values for " +
                          std::to_string(space.count()) + " atoms");
  }
  double acc = 0.0;
  bool infinite = false;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double v = values[k];
    if (std::isnan(v) || v == -kInfinity) {
      throw StructuralError("integrate: value of atom " + std::to_string(k) +
                            " is not in ]-inf,+inf]");
    }
    if (v == kInfinity) {
      infinite = true;
      continue;
    }
    acc += space.weight(k) * v;
  }
  return infinite ? kInfinity : acc;
}

BlockVector axpy(const HilbertField& field, double a, const BlockVector& x, double b,
                 const BlockVector& y) {
  require_conforming(field, x, "x");
  require_conforming(field, y, "y");
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.push_back(a * x[k] + b * y[k]);
  return BlockVector(std::move(out));
}

BlockVector add(const BlockVector& x, const BlockVector& y) {
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.push_back(x[k] + y[k]);
  return BlockVector(std::move(out));
}

BlockVector subtract(const BlockVector& x, const BlockVector& y) {
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.push_back(x[k] - y[k]);
  return BlockVector(std::move(out));
}

BlockVector scale(double a, const BlockVector& x) {
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.push_back(a * x[k]);
  return BlockVector(std::move(out));
}

}  // namespace dint
