#include "dint/linear_family.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "detail.hpp"
#include "dint/errors.hpp"
#include "dint/sampling.hpp"

namespace dint {

namespace {

void require_source(const LinearFamily& family, const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != family.source_dim()) {
    throw StructuralError("expected a vector of dimension " + std::to_string(family.source_dim()) + ", got " +
                          std::to_string(z.size()));
  }
  if (!z.allFinite()) throw StructuralError("vector has non-finite entries");
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
}

}  // namespace

LinearFamily::LinearFamily(HilbertField field, std::size_t source_dim, std::vector<Matrix> mats)
    : field_(std::move(field)), source_dim_(source_dim), mats_(std::move(mats)) {
  if (source_dim_ == 0) throw StructuralError("linear family: source dimension must be positive");
  if (mats_.size() != field_.count()) throw StructuralError("linear family: one matrix per atom is required");
  for (std::size_t k = 0; k < mats_.size(); ++k) {
    const Matrix& m = mats_[k];
    if (static_cast<std::size_t>(m.rows()) != field_.dim(k) || static_cast<std::size_t>(m.cols()) != source_dim_) {
      throw StructuralError("linear family: matrix " + std::to_string(k) + " must be " +
                            std::to_string(field_.dim(k)) + " x " + std::to_string(source_dim_));
    }
    if (!m.allFinite()) throw StructuralError("linear family: matrix " + std::to_string(k) + " is not finite");
    const double s = spectral_norm(m);
    norm_bound_sq_ += field_.weight(k) * s * s;
  }
}

LinearFamily LinearFamily::with_field(HilbertField field) const {
  return LinearFamily(std::move(field), source_dim_, mats_);
}

LinearFamily identity_family(const HilbertField& field) {
  const std::size_t m = field.dim(0);
  std::vector<Matrix> mats;
  for (std::size_t k = 0; k < field.count(); ++k) {
    if (field.dim(k) != m) throw StructuralError("identity family needs equal dimensions");
    mats.push_back(Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)));
  }
  return LinearFamily(field, m, std::move(mats));
}

BlockVector apply(const LinearFamily& family, const Vector& z) {
  require_source(family, z);
  std::vector<Vector> out;
  out.reserve(family.mats().size());
  for (const auto& m : family.mats()) out.push_back(m * z);
  return BlockVector(std::move(out));
}

Vector adjoint(const LinearFamily& family, const BlockVector& xstar) {
  require_conforming(family.field(), xstar, "x*");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(family.source_dim()));
  for (std::size_t k = 0; k < xstar.size(); ++k) {
    out.noalias() += family.field().weight(k) * (family.mat(k).transpose() * xstar[k]);
  }
  return out;
}

double norm_bound(const LinearFamily& family) { return std::sqrt(family.norm_bound_sq()); }

double norm_estimate(const LinearFamily& family, std::size_t iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector v = sample_vector(family.source_dim(), rng);
  double best = 0.0;
  for (std::size_t it = 0; it < std::max<std::size_t>(iters, 1); ++it) {
    const double n = v.norm();
    if (n == 0.0) break;
    v /= n;
    const Vector w = adjoint(family, apply(family, v));
    // Rayleigh quotient <v, L* L v> = ||L v||^2 for the unit vector v.
    best = std::max(best, std::sqrt(std::max(0.0, v.dot(w))));
    v = w;
  }
  return best;
}

Vector prox_mixture(const DirectIntegralFunction& f, const LinearFamily& family, const Vector& z) {
  if (!(f.field() == family.field())) throw StructuralError("prox_mixture: function and family fields differ");
  if (family.norm_bound_sq() > 1.0 + 1e-12) {
    throw PreconditionError("prox_mixture: sum_k alpha_k ||L_k||^2 = " + std::to_string(family.norm_bound_sq()) +
                            " exceeds 1");
  }
  return adjoint(family, di_prox(f, 1.0, apply(family, z)));
}

CyclicReport cyclic_probe(const VectorMap& map, std::size_t dim, std::size_t cycles, std::size_t max_len,
                          std::uint64_t seed) {
  if (max_len < 2) throw PreconditionError("cyclic_probe: cycles need at least two points");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> length(2, max_len);
  CyclicReport report;
  report.max_violation = -kInfinity;
  std::vector<Vector> points;
  std::vector<Vector> images;
  for (std::size_t c = 0; c < cycles; ++c) {
    const std::size_t n = length(rng);
    points.clear();
    images.clear();
    for (std::size_t i = 0; i < n; ++i) {
      points.push_back(sample_vector(dim, rng));
      images.push_back(map(points.back()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += (points[(i + 1) % n] - points[i]).dot(images[i]);
    report.max_violation = std::max(report.max_violation, sum);
  }
  report.cycles = cycles;
  return report;
}

CompositeFunction::CompositeFunction(DirectIntegralFunction f, LinearFamily family)
    : f_(std::move(f)), family_(std::move(family)) {
  if (!(f_.field() == family_.field())) throw StructuralError("composite function: fields differ");
}

double composite_eval(const CompositeFunction& g, const Vector& z) {
  return di_eval(g.f(), apply(g.family(), z));
}

CompositeSubgradient composite_subgradient(const CompositeFunction& g, const Vector& z,
                                           const CompositeSubgradientOptions& options) {
  require_source(g.family(), z);
  const std::vector<double> schedule =
      options.schedule.empty() ? geometric_schedule(1.0, 0.5, 31) : options.schedule;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    detail::require_gamma(schedule[i]);
    if (i > 0 && !(schedule[i] < schedule[i - 1])) {
      throw PreconditionError("composite_subgradient: schedule must be decreasing");
    }
  }
  const BlockVector u = apply(g.family(), z);
  CompositeSubgradient result;
  std::vector<double> increments;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const double gamma = schedule[i];
    // prox_{f*/gamma}(u / gamma) is the Yosida value (u - prox_{gamma f} u) / gamma.
    Vector next = adjoint(g.family(), conjugate_prox(g.f(), 1.0 / gamma, scale(1.0 / gamma, u)));
    if (i > 0) increments.push_back((next - result.value).norm());
    result.value = std::move(next);
  }
  if (!increments.empty()) result.increment = increments.back();

  if (options.window > 0 && increments.size() > options.window) {
    bool growing = true;
    for (std::size_t i = increments.size() - options.window; i < increments.size(); ++i) {
      if (!(increments[i - 1] > 0.0) || increments[i] <= 1e-12 ||
          increments[i] < options.growth_ratio * increments[i - 1]) {
        growing = false;
        break;
      }
    }
    if (growing) {
      throw DomainViolation("composite_subgradient: sequence diverges; z is likely outside dom (f o L)");
    }
  }
  return result;
}

}  // namespace dint
