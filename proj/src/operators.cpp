#include "dint/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "detail.hpp"
#include "dint/errors.hpp"

namespace dint {

using detail::checked_point;
using detail::on_atom;
using detail::require_dim;
using detail::require_gamma;

MonotoneAtom::MonotoneAtom(std::size_t dim, ResolventFn resolvent, std::optional<MapFn> forward, std::string label)
    : dim_(dim), resolvent_(std::move(resolvent)), forward_(std::move(forward)), label_(std::move(label)) {
  if (dim_ == 0) throw StructuralError(label_ + ": dimension must be positive");
  if (!resolvent_) throw StructuralError(label_ + ": a resolvent oracle is required");
}

Vector MonotoneAtom::resolvent(double gamma, const Vector& v) const {
  require_gamma(gamma);
  require_dim(v, dim_, label_);
  return resolvent_(gamma, v);
}

Vector MonotoneAtom::forward(const Vector& u) const {
  if (!forward_) throw CapabilityError(label_ + ": no forward map (set-valued atom)");
  require_dim(u, dim_, label_);
  return (*forward_)(u);
}

// --- atom library ------------------------------------------------------------

MonotoneAtom scaled_identity(std::size_t dim, double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw StructuralError("scaled_identity: c must be >= 0");
  return MonotoneAtom(
      dim, [c](double gamma, const Vector& v) -> Vector { return v / (1.0 + gamma * c); },
      MapFn([c](const Vector& u) -> Vector { return c * u; }), c == 0.0 ? "zero" : "scaled_identity");
}

MonotoneAtom zero_operator(std::size_t dim) { return scaled_identity(dim, 0.0); }

MonotoneAtom affine_operator(Matrix m, Vector b) {
  if (m.rows() == 0 || m.rows() != m.cols() || m.rows() != b.size()) {
    throw StructuralError("affine operator: M must be square and match b");
  }
  if (!m.allFinite() || !b.allFinite()) throw StructuralError("affine operator: non-finite data");
  const Matrix sym = 0.5 * (m + m.transpose());
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if (Eigen::SelfAdjointEigenSolver<Matrix>(sym).eigenvalues().minCoeff() < -1e-10 * scale) {
    throw StructuralError("affine operator: M + M^T must be positive semidefinite");
  }
  const auto dim = static_cast<std::size_t>(m.rows());
  return MonotoneAtom(
      dim,
      [m, b](double gamma, const Vector& v) -> Vector {
        const Matrix lhs = Matrix::Identity(m.rows(), m.cols()) + gamma * m;
        return lhs.partialPivLu().solve(v - gamma * b);
      },
      MapFn([m, b](const Vector& u) -> Vector { return m * u + b; }), "affine");
}

MonotoneAtom normal_cone(const ConvexSetAtom& set) {
  return MonotoneAtom(
      set.dim(), [set](double, const Vector& v) -> Vector { return set.project(v); }, std::nullopt,
      "normal_cone(" + set.label() + ")");
}

MonotoneAtom subdifferential(const ConvexAtom& f) {
  std::optional<MapFn> forward;
  if (f.has_gradient()) forward = [f](const Vector& u) { return f.gradient(u); };
  return MonotoneAtom(
      f.dim(), [f](double gamma, const Vector& v) -> Vector { return f.prox(gamma, v); }, std::move(forward),
      "subdifferential(" + f.label() + ")");
}

namespace {

// Root of u + gamma g(u) = v; the left side is strictly increasing in u.
double solve_scalar_resolvent(const std::function<double(double)>& g, double gamma, double v) {
  auto h = [&](double u) {
    const double r = u + gamma * g(u) - v;
    if (std::isnan(r)) throw std::runtime_error("scalar graph evaluated to NaN");
    return r;
  };
  double width = 1.0 + std::abs(v);
  double lo = v - width;
  double hi = v + width;
  int expansions = 0;
  while (h(lo) > 0.0) {
    if (++expansions > 200) throw std::runtime_error("bracket expansion failed");
    width *= 2.0;
    lo = v - width;
  }
  while (h(hi) < 0.0) {
    if (++expansions > 200) throw std::runtime_error("bracket expansion failed");
    width *= 2.0;
    hi = v + width;
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(mid)) || mid == lo || mid == hi) return mid;
    const double hm = h(mid);
    if (hm == 0.0) return mid;
    (hm < 0.0 ? lo : hi) = mid;
  }
  throw std::runtime_error("bisection did not reach tolerance");
}

}  // namespace

MonotoneAtom scalar_monotone(std::function<double(double)> g, std::string label) {
  if (!g) throw StructuralError("scalar_monotone: function is required");
  return MonotoneAtom(
      1,
      [g](double gamma, const Vector& v) -> Vector {
        Vector out(1);
        out(0) = solve_scalar_resolvent(g, gamma, v(0));
        return out;
      },
      MapFn([g](const Vector& u) -> Vector {
        Vector out(1);
        out(0) = g(u(0));
        return out;
      }),
      std::move(label));
}

MonotoneAtom scalar_power(double c, double p) {
  if (!(c >= 0.0) || !std::isfinite(c) || !(p > 0.0) || !std::isfinite(p)) {
    throw StructuralError("scalar_power: need c >= 0 and p > 0");
  }
  return scalar_monotone([c, p](double u) { return c * std::copysign(std::pow(std::abs(u), p), u); },
                         "scalar_power");
}

MonotoneAtom yosida_atom(const MonotoneAtom& inner, double lambda) {
  require_gamma(lambda);
  return MonotoneAtom(
      inner.dim(),
      [inner, lambda](double gamma, const Vector& v) -> Vector {
        const double t = gamma / (gamma + lambda);
        return v + t * (inner.resolvent(gamma + lambda, v) - v);
      },
      MapFn([inner, lambda](const Vector& u) -> Vector { return (u - inner.resolvent(lambda, u)) / lambda; }),
      "yosida(" + inner.label() + ")");
}

// --- direct integrals ----------------------------------------------------------

DirectIntegralOperator::DirectIntegralOperator(HilbertField field, std::vector<MonotoneAtom> atoms)
    : field_(std::move(field)), atoms_(std::move(atoms)) {
  if (atoms_.size() != field_.count()) throw StructuralError("operator family size does not match the field");
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (atoms_[k].dim() != field_.dim(k)) {
      throw StructuralError("operator atom " + std::to_string(k) + " has the wrong dimension");
    }
  }
}

bool DirectIntegralOperator::all_forward() const {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const MonotoneAtom& a) { return a.has_forward(); });
}

DirectIntegralOperator DirectIntegralOperator::with_field(HilbertField field) const {
  return DirectIntegralOperator(std::move(field), atoms_);
}

BlockVector di_resolvent(const DirectIntegralOperator& op, double gamma, const BlockVector& x) {
  require_gamma(gamma);
  require_conforming(op.field(), x);
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out.push_back(checked_point(k, on_atom(k, [&] { return op.atom(k).resolvent(gamma, x[k]); }), op.field().dim(k)));
  }
  return BlockVector(std::move(out));
}

BlockVector di_yosida(const DirectIntegralOperator& op, double gamma, const BlockVector& x) {
  const BlockVector j = di_resolvent(op, gamma, x);
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.push_back((x[k] - j[k]) / gamma);
  return BlockVector(std::move(out));
}

BlockVector inverse_resolvent(const DirectIntegralOperator& op, const BlockVector& x) {
  return subtract(x, di_resolvent(op, 1.0, x));
}

BlockVector inverse_resolvent(const DirectIntegralOperator& op, double gamma, const BlockVector& x) {
  require_gamma(gamma);
  require_conforming(op.field(), x);
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Vector j = checked_point(k, on_atom(k, [&] { return op.atom(k).resolvent(1.0 / gamma, x[k] / gamma); }),
                                   op.field().dim(k));
    out.push_back(x[k] - gamma * j);
  }
  return BlockVector(std::move(out));
}

BlockVector di_forward(const DirectIntegralOperator& op, const BlockVector& x) {
  require_conforming(op.field(), x);
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!op.atom(k).has_forward()) {
      throw CapabilityError("operator atom " + std::to_string(k) + " (" + op.atom(k).label() +
                            ") has no forward map");
    }
    out.push_back(checked_point(k, on_atom(k, [&] { return op.atom(k).forward(x[k]); }), op.field().dim(k)));
  }
  return BlockVector(std::move(out));
}

MinimalSelection minimal_selection(const DirectIntegralOperator& op, const BlockVector& x,
                                   const MinimalSelectionOptions& options) {
  require_conforming(op.field(), x);
  const std::vector<double> schedule =
      options.schedule.empty() ? geometric_schedule(1.0, 0.5, 21) : options.schedule;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    require_gamma(schedule[i]);
    if (i > 0 && !(schedule[i] < schedule[i - 1])) {
      throw PreconditionError("minimal_selection: schedule must be decreasing");
    }
  }

  MinimalSelection result;
  result.value = di_yosida(op, schedule.front(), x);
  std::vector<double> increments;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    BlockVector next = di_yosida(op, schedule[i], x);
    increments.push_back(norm(op.field(), subtract(next, result.value)));
    result.value = std::move(next);
  }
  if (!increments.empty()) result.increment = increments.back();

  // Inside the domain the Yosida values converge; outside they grow like
  // 1/gamma, so consecutive increments keep growing.
  if (options.window > 0 && increments.size() > options.window) {
    bool growing = true;
    for (std::size_t i = increments.size() - options.window; i < increments.size(); ++i) {
      const double prev = increments[i - 1];
      const double cur = increments[i];
      if (!(prev > 0.0) || cur <= 1e-12 || cur < options.growth_ratio * prev) {
        growing = false;
        break;
      }
    }
    if (growing) {
      throw DomainViolation("minimal_selection: Yosida values diverge (last increment " +
                            std::to_string(result.increment) + "); x is likely outside dom A");
    }
  }
  return result;
}

MonotonicityReport monotonicity_probe(const DirectIntegralOperator& op, std::size_t samples, std::uint64_t seed) {
  if (!op.all_forward()) throw CapabilityError("monotonicity_probe: every atom needs a forward map");
  if (samples == 0) throw PreconditionError("monotonicity_probe: need at least one sample");
  std::mt19937_64 rng(seed);
  const HilbertField& field = op.field();
  MonotonicityReport report;
  report.min_product = kInfinity;
  for (std::size_t s = 0; s < samples; ++s) {
    const BlockVector x = sample_block_vector(field, rng);
    const BlockVector y = sample_block_vector(field, rng);
    const double product = inner_product(field, subtract(x, y), subtract(di_forward(op, x), di_forward(op, y)));
    report.min_product = std::min(report.min_product, product);
  }
  report.samples = samples;
  return report;
}

namespace {

// Constant certified by one pair (d = x - y, e = Tx - Ty), or NaN when the
// pair carries no information.
double pair_constant(Regularity kind, double dd, double de, double ee, double diff_sq) {
  switch (kind) {
    case Regularity::lipschitz:
      return dd > 0.0 ? std::sqrt(ee / dd) : std::nan("");
    case Regularity::cocoercive:
      return ee > 0.0 ? de / ee : std::nan("");
    case Regularity::averaged: {
      // Smallest a with Id + (T - Id)/a nonexpansive on this pair:
      // a >= |d - e|^2 / (2 (|d|^2 - <d, e>)).
      const double denom = 2.0 * (dd - de);
      if (diff_sq <= 1e-300) return std::nan("");
      return denom > 0.0 ? diff_sq / denom : kInfinity;
    }
  }
  return std::nan("");
}

bool worse(Regularity kind, double candidate, double incumbent) {
  return kind == Regularity::cocoercive ? candidate < incumbent : candidate > incumbent;
}

}  // namespace

RegularityReport regularity_probe(const HilbertField& field, const BlockMap& map, Regularity kind, std::size_t samples,
                                  std::uint64_t seed) {
  if (samples == 0) throw PreconditionError("regularity_probe: need at least one sample");
  std::mt19937_64 rng(seed);
  const double start = kind == Regularity::cocoercive ? kInfinity : 0.0;

  auto accumulate_pair = [&](const BlockVector& x, const BlockVector& y, double& incumbent) {
    const BlockVector d = subtract(x, y);
    const BlockVector e = subtract(map(x), map(y));
    require_conforming(field, e, "T(x) - T(y)");
    const double dd = inner_product(field, d, d);
    const double de = inner_product(field, d, e);
    const double ee = inner_product(field, e, e);
    const BlockVector de_diff = subtract(d, e);
    const double c = pair_constant(kind, dd, de, ee, inner_product(field, de_diff, de_diff));
    if (!std::isnan(c) && worse(kind, c, incumbent)) incumbent = c;
  };

  RegularityReport report;
  report.joint = start;
  for (std::size_t s = 0; s < samples; ++s) {
    const BlockVector x = sample_block_vector(field, rng);
    const BlockVector y = sample_block_vector(field, rng);
    accumulate_pair(x, y, report.joint);
  }
  report.estimate = report.joint;
  report.per_atom.assign(field.count(), start);
  for (std::size_t k = 0; k < field.count(); ++k) {
    for (std::size_t s = 0; s < samples; ++s) {
      const BlockVector x = sample_block_vector(field, rng);
      BlockVector y = x;
      y[k] = sample_vector(field.dim(k), rng);
      accumulate_pair(x, y, report.per_atom[k]);
    }
    if (worse(kind, report.per_atom[k], report.estimate)) report.estimate = report.per_atom[k];
  }
  return report;
}

RegularityReport regularity_probe(const DirectIntegralOperator& op, Regularity kind, std::size_t samples,
                                  std::uint64_t seed) {
  if (!op.all_forward()) throw CapabilityError("regularity_probe: every atom needs a forward map");
  return regularity_probe(
      op.field(), [&op](const BlockVector& x) { return di_forward(op, x); }, kind, samples, seed);
}

}  // namespace dint
