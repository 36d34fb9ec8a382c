#include "dint/functions.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "detail.hpp"
#include "dint/errors.hpp"

namespace dint {
namespace {

using detail::checked_point;
using detail::checked_value;
using detail::on_atom;
using detail::require_dim;
using detail::require_gamma;

double indicator_value(bool inside) { return inside ? 0.0 : kInfinity; }

bool is_exactly_zero(const Vector& x) { return x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0; }

Vector clamp(const Vector& x, const Vector& lo, const Vector& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

// --- ConvexAtom --------------------------------------------------------------

ConvexAtom::ConvexAtom(std::size_t dim, Oracles oracles, Vector witness, std::string label)
    : dim_(dim), oracles_(std::move(oracles)), witness_(std::move(witness)), label_(std::move(label)) {
  if (dim_ == 0) throw StructuralError(label_ + ": dimension must be positive");
  if (!oracles_.eval || !oracles_.prox) throw StructuralError(label_ + ": eval and prox are required");
  require_dim(witness_, dim_, label_ + " witness");
  const double w = oracles_.eval(witness_);
  if (!std::isfinite(w)) throw StructuralError(label_ + ": witness point has no finite value");
}

double ConvexAtom::eval(const Vector& x) const {
  require_dim(x, dim_, label_);
  return oracles_.eval(x);
}

Vector ConvexAtom::prox(double gamma, const Vector& x) const {
  require_gamma(gamma);
  require_dim(x, dim_, label_);
  return oracles_.prox(gamma, x);
}

double ConvexAtom::conjugate(const Vector& x) const {
  if (!oracles_.conjugate) throw CapabilityError(label_ + ": no conjugate oracle");
  require_dim(x, dim_, label_);
  return (*oracles_.conjugate)(x);
}

double ConvexAtom::recession(const Vector& x) const {
  if (!oracles_.recession) throw CapabilityError(label_ + ": no analytic recession function");
  require_dim(x, dim_, label_);
  return (*oracles_.recession)(x);
}

Vector ConvexAtom::gradient(const Vector& x) const {
  if (!oracles_.gradient) throw CapabilityError(label_ + ": not differentiable");
  require_dim(x, dim_, label_);
  return (*oracles_.gradient)(x);
}

// --- ConvexSetAtom -----------------------------------------------------------

ConvexSetAtom::ConvexSetAtom(std::size_t dim, Oracles oracles, std::string label)
    : dim_(dim), oracles_(std::move(oracles)), label_(std::move(label)) {
  if (dim_ == 0) throw StructuralError(label_ + ": dimension must be positive");
  if (!oracles_.contains || !oracles_.projection) {
    throw StructuralError(label_ + ": membership and projection are required");
  }
}

bool ConvexSetAtom::contains(const Vector& x) const {
  require_dim(x, dim_, label_);
  return oracles_.contains(x);
}

Vector ConvexSetAtom::project(const Vector& x) const {
  require_dim(x, dim_, label_);
  return oracles_.projection(x);
}

double ConvexSetAtom::support(const Vector& x) const {
  if (!oracles_.support) throw CapabilityError(label_ + ": no support function");
  require_dim(x, dim_, label_);
  return (*oracles_.support)(x);
}

bool ConvexSetAtom::recession_contains(const Vector& x) const {
  if (!oracles_.recession_contains) throw CapabilityError(label_ + ": no recession cone");
  require_dim(x, dim_, label_);
  return (*oracles_.recession_contains)(x);
}

// --- set library -------------------------------------------------------------

ConvexSetAtom box_set(Vector lo, Vector hi) {
  if (lo.size() == 0 || lo.size() != hi.size()) throw StructuralError("box: bounds of mismatched size");
  if (!lo.allFinite() || !hi.allFinite()) throw StructuralError("box: bounds must be finite");
  if ((lo.array() > hi.array()).any()) throw StructuralError("box: lower bound exceeds upper bound");
  const auto dim = static_cast<std::size_t>(lo.size());
  ConvexSetAtom::Oracles o;
  o.contains = [lo, hi](const Vector& x) {
    const double tol = 1e-10 * (1.0 + std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()));
    return ((x.array() >= lo.array() - tol) && (x.array() <= hi.array() + tol)).all();
  };
  o.projection = [lo, hi](const Vector& x) { return clamp(x, lo, hi); };
  o.support = [lo, hi](const Vector& x) {
    return (lo.cwiseProduct(x)).cwiseMax(hi.cwiseProduct(x)).sum();
  };
  o.recession_contains = [](const Vector& x) { return is_exactly_zero(x); };
  return ConvexSetAtom(dim, std::move(o), "box");
}

ConvexSetAtom ball_set(Vector center, double radius) {
  if (center.size() == 0 || !center.allFinite()) throw StructuralError("ball: invalid center");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw StructuralError("ball: radius must be >= 0");
  const auto dim = static_cast<std::size_t>(center.size());
  ConvexSetAtom::Oracles o;
  o.contains = [center, radius](const Vector& x) {
    return (x - center).norm() <= radius * (1.0 + 1e-10) + 1e-12;
  };
  o.projection = [center, radius](const Vector& x) -> Vector {
    const Vector d = x - center;
    const double n = d.norm();
    if (n <= radius) return x;
    return center + (radius / n) * d;
  };
  o.support = [center, radius](const Vector& x) { return center.dot(x) + radius * x.norm(); };
  o.recession_contains = [](const Vector& x) { return is_exactly_zero(x); };
  return ConvexSetAtom(dim, std::move(o), "ball");
}

ConvexSetAtom halfspace_set(Vector a, double beta) {
  if (a.size() == 0 || !a.allFinite() || a.norm() == 0.0) throw StructuralError("halfspace: normal must be nonzero");
  if (!std::isfinite(beta)) throw StructuralError("halfspace: offset must be finite");
  const auto dim = static_cast<std::size_t>(a.size());
  const double a_sq = a.squaredNorm();
  ConvexSetAtom::Oracles o;
  o.contains = [a, beta](const Vector& x) {
    return a.dot(x) <= beta + 1e-10 * (1.0 + std::abs(beta) + a.norm() * x.norm());
  };
  o.projection = [a, beta, a_sq](const Vector& x) -> Vector {
    const double s = a.dot(x) - beta;
    if (s <= 0.0) return x;
    return x - (s / a_sq) * a;
  };
  // sigma(y) = t * beta when y = t * a with t >= 0, +inf otherwise.
  o.support = [a, beta, a_sq](const Vector& y) {
    const double t = a.dot(y) / a_sq;
    const double off = (y - t * a).norm();
    const double tol = 1e-10 * (1.0 + y.norm());
    if (off > tol || t < -tol) return kInfinity;
    return std::max(t, 0.0) * beta;
  };
  o.recession_contains = [a](const Vector& x) { return a.dot(x) <= 1e-12 * a.norm() * x.norm(); };
  return ConvexSetAtom(dim, std::move(o), "halfspace");
}

ConvexSetAtom nonnegative_orthant(std::size_t dim) {
  ConvexSetAtom::Oracles o;
  o.contains = [](const Vector& x) { return (x.array() >= -1e-12).all(); };
  o.projection = [](const Vector& x) -> Vector { return x.cwiseMax(0.0); };
  o.support = [](const Vector& x) { return indicator_value((x.array() <= 1e-12).all()); };
  o.recession_contains = [](const Vector& x) { return (x.array() >= -1e-12).all(); };
  return ConvexSetAtom(dim, std::move(o), "nonnegative_orthant");
}

ConvexSetAtom affine_set(Matrix a, Vector b) {
  if (a.rows() == 0 || a.cols() == 0 || a.rows() != b.size()) {
    throw StructuralError("affine: constraint matrix and right-hand side do not match");
  }
  if (a.rows() > a.cols()) throw StructuralError("affine: more constraints than unknowns");
  const Matrix gram = a * a.transpose();
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 1e-12) {
    throw StructuralError("affine: constraint matrix must have full row rank");
  }
  const Vector x0 = a.transpose() * llt.solve(b);
  const auto dim = static_cast<std::size_t>(a.cols());
  ConvexSetAtom::Oracles o;
  o.contains = [a, b](const Vector& x) {
    return (a * x - b).norm() <= 1e-10 * (1.0 + b.norm() + a.norm() * x.norm());
  };
  o.projection = [a, b, llt](const Vector& x) -> Vector {
    return x - a.transpose() * llt.solve(a * x - b);
  };
  // Finite only on the row space of A, where it equals <y, x0>.
  o.support = [a, llt, x0](const Vector& y) {
    const Vector off = y - a.transpose() * llt.solve(a * y);
    if (off.norm() > 1e-10 * (1.0 + y.norm())) return kInfinity;
    return y.dot(x0);
  };
  o.recession_contains = [a](const Vector& x) { return (a * x).norm() <= 1e-12 * (1.0 + a.norm() * x.norm()); };
  return ConvexSetAtom(dim, std::move(o), "affine");
}

ConvexSetAtom singleton_set(Vector point) {
  if (point.size() == 0 || !point.allFinite()) throw StructuralError("singleton: invalid point");
  const auto dim = static_cast<std::size_t>(point.size());
  ConvexSetAtom::Oracles o;
  o.contains = [point](const Vector& x) { return (x - point).norm() <= 1e-12 * (1.0 + point.norm()); };
  o.projection = [point](const Vector&) -> Vector { return point; };
  o.support = [point](const Vector& x) { return point.dot(x); };
  o.recession_contains = [](const Vector& x) { return is_exactly_zero(x); };
  return ConvexSetAtom(dim, std::move(o), "singleton");
}

// --- function library ----------------------------------------------------------

ConvexAtom zero_function(std::size_t dim) {
  ConvexAtom::Oracles o;
  o.eval = [](const Vector&) { return 0.0; };
  o.prox = [](double, const Vector& x) -> Vector { return x; };
  o.conjugate = [](const Vector& x) { return indicator_value(x.norm() <= 1e-12); };
  o.recession = [](const Vector&) { return 0.0; };
  o.gradient = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
  return ConvexAtom(dim, std::move(o), Vector::Zero(static_cast<Eigen::Index>(dim)), "zero");
}

ConvexAtom quadratic(Matrix q, Vector b) {
  if (q.rows() == 0 || q.rows() != q.cols() || q.rows() != b.size()) {
    throw StructuralError("quadratic: Q must be square and match b");
  }
  if (!q.allFinite() || !b.allFinite()) throw StructuralError("quadratic: non-finite data");
  const double scale = 1.0 + q.cwiseAbs().maxCoeff();
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw StructuralError("quadratic: Q must be symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw StructuralError("quadratic: Q must be positive semidefinite");
  }
  const auto dim = static_cast<std::size_t>(q.rows());
  const double lambda_tol = 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff());
  const Vector eigenvalues = eig.eigenvalues();
  const Matrix eigenvectors = eig.eigenvectors();

  ConvexAtom::Oracles o;
  o.eval = [q, b](const Vector& x) { return 0.5 * x.dot(q * x) + b.dot(x); };
  o.prox = [q, b](double gamma, const Vector& x) -> Vector {
    const Matrix lhs = Matrix::Identity(q.rows(), q.cols()) + gamma * q;
    return lhs.ldlt().solve(x - gamma * b);
  };
  // f*(y) = 0.5 (y - b)^T Q^+ (y - b) on b + range Q, +inf elsewhere.
  o.conjugate = [eigenvalues, eigenvectors, b, lambda_tol](const Vector& y) {
    const Vector c = eigenvectors.transpose() * (y - b);
    const double tol = 1e-9 * (1.0 + (y - b).norm());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (eigenvalues(i) > lambda_tol) {
        acc += 0.5 * c(i) * c(i) / eigenvalues(i);
      } else if (std::abs(c(i)) > tol) {
        return kInfinity;
      }
    }
    return acc;
  };
  o.recession = [q, b](const Vector& x) {
    if ((q * x).norm() > 1e-12 * (1.0 + q.norm() * x.norm())) return kInfinity;
    return b.dot(x);
  };
  o.gradient = [q, b](const Vector& x) -> Vector { return q * x + b; };
  return ConvexAtom(dim, std::move(o), Vector::Zero(static_cast<Eigen::Index>(dim)), "quadratic");
}

ConvexAtom l1_norm(std::size_t dim) {
  ConvexAtom::Oracles o;
  o.eval = [](const Vector& x) { return x.cwiseAbs().sum(); };
  o.prox = [](double gamma, const Vector& x) -> Vector {
    return x.unaryExpr([gamma](double v) { return std::copysign(std::max(std::abs(v) - gamma, 0.0), v); });
  };
  o.conjugate = [](const Vector& x) { return indicator_value(x.cwiseAbs().maxCoeff() <= 1.0 + 1e-12); };
  o.recession = [](const Vector& x) { return x.cwiseAbs().sum(); };
  return ConvexAtom(dim, std::move(o), Vector::Zero(static_cast<Eigen::Index>(dim)), dim == 1 ? "abs" : "l1_norm");
}

ConvexAtom l2_norm(std::size_t dim) {
  ConvexAtom::Oracles o;
  o.eval = [](const Vector& x) { return x.norm(); };
  o.prox = [](double gamma, const Vector& x) -> Vector {
    const double n = x.norm();
    if (n <= gamma) return Vector::Zero(x.size());
    return (1.0 - gamma / n) * x;
  };
  o.conjugate = [](const Vector& x) { return indicator_value(x.norm() <= 1.0 + 1e-12); };
  o.recession = [](const Vector& x) { return x.norm(); };
  return ConvexAtom(dim, std::move(o), Vector::Zero(static_cast<Eigen::Index>(dim)), "l2_norm");
}

ConvexAtom linear_function(Vector c) {
  if (c.size() == 0 || !c.allFinite()) throw StructuralError("linear: invalid coefficients");
  const auto dim = static_cast<std::size_t>(c.size());
  ConvexAtom::Oracles o;
  o.eval = [c](const Vector& x) { return c.dot(x); };
  o.prox = [c](double gamma, const Vector& x) -> Vector { return x - gamma * c; };
  o.conjugate = [c](const Vector& x) { return indicator_value((x - c).norm() <= 1e-12 * (1.0 + c.norm())); };
  o.recession = [c](const Vector& x) { return c.dot(x); };
  o.gradient = [c](const Vector&) -> Vector { return c; };
  return ConvexAtom(dim, std::move(o), Vector::Zero(static_cast<Eigen::Index>(dim)), "linear");
}

ConvexAtom indicator(const ConvexSetAtom& set) {
  ConvexAtom::Oracles o;
  o.eval = [set](const Vector& x) { return indicator_value(set.contains(x)); };
  o.prox = [set](double, const Vector& x) -> Vector { return set.project(x); };
  if (set.has_support()) {
    o.conjugate = [set](const Vector& x) { return set.support(x); };
  }
  if (set.has_recession_cone()) {
    o.recession = [set](const Vector& x) { return indicator_value(set.recession_contains(x)); };
  }
  const Vector witness = set.project(Vector::Zero(static_cast<Eigen::Index>(set.dim())));
  return ConvexAtom(set.dim(), std::move(o), witness, "indicator(" + set.label() + ")");
}

ConvexAtom box_support(Vector lo, Vector hi) {
  // Validates the bounds as a side effect.
  const ConvexSetAtom box = box_set(lo, hi);
  ConvexAtom::Oracles o;
  o.eval = [box](const Vector& x) { return box.support(x); };
  o.prox = [box](double gamma, const Vector& x) -> Vector { return x - gamma * box.project(x / gamma); };
  o.conjugate = [box](const Vector& x) { return indicator_value(box.contains(x)); };
  o.recession = [box](const Vector& x) { return box.support(x); };
  return ConvexAtom(box.dim(), std::move(o), Vector::Zero(lo.size()), "box_support");
}

ConvexAtom conjugate_atom(const ConvexAtom& f) {
  if (!f.has_conjugate()) throw CapabilityError(f.label() + ": no conjugate oracle");
  ConvexAtom::Oracles o;
  o.eval = [f](const Vector& x) { return f.conjugate(x); };
  o.prox = [f](double gamma, const Vector& x) -> Vector { return x - gamma * f.prox(1.0 / gamma, x / gamma); };
  o.conjugate = [f](const Vector& x) { return f.eval(x); };
  // w - prox_f(w) is a subgradient of f at prox_f(w), hence in dom f*.
  const Vector witness = f.witness() - f.prox(1.0, f.witness());
  return ConvexAtom(f.dim(), std::move(o), witness, "conj(" + f.label() + ")");
}

// --- direct integrals ----------------------------------------------------------

DirectIntegralFunction::DirectIntegralFunction(HilbertField field, std::vector<ConvexAtom> atoms)
    : field_(std::move(field)), atoms_(std::move(atoms)) {
  if (atoms_.size() != field_.count()) throw StructuralError("function family size does not match the field");
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (atoms_[k].dim() != field_.dim(k)) {
      throw StructuralError("function atom " + std::to_string(k) + " has the wrong dimension");
    }
  }
}

BlockVector DirectIntegralFunction::witness() const {
  std::vector<Vector> blocks;
  blocks.reserve(atoms_.size());
  for (const auto& a : atoms_) blocks.push_back(a.witness());
  return BlockVector(std::move(blocks));
}

DirectIntegralFunction DirectIntegralFunction::with_field(HilbertField field) const {
  return DirectIntegralFunction(std::move(field), atoms_);
}

DirectIntegralSet::DirectIntegralSet(HilbertField field, std::vector<ConvexSetAtom> atoms)
    : field_(std::move(field)), atoms_(std::move(atoms)) {
  if (atoms_.size() != field_.count()) throw StructuralError("set family size does not match the field");
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (atoms_[k].dim() != field_.dim(k)) {
      throw StructuralError("set atom " + std::to_string(k) + " has the wrong dimension");
    }
  }
}

DirectIntegralFunction indicator(const DirectIntegralSet& set) {
  std::vector<ConvexAtom> atoms;
  atoms.reserve(set.atoms().size());
  for (const auto& c : set.atoms()) atoms.push_back(indicator(c));
  return DirectIntegralFunction(set.field(), std::move(atoms));
}

DirectIntegralFunction conjugate_function(const DirectIntegralFunction& f) {
  std::vector<ConvexAtom> atoms;
  atoms.reserve(f.atoms().size());
  for (const auto& a : f.atoms()) atoms.push_back(conjugate_atom(a));
  return DirectIntegralFunction(f.field(), std::move(atoms));
}

double di_eval(const DirectIntegralFunction& f, const BlockVector& x) {
  require_conforming(f.field(), x);
  std::vector<double> values(f.atoms().size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = checked_value(k, on_atom(k, [&] { return f.atom(k).eval(x[k]); }));
  }
  return integrate(f.field().space(), values);
}

BlockVector di_prox(const DirectIntegralFunction& f, double gamma, const BlockVector& x) {
  require_gamma(gamma);
  require_conforming(f.field(), x);
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out.push_back(checked_point(k, on_atom(k, [&] { return f.atom(k).prox(gamma, x[k]); }), f.field().dim(k)));
  }
  return BlockVector(std::move(out));
}

double di_envelope(const DirectIntegralFunction& f, double gamma, const BlockVector& x) {
  const BlockVector p = di_prox(f, gamma, x);
  std::vector<double> values(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double fp = checked_value(k, on_atom(k, [&] { return f.atom(k).eval(p[k]); }));
    if (!std::isfinite(fp)) throw NumericalError(k, "prox output lies outside the domain");
    values[k] = fp + (x[k] - p[k]).squaredNorm() / (2.0 * gamma);
  }
  return integrate(f.field().space(), values);
}

BlockVector envelope_gradient(const DirectIntegralFunction& f, double gamma, const BlockVector& x) {
  const BlockVector p = di_prox(f, gamma, x);
  return scale(1.0 / gamma, subtract(x, p));
}

namespace {

// theta_n = |x*|^2 / (2 g) - env_{1/g} f(x* / g), increasing to f*(x*) as g -> 0.
std::pair<double, double> estimate_atom_conjugate(std::size_t k, const ConvexAtom& f, const Vector& xstar,
                                                  const std::vector<double>& schedule) {
  double previous = -kInfinity;
  double current = -kInfinity;
  for (const double g : schedule) {
    const double lambda = 1.0 / g;
    const Vector y = xstar / g;
    const Vector p = on_atom(k, [&] { return f.prox(lambda, y); });
    const double fp = checked_value(k, on_atom(k, [&] { return f.eval(p); }));
    if (!std::isfinite(fp)) throw NumericalError(k, "prox output lies outside the domain");
    const double envelope = fp + (y - p).squaredNorm() / (2.0 * lambda);
    previous = current;
    current = xstar.squaredNorm() / (2.0 * g) - envelope;
  }
  const double increment = std::isfinite(previous) ? current - previous : 0.0;
  return {current, increment};
}

}  // namespace

ConjugateValue di_conjugate(const DirectIntegralFunction& f, const BlockVector& xstar,
                            const ConjugateOptions& options) {
  require_conforming(f.field(), xstar, "x*");
  const std::vector<double> schedule =
      options.schedule.empty() ? geometric_schedule(1.0, 0.5, 21) : options.schedule;
  for (const double g : schedule) require_gamma(g);

  ConjugateValue result;
  std::vector<double> values(f.atoms().size());
  std::vector<double> increments(f.atoms().size(), 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const ConvexAtom& atom = f.atom(k);
    if (atom.has_conjugate()) {
      values[k] = checked_value(k, on_atom(k, [&] { return atom.conjugate(xstar[k]); }));
    } else if (options.allow_estimate) {
      std::tie(values[k], increments[k]) = estimate_atom_conjugate(k, atom, xstar[k], schedule);
      result.estimated = true;
    } else {
      throw CapabilityError("atom " + std::to_string(k) + " (" + atom.label() +
                            ") has no conjugate oracle and estimation is disabled");
    }
  }
  result.value = integrate(f.field().space(), values);
  result.increment = integrate(f.field().space(), increments);
  return result;
}

BlockVector conjugate_prox(const DirectIntegralFunction& f, double gamma, const BlockVector& x) {
  require_gamma(gamma);
  require_conforming(f.field(), x);
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Vector p = checked_point(k, on_atom(k, [&] { return f.atom(k).prox(1.0 / gamma, x[k] / gamma); }),
                                   f.field().dim(k));
    out.push_back(x[k] - gamma * p);
  }
  return BlockVector(std::move(out));
}

RecessionValue recession_estimate(const DirectIntegralFunction& f, const BlockVector& x,
                                  const RecessionOptions& options) {
  require_conforming(f.field(), x);
  const auto& atoms = f.atoms();
  const std::size_t p = atoms.size();
  RecessionValue result;

  const bool all_analytic =
      std::all_of(atoms.begin(), atoms.end(), [](const ConvexAtom& a) { return a.has_recession(); });
  if (options.use_analytic && all_analytic) {
    std::vector<double> values(p);
    for (std::size_t k = 0; k < p; ++k) {
      values[k] = checked_value(k, on_atom(k, [&] { return atoms[k].recession(x[k]); }));
    }
    result.value = integrate(f.field().space(), values);
    result.analytic = true;
    return result;
  }

  std::vector<double> schedule = options.schedule;
  if (schedule.empty()) schedule = geometric_schedule(1.0, 10.0, 15);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] > schedule[i - 1]))) {
      throw PreconditionError("recession schedule must be positive and increasing");
    }
  }

  const BlockVector r = f.witness();
  std::vector<double> base(p);
  for (std::size_t k = 0; k < p; ++k) {
    base[k] = checked_value(k, on_atom(k, [&] { return atoms[k].eval(r[k]); }));
  }

  double previous = -kInfinity;
  double current = -kInfinity;
  for (const double a : schedule) {
    std::vector<double> quotients(p);
    for (std::size_t k = 0; k < p; ++k) {
      const Vector moved = r[k] + a * x[k];
      const double v = checked_value(k, on_atom(k, [&] { return atoms[k].eval(moved); }));
      quotients[k] = std::isfinite(v) ? (v - base[k]) / a : kInfinity;
    }
    previous = current;
    current = integrate(f.field().space(), quotients);
    if (current > options.divergence_bound) {
      result.value = kInfinity;
      result.increment = kInfinity;
      result.diverged = true;
      return result;
    }
  }
  result.value = current;
  result.increment = std::isfinite(previous) ? current - previous : 0.0;
  return result;
}

double subgradient_residual(const DirectIntegralFunction& f, const BlockVector& x, const BlockVector& xstar) {
  require_conforming(f.field(), x, "x");
  require_conforming(f.field(), xstar, "x*");
  const BlockVector p = di_prox(f, 1.0, add(x, xstar));
  return norm(f.field(), subtract(x, p));
}

BlockVector project(const DirectIntegralSet& set, const BlockVector& x) {
  require_conforming(set.field(), x);
  std::vector<Vector> out;
  out.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out.push_back(checked_point(k, on_atom(k, [&] { return set.atom(k).project(x[k]); }), set.field().dim(k)));
  }
  return BlockVector(std::move(out));
}

bool contains(const DirectIntegralSet& set, const BlockVector& x) {
  require_conforming(set.field(), x);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!set.atom(k).contains(x[k])) return false;
  }
  return true;
}

double support(const DirectIntegralSet& set, const BlockVector& x) {
  require_conforming(set.field(), x);
  std::vector<double> values(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!set.atom(k).has_support()) {
      throw CapabilityError("set atom " + std::to_string(k) + " (" + set.atom(k).label() + ") has no support function");
    }
    values[k] = checked_value(k, on_atom(k, [&] { return set.atom(k).support(x[k]); }));
  }
  return integrate(set.field().space(), values);
}

std::vector<double> geometric_schedule(double first, double ratio, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  double v = first;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(v);
    v *= ratio;
  }
  return out;
}

}  // namespace dint
