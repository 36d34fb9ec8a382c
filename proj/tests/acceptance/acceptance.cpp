// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dint/config.hpp"
#include "dint/functions.hpp"
#include "dint/inclusion_solver.hpp"
#include "dint/linear_family.hpp"
#include "dint/operators.hpp"
#include "dint/sampling.hpp"
#include "oracles.hpp"

using namespace dint;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double time_limit, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out{false, ""};
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (time_limit > 0 && secs >= time_limit) {
    out.pass = false;
    out.detail += " (over the " + format_real(time_limit) + " s budget)";
  }
  if (!out.pass) ++failures;
  std::printf("%s %2d %s: %s [%.3f s]\n", out.pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix scalar_mat(double v) {
  Matrix m(1, 1);
  m << v;
  return m;
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
  return m;
}

// PSD plus skew, so M + M^T is positive semidefinite.
Matrix random_monotone(std::mt19937_64& rng, Eigen::Index n, double shift) {
  const Matrix b = random_matrix(rng, n, n);
  const Matrix s = random_matrix(rng, n, n);
  return b * b.transpose() / static_cast<double>(n) + shift * Matrix::Identity(n, n) + 0.3 * (s - s.transpose());
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(std::exp(g(rng)));
  return w;
}

HilbertField make_field(std::vector<double> w, std::vector<std::size_t> dims) {
  return HilbertField(AtomicMeasureSpace(std::move(w)), std::move(dims));
}

// --- catalogues --------------------------------------------------------------

MonotoneAtom random_operator_atom(std::mt19937_64& rng, std::size_t d) {
  const auto di = static_cast<Eigen::Index>(d);
  const Vector lo = -Vector::Ones(di);
  const Vector hi = 2 * Vector::Ones(di);
  Matrix q = random_matrix(rng, di, di);
  q = q * q.transpose();
  switch (std::uniform_int_distribution<int>(0, d == 1 ? 8 : 7)(rng)) {
    case 0:
      return affine_operator(random_monotone(rng, di, 0.0), sample_vector(d, rng, 2.0));
    case 1:
      return scaled_identity(d, std::exp(std::normal_distribution<double>()(rng)));
    case 2:
      return normal_cone(box_set(lo, hi));
    case 3:
      return normal_cone(ball_set(sample_vector(d, rng, 1.0), 1.5));
    case 4:
      return subdifferential(l1_norm(d));
    case 5:
      return subdifferential(quadratic(q, sample_vector(d, rng, 1.0)));
    case 6:
      return yosida_atom(normal_cone(halfspace_set(Vector::Ones(di), 0.5)), 0.7);
    case 7:
      return subdifferential(l2_norm(d));
    default:
      return scalar_power(1.3, 2.5);
  }
}

DirectIntegralOperator random_operator_family(std::mt19937_64& rng, std::size_t atoms) {
  std::vector<std::size_t> dims;
  std::vector<MonotoneAtom> ops;
  for (std::size_t k = 0; k < atoms; ++k) {
    dims.push_back(std::uniform_int_distribution<std::size_t>(1, 3)(rng));
    ops.push_back(random_operator_atom(rng, dims.back()));
  }
  return DirectIntegralOperator(make_field(random_weights(rng, atoms), dims), std::move(ops));
}

// 1-D atoms, each with the scalar function used by the grid oracle and the
// interval of slopes where its conjugate is finite.
struct ScalarCase {
  ConvexAtom atom;
  std::function<double(double)> f;
  double slope_lo;
  double slope_hi;
};

std::vector<ScalarCase> scalar_catalogue() {
  const double inf = kInfinity;
  return {
      {l1_norm(1), [](double y) { return std::abs(y); }, -1, 1},
      {quadratic(scalar_mat(2.0), vec({-1})), [](double y) { return y * y - y; }, -8, 8},
      {quadratic(scalar_mat(0.5), vec({0.5})), [](double y) { return 0.25 * y * y + 0.5 * y; }, -4, 4},
      {zero_function(1), [](double) { return 0.0; }, 0, 0},
      {linear_function(vec({1.5})), [](double y) { return 1.5 * y; }, 1.5, 1.5},
      {l2_norm(1), [](double y) { return std::abs(y); }, -1, 1},
      {indicator(box_set(vec({-1}), vec({2}))), [=](double y) { return (y < -1 || y > 2) ? inf : 0.0; }, -8, 8},
      {indicator(halfspace_set(vec({1}), 0.5)), [=](double y) { return y > 0.5 ? inf : 0.0; }, 0, 8},
      {indicator(nonnegative_orthant(1)), [=](double y) { return y < 0 ? inf : 0.0; }, -8, 0},
      {indicator(ball_set(vec({1}), 2)), [=](double y) { return std::abs(y - 1) > 2 ? inf : 0.0; }, -8, 8},
      {box_support(vec({-0.5}), vec({2})), [](double y) { return y > 0 ? 2 * y : -0.5 * y; }, -0.5, 2},
      {conjugate_atom(l1_norm(1)), [=](double y) { return std::abs(y) > 1 ? inf : 0.0; }, -8, 8},
  };
}

// Multi-dimensional atoms, all with exact conjugates.
DirectIntegralFunction function_library(std::vector<double> weights) {
  Matrix q2(2, 2);
  q2 << 2, 1, 1, 3;
  Matrix q3 = Matrix::Zero(3, 3);  // singular PSD, b in its range
  q3(0, 0) = 1;
  q3(0, 1) = q3(1, 0) = 1;
  q3(1, 1) = 1;
  Matrix a(1, 3);
  a << 1, -1, 2;
  std::vector<ConvexAtom> atoms = {
      l1_norm(1),
      l1_norm(3),
      l2_norm(2),
      quadratic(q2, vec({1, -1})),
      quadratic(q3, vec({0.5, 0.5, 0})),
      zero_function(2),
      linear_function(vec({0.5, -2})),
      indicator(box_set(vec({-1, 0}), vec({1, 2}))),
      indicator(ball_set(vec({1, 0, 0}), 2.0)),
      indicator(halfspace_set(vec({1, 1}), 1.0)),
      indicator(nonnegative_orthant(2)),
      indicator(affine_set(a, vec({1}))),
      indicator(singleton_set(vec({0.5, -0.5}))),
      box_support(vec({-1, 0}), vec({1, 3})),
      conjugate_atom(l2_norm(2)),
      conjugate_atom(quadratic(q2, vec({0, 1}))),
  };
  std::vector<std::size_t> dims;
  for (const auto& f : atoms) dims.push_back(f.dim());
  if (weights.empty()) weights.assign(atoms.size(), 1.0);
  return DirectIntegralFunction(make_field(std::move(weights), std::move(dims)), std::move(atoms));
}

oracle::Vec flat(const BlockVector& x) {
  const auto v = x.flatten();
  return Eigen::Map<const oracle::Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double flat_norm(const BlockVector& x) { return flat(x).norm(); }

// --- primal-dual instances ---------------------------------------------------

struct AffineInstance {
  std::string name;
  oracle::QuadInstance data;
  PrimalDualProblem problem;
};

AffineInstance random_affine(std::mt19937_64& rng, std::string name, std::vector<double> alpha,
                             std::vector<std::size_t> dims, std::size_t m) {
  oracle::QuadInstance d;
  const auto mi = static_cast<Eigen::Index>(m);
  d.p = random_monotone(rng, mi, 0.5);
  d.q = sample_vector(m, rng, 3.0);
  d.alpha = alpha;
  std::vector<MonotoneAtom> atoms;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const auto dk = static_cast<Eigen::Index>(dims[k]);
    d.l.push_back(random_matrix(rng, dk, mi));
    d.m.push_back(random_monotone(rng, dk, 0.1));
    d.b.push_back(sample_vector(dims[k], rng, 3.0));
    atoms.push_back(affine_operator(d.m.back(), d.b.back()));
  }
  const auto fld = make_field(alpha, dims);
  PrimalDualProblem problem(affine_operator(d.p, d.q), LinearFamily(fld, m, d.l),
                            DirectIntegralOperator(fld, std::move(atoms)));
  return {std::move(name), std::move(d), std::move(problem)};
}

// The bundled closed-form demo plus a fixed, seeded all-affine suite.
std::vector<AffineInstance> quadratic_suite() {
  std::vector<AffineInstance> out;
  {
    oracle::QuadInstance d{scalar_mat(1), vec({-1}), {1.0}, {scalar_mat(1)}, {scalar_mat(1)}, {vec({0})}};
    out.push_back({"closed_form_quadratic", d, build_problem(demo_config("closed_form_quadratic"))});
  }
  std::mt19937_64 rng(2024);
  out.push_back(random_affine(rng, "affine_scalar_pair", {1.0, 2.0}, {1, 1}, 1));
  out.push_back(random_affine(rng, "affine_mixed_dims", {0.5, 1.5, 1.0}, {2, 1, 3}, 3));
  out.push_back(random_affine(rng, "affine_probability", {0.2, 0.3, 0.5}, {2, 2, 2}, 2));
  out.push_back(random_affine(rng, "affine_wide", {1.0, 1.0, 1.0, 1.0}, {1, 2, 1, 2}, 4));
  return out;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");

  run(1, "firm nonexpansiveness of the blockwise resolvent", 5.0, [] {
    std::mt19937_64 rng(101);
    double worst = kInfinity;
    for (int inst = 0; inst < 5; ++inst) {
      const auto op = random_operator_family(rng, 6);
      const auto& f = op.field();
      const double g = std::exp(std::normal_distribution<double>()(rng));
      for (int i = 0; i < 1000; ++i) {
        const auto x = sample_block_vector(f, rng);
        const auto y = sample_block_vector(f, rng);
        const auto d = subtract(di_resolvent(op, g, x), di_resolvent(op, g, y));
        worst = std::min(worst, inner_product(f, d, subtract(x, y)) - inner_product(f, d, d));
      }
    }
    return Outcome{worst >= -1e-9, "min <Jx-Jy,x-y> - |Jx-Jy|^2 = " + num(worst)};
  });

  run(2, "blockwise prox against the grid oracle", 0, [] {
    const auto cat = scalar_catalogue();
    std::vector<ConvexAtom> atoms;
    for (const auto& c : cat) atoms.push_back(c.atom);
    std::mt19937_64 rng(202);
    const DirectIntegralFunction f(make_field(random_weights(rng, cat.size()), std::vector<std::size_t>(cat.size(), 1)),
                                   atoms);
    const oracle::Grid1D grid{-15, 15, 30000};
    double worst = 0.0;
    double bound = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto x = sample_block_vector(f.field(), rng);
      const double g = std::exp(std::uniform_real_distribution<double>(std::log(0.2), std::log(5.0))(rng));
      const auto p = di_prox(f, g, x);
      for (std::size_t k = 0; k < cat.size(); ++k) {
        const double xk = x[k](0);
        const auto m = oracle::grid_min([&](double y) { return cat[k].f(y) + (xk - y) * (xk - y) / (2 * g); }, grid);
        bound = 2 * m.step;
        worst = std::max(worst, std::abs(p[k](0) - m.argmin));
      }
    }
    return Outcome{worst <= bound && bound <= 1e-3, "max |prox - grid| = " + num(worst) + " (bound " + num(bound) + ")"};
  });

  run(3, "Moreau decomposition", 0, [] {
    std::mt19937_64 rng(303);
    const auto f = function_library({});
    const auto fw = f.with_field(f.field().reweighted(random_weights(rng, f.atoms().size())));
    double worst = 0.0;
    for (const auto* fn : {&f, &fw}) {
      for (int i = 0; i < 100; ++i) {
        const auto x = sample_block_vector(fn->field(), rng);
        for (double g : {0.1, 1.0, 10.0}) {
          const auto r = add(di_prox(*fn, g, x), scale(g, conjugate_prox(*fn, 1.0 / g, scale(1.0 / g, x))));
          worst = std::max(worst, flat_norm(subtract(r, x)));
        }
      }
    }
    return Outcome{worst <= 1e-10, "max |prox + g prox* - x| = " + num(worst)};
  });

  run(4, "envelope gradient against finite differences", 0, [] {
    std::mt19937_64 rng(404);
    const auto f = function_library({});
    const auto& fld = f.field();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = sample_block_vector(fld, rng);
      const auto phi = [&](const oracle::Vec& v) {
        return di_envelope(f, 1.0, BlockVector::from_flat(fld, std::span<const double>(v.data(), v.size())));
      };
      const oracle::Vec fd = oracle::fd_grad(phi, flat(x), 1e-5);
      const oracle::Vec g = flat(envelope_gradient(f, 1.0, x));
      worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), 1.0));
    }
    return Outcome{worst <= 1e-5, "max relative error = " + num(worst)};
  });

  run(5, "envelope and conjugate envelope sum to |x|^2/(2g)", 0, [] {
    std::mt19937_64 rng(505);
    const auto f = function_library({});
    const auto fw = f.with_field(f.field().reweighted(random_weights(rng, f.atoms().size())));
    double worst = 0.0;
    for (const auto* fn : {&f, &fw}) {
      const auto fs = conjugate_function(*fn);
      for (int i = 0; i < 100; ++i) {
        const auto x = sample_block_vector(fn->field(), rng);
        for (double g : {0.1, 1.0, 10.0}) {
          const double lhs = di_envelope(*fn, g, x) + di_envelope(fs, 1.0 / g, scale(1.0 / g, x));
          worst = std::max(worst, std::abs(lhs - inner_product(fn->field(), x, x) / (2 * g)));
        }
      }
    }
    return Outcome{worst <= 1e-9, "max identity defect = " + num(worst)};
  });

  run(6, "conjugate is the weighted sum of atom conjugates", 0, [] {
    const auto cat = scalar_catalogue();
    std::vector<ConvexAtom> atoms;
    for (const auto& c : cat) atoms.push_back(c.atom);
    std::mt19937_64 rng(606);
    const DirectIntegralFunction f(make_field(random_weights(rng, cat.size()), std::vector<std::size_t>(cat.size(), 1)),
                                   atoms);
    const oracle::Grid1D grid{-20, 20, 40000};
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      std::vector<Vector> s;
      double brute = 0.0;
      for (std::size_t k = 0; k < cat.size(); ++k) {
        const double sk = std::uniform_real_distribution<double>(cat[k].slope_lo, cat[k].slope_hi)(rng);
        s.push_back(vec({sk}));
        brute += f.field().weight(k) * oracle::grid_conjugate(cat[k].f, sk, grid);
      }
      const double value = di_conjugate(f, BlockVector(s)).value;
      worst = std::max(worst, std::abs(value - brute));
    }
    return Outcome{worst <= 1e-3, "max |conjugate - grid sup| = " + num(worst)};
  });

  run(7, "prox mixture is cyclically monotone and nonexpansive", 10.0, [] {
    std::mt19937_64 rng(707);
    const auto f = function_library({});
    const auto& fld = f.field();
    const std::size_t m = 3;
    std::vector<Matrix> mats;
    for (std::size_t k = 0; k < fld.count(); ++k) {
      mats.push_back(random_matrix(rng, static_cast<Eigen::Index>(fld.dim(k)), static_cast<Eigen::Index>(m)));
    }
    const LinearFamily raw(fld, m, mats);
    const double s = 1.0 / std::sqrt(raw.norm_bound_sq());
    for (auto& mat : mats) mat *= s;
    const LinearFamily fam(fld, m, mats);
    const VectorMap t = [&](const Vector& z) { return prox_mixture(f, fam, z); };
    const CyclicReport cyc = cyclic_probe(t, m, 1000, 6, 77);
    double defect = -kInfinity;
    for (int i = 0; i < 1000; ++i) {
      const Vector z = sample_vector(m, rng);
      const Vector w = sample_vector(m, rng);
      defect = std::max(defect, (t(z) - t(w)).norm() - (z - w).norm());
    }
    return Outcome{cyc.max_violation <= 1e-9 && defect <= 1e-10,
                   "max cyclic sum = " + num(cyc.max_violation) + ", nonexpansiveness defect = " + num(defect)};
  });

  run(8, "composite map is monotone", 0, [] {
    std::mt19937_64 rng(808);
    double worst = kInfinity;
    for (int inst = 0; inst < 5; ++inst) {
      const std::size_t m = 3;
      std::vector<std::size_t> dims{1, 2, 1, 3};
      std::vector<MonotoneAtom> atoms;
      std::vector<Matrix> mats;
      for (std::size_t d : dims) {
        const auto di = static_cast<Eigen::Index>(d);
        mats.push_back(random_matrix(rng, di, static_cast<Eigen::Index>(m)));
        if (d == 1) {
          atoms.push_back(inst % 2 == 0 ? scalar_power(0.8, 3.0) : yosida_atom(normal_cone(box_set(vec({0}), vec({1}))), 0.5));
        } else {
          atoms.push_back(affine_operator(random_monotone(rng, di, 0.0), sample_vector(d, rng, 1.0)));
        }
      }
      const auto fld = make_field(random_weights(rng, dims.size()), dims);
      const PrimalDualProblem p(affine_operator(random_monotone(rng, 3, 0.0), sample_vector(3, rng, 1.0)),
                                LinearFamily(fld, m, mats), DirectIntegralOperator(fld, std::move(atoms)));
      for (int i = 0; i < 1000; ++i) {
        const Vector z = sample_vector(m, rng);
        const Vector w = sample_vector(m, rng);
        worst = std::min(worst, (z - w).dot(composite_apply(p, z) - composite_apply(p, w)));
      }
    }
    return Outcome{worst >= -1e-10, "min <z-w, Mz-Mw> = " + num(worst)};
  });

  run(9, "solver matches the linear-solve oracle on the quadratic suite", 0, [] {
    bool ok = true;
    std::string detail;
    for (const auto& inst : quadratic_suite()) {
      SolverConfig cfg;
      cfg.max_iters = 5000;
      cfg.tol = 1e-10;
      const auto start = Clock::now();
      const auto [pt, rep] = fbf_solve(inst.problem, cfg);
      const double secs = std::chrono::duration<double>(Clock::now() - start).count();
      const double err = (pt.z - oracle::quad_solve(inst.data)).norm();
      const bool good = err <= 1e-6 && secs < 1.0;
      ok = ok && good;
      detail += inst.name + " err=" + num(err) + " it=" + std::to_string(rep.iterations) + "; ";
    }
    return Outcome{ok, detail};
  });

  run(10, "primal and dual residuals at convergence", 0, [] {
    double worst = 0.0;
    std::vector<PrimalDualProblem> problems;
    for (const auto& inst : quadratic_suite()) problems.push_back(inst.problem);
    for (const auto& name : {"split_common_zero", "stochastic_feasibility"}) problems.push_back(build_problem(demo_config(name)));
    bool converged = true;
    for (const auto& p : problems) {
      SolverConfig cfg;
      cfg.tol = 1e-8;
      const auto [pt, rep] = fbf_solve(p, cfg);
      converged = converged && rep.status == SolveStatus::converged;
      const auto ex = extract_solutions(p, pt);
      worst = std::max({worst, ex.primal_residual, ex.dual_residual});
    }
    return Outcome{converged && worst <= 1e-7, "max residual = " + num(worst)};
  });

  run(11, "split common zero demo reaches both intervals", 0, [] {
    const SolveOutcome out = run_solve(demo_config("split_common_zero"));
    double worst = 0.0;
    for (double d : out.set_distances) worst = std::max(worst, d);
    return Outcome{out.report.status == SolveStatus::converged && worst <= 1e-4,
                   "z = " + format_vector(out.point.z) + ", max set distance = " + num(worst)};
  });

  run(12, "resolvent and prox ignore the weights bitwise", 0, [] {
    std::mt19937_64 rng(1212);
    const auto op = random_operator_family(rng, 8);
    const auto f = function_library({});
    bool same = true;
    for (int r = 0; r < 5; ++r) {
      const auto op2 = op.with_field(op.field().reweighted(random_weights(rng, op.field().count())));
      const auto f2 = f.with_field(f.field().reweighted(random_weights(rng, f.field().count())));
      for (int i = 0; i < 100; ++i) {
        const auto x = sample_block_vector(op.field(), rng);
        const auto y = sample_block_vector(f.field(), rng);
        same = same && di_resolvent(op, 0.9, x) == di_resolvent(op2, 0.9, x) && di_prox(f, 0.9, y) == di_prox(f2, 0.9, y);
      }
    }
    return Outcome{same, same ? "identical outputs across 5 rescalings" : "outputs differ"};
  });

  run(13, "recession estimator", 0, [] {
    std::mt19937_64 rng(1313);
    RecessionOptions numeric;
    numeric.use_analytic = false;
    // |.| and indicator atoms against their analytic recession functions
    const std::vector<ConvexAtom> atoms = {l1_norm(1),
                                           l1_norm(2),
                                           indicator(box_set(vec({-1}), vec({1}))),
                                           indicator(halfspace_set(vec({1, 1}), 1.0)),
                                           indicator(nonnegative_orthant(2)),
                                           indicator(ball_set(vec({0}), 1.0))};
    double worst = 0.0;
    bool inf_match = true;
    for (const auto& a : atoms) {
      const DirectIntegralFunction f(make_field({1.0}, {a.dim()}), {a});
      for (int i = 0; i < 20; ++i) {
        Vector d = sample_vector(a.dim(), rng, 3.0);
        if (i % 4 == 0) d = -d.cwiseAbs();  // recession directions of the halfspace
        if (i % 4 == 1) d = d.cwiseAbs();   // and of the orthant
        const BlockVector x({d});
        const double est = recession_estimate(f, x, numeric).value;
        const double exact = a.recession(d);
        if (std::isinf(exact) || std::isinf(est)) {
          inf_match = inf_match && std::isinf(exact) && std::isinf(est);
        } else {
          worst = std::max(worst, std::abs(est - exact));
        }
      }
    }
    // strongly convex quadratics diverge at every nonzero direction
    bool diverges = true;
    Matrix q(2, 2);
    q << 2, 0.5, 0.5, 1;
    const DirectIntegralFunction quad(make_field({1.0, 2.0}, {1, 2}),
                                      {quadratic(scalar_mat(1.0), vec({0.3})), quadratic(q, vec({1, -1}))});
    for (int i = 0; i < 20; ++i) {
      const auto x = sample_block_vector(quad.field(), rng);
      diverges = diverges && recession_estimate(quad, x, numeric).diverged;
    }
    return Outcome{worst <= 1e-6 && inf_match && diverges,
                   "max |estimate - exact| = " + num(worst) + ", infinite values match: " + (inf_match ? "yes" : "no") +
                       ", quadratic divergence flagged: " + (diverges ? "yes" : "no")};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "SOME FAILED", failures);
  return failures == 0 ? 0 : 1;
}
