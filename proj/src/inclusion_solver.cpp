#include "dint/inclusion_solver.hpp"

#include <cmath>

#include "detail.hpp"
#include "dint/errors.hpp"

namespace dint {

PrimalDualProblem::PrimalDualProblem(MonotoneAtom w, LinearFamily family, DirectIntegralOperator a)
    : w_(std::move(w)), family_(std::move(family)), a_(std::move(a)) {
  if (w_.dim() != family_.source_dim()) {
    throw StructuralError("problem: W acts on dimension " + std::to_string(w_.dim()) + " but the family has source " +
                          std::to_string(family_.source_dim()));
  }
  if (!(a_.field() == family_.field())) throw StructuralError("problem: operator family and linear family fields differ");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iters:
      return "max_iters";
    case SolveStatus::diverged:
      return "diverged";
  }
  return "unknown";
}

namespace {

void require_point(const PrimalDualProblem& problem, const Vector& z, const BlockVector& xstar) {
  if (static_cast<std::size_t>(z.size()) != problem.dim() || !z.allFinite()) {
    throw StructuralError("primal point must be a finite vector of dimension " + std::to_string(problem.dim()));
  }
  require_conforming(problem.field(), xstar, "x*");
}

}  // namespace

Vector composite_apply(const PrimalDualProblem& problem, const Vector& z) {
  if (!problem.w().has_forward()) throw CapabilityError("composite_apply: W has no forward map");
  const BlockVector image = di_forward(problem.a(), apply(problem.family(), z));
  return problem.w().forward(z) + adjoint(problem.family(), image);
}

double kkt_residual(const PrimalDualProblem& problem, const KKTPoint& point, double gamma) {
  detail::require_gamma(gamma);
  require_point(problem, point.z, point.xstar);
  const HilbertField& field = problem.field();
  const Vector r1 = point.z - problem.w().resolvent(gamma, point.z - gamma * adjoint(problem.family(), point.xstar));
  const BlockVector u = apply(problem.family(), point.z);
  const BlockVector r2 = subtract(u, di_resolvent(problem.a(), gamma, add(u, scale(gamma, point.xstar))));
  return std::sqrt(r1.squaredNorm() + inner_product(field, r2, r2));
}

std::pair<KKTPoint, SolveReport> fbf_solve(const PrimalDualProblem& problem, const SolverConfig& config) {
  if (!(config.tol >= 0.0)) throw PreconditionError("fbf_solve: tolerance must be nonnegative");
  const LinearFamily& family = problem.family();
  const double l_norm = norm_estimate(family, 500, config.seed);
  const double gamma = config.gamma ? *config.gamma : 0.9 / std::max(l_norm, 1e-12);
  detail::require_gamma(gamma);
  if (gamma * l_norm >= 1.0) {
    throw PreconditionError("fbf_solve: step " + std::to_string(gamma) + " must be below 1/||L|| = " +
                            std::to_string(1.0 / l_norm));
  }

  KKTPoint point;
  if (config.start) {
    point = *config.start;
    require_point(problem, point.z, point.xstar);
  } else {
    point.z = Vector::Zero(static_cast<Eigen::Index>(problem.dim()));
    point.xstar = BlockVector::zeros(problem.field());
  }

  SolveReport report;
  report.step = gamma;
  double residual = kkt_residual(problem, point, config.residual_gamma);
  const double initial = residual;
  report.status = SolveStatus::max_iters;

  while (true) {
    if (residual <= config.tol) {
      report.status = SolveStatus::converged;
      break;
    }
    if (report.iterations >= config.max_iters) break;

    // Forward step on Q, backward step on M = W x A^{-1}, forward correction.
    const BlockVector lz = apply(family, point.z);
    const Vector q_z = adjoint(family, point.xstar);
    const Vector y_z = problem.w().resolvent(gamma, point.z - gamma * q_z);
    const BlockVector y_x = inverse_resolvent(problem.a(), gamma, add(point.xstar, scale(gamma, lz)));
    const BlockVector ly = apply(family, y_z);
    point.z = y_z - gamma * (adjoint(family, y_x) - q_z);
    point.xstar = add(y_x, scale(gamma, subtract(ly, lz)));
    ++report.iterations;

    residual = kkt_residual(problem, point, config.residual_gamma);
    if (config.record_trace) {
      const ExtractionReport ex = extract_solutions(problem, point);
      report.trace.push_back({report.iterations, residual, ex.primal_residual, ex.dual_residual});
    }
    if (!std::isfinite(residual) || residual > config.divergence_factor * initial) {
      report.status = SolveStatus::diverged;
      break;
    }
  }

  report.kkt_residual = residual;
  const ExtractionReport ex = extract_solutions(problem, point);
  report.primal_residual = ex.primal_residual;
  report.dual_residual = ex.dual_residual;
  return {std::move(point), std::move(report)};
}

ExtractionReport extract_solutions(const PrimalDualProblem& problem, const KKTPoint& point) {
  require_point(problem, point.z, point.xstar);
  const HilbertField& field = problem.field();
  const MonotoneAtom& w = problem.w();
  const Vector lstar = adjoint(problem.family(), point.xstar);
  const BlockVector u = apply(problem.family(), point.z);

  ExtractionReport out;
  // Primal: z solves 0 in W z + L* x* with the certificate x* in A(L z).
  const Vector a = point.z - w.resolvent(1.0, point.z - lstar);
  const BlockVector b = subtract(u, di_resolvent(problem.a(), 1.0, add(u, point.xstar)));
  out.primal_residual = std::sqrt(a.squaredNorm() + inner_product(field, b, b));

  // Dual: v = -L* x* with z in W^{-1} v, and L z in A^{-1} x*, checked with
  // J_{W^{-1}} = Id - J_W and J_{A^{-1}} = Id - J_A.
  const Vector v = -lstar;
  const Vector shifted = v + point.z;
  const Vector a_dual = v - (shifted - w.resolvent(1.0, shifted));
  const BlockVector b_dual = subtract(point.xstar, inverse_resolvent(problem.a(), add(point.xstar, u)));
  out.dual_residual = std::sqrt(a_dual.squaredNorm() + inner_product(field, b_dual, b_dual));
  return out;
}

double saddle_residual(const PrimalDualProblem& problem, const Vector& z, const BlockVector& x,
                       const BlockVector& ustar) {
  require_point(problem, z, ustar);
  const HilbertField& field = problem.field();
  require_conforming(field, x, "x");
  const Vector first = z - problem.w().resolvent(1.0, z - adjoint(problem.family(), ustar));
  const BlockVector second = subtract(x, di_resolvent(problem.a(), 1.0, add(x, ustar)));
  const BlockVector third = subtract(x, apply(problem.family(), z));
  return std::sqrt(first.squaredNorm() + inner_product(field, second, second) + inner_product(field, third, third));
}

}  // namespace dint
