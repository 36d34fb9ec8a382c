#pragma once

// Integral composite inclusions
//
//     find z in R^m with 0 in W z + sum_k alpha_k L_k^T A_k(L_k z),
//
// together with the dual problem in x* in H, solved through the
// Kuhn-Tucker operator on G (+) H
//
//     K(z, x*) = (W z + L* x*) x (-L z + A^{-1} x*).
//
// K = M + Q with M = W x A^{-1} maximally monotone (blockwise resolvents)
// and Q(z, x*) = (L* x*, -L z) skew and bounded, which is the structure
// required by Tseng's forward-backward-forward splitting.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dint/linear_family.hpp"
#include "dint/operators.hpp"

namespace dint {

class PrimalDualProblem {
 public:
  PrimalDualProblem(MonotoneAtom w, LinearFamily family, DirectIntegralOperator a);

  std::size_t dim() const { return family_.source_dim(); }
  const MonotoneAtom& w() const { return w_; }
  const LinearFamily& family() const { return family_; }
  const DirectIntegralOperator& a() const { return a_; }
  const HilbertField& field() const { return family_.field(); }

 private:
  MonotoneAtom w_;
  LinearFamily family_;
  DirectIntegralOperator a_;
};

struct KKTPoint {
  Vector z;
  BlockVector xstar;
};

enum class SolveStatus { converged, max_iters, diverged };

const char* to_string(SolveStatus status);

struct TraceRow {
  std::size_t iteration = 0;
  double kkt_residual = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

struct SolveReport {
  std::size_t iterations = 0;
  double step = 0.0;
  double kkt_residual = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  std::vector<TraceRow> trace;
  SolveStatus status = SolveStatus::max_iters;
};

struct SolverConfig {
  std::optional<double> gamma;  // default 0.9 / ||L||
  std::size_t max_iters = 100000;
  double tol = 1e-8;
  std::optional<KKTPoint> start;
  /// Parameter of the resolvents inside kkt_residual used as the stopping test.
  double residual_gamma = 1.0;
  /// Residual above this multiple of the initial one means divergence.
  double divergence_factor = 1e6;
  std::uint64_t seed = 0;
  bool record_trace = true;
};

/// W z + sum_k alpha_k L_k^T A_k(L_k z) for single-valued W and A_k.
Vector composite_apply(const PrimalDualProblem& problem, const Vector& z);

/// Fixed-point defect of the optimality system at (z, x*):
/// r1 = ||z - J_{gW}(z - g L* x*)||, r2 = ||L z - J_{gA}(L z + g x*)||_H,
/// combined as sqrt(r1^2 + r2^2). Zero iff (z, x*) is a zero of K.
double kkt_residual(const PrimalDualProblem& problem, const KKTPoint& point, double gamma = 1.0);

std::pair<KKTPoint, SolveReport> fbf_solve(const PrimalDualProblem& problem, const SolverConfig& config = {});

struct ExtractionReport {
  /// Defect of 0 in W z + L* x* with x* in A(L z), via J_W and J_A.
  double primal_residual = 0.0;
  /// Defect of -L* x* in W z and x* in A(L z) seen from the dual side,
  /// via J_{W^{-1}} and J_{A^{-1}}.
  double dual_residual = 0.0;
};

ExtractionReport extract_solutions(const PrimalDualProblem& problem, const KKTPoint& point);

/// Defect of (z, x, u*) as a zero of the saddle operator
/// (W z + L* u*) x (A x - u*) x (x - L z).
double saddle_residual(const PrimalDualProblem& problem, const Vector& z, const BlockVector& x,
                       const BlockVector& ustar);

}  // namespace dint
