#pragma once

// JSON problem configurations, assembly of library objects from them, the
// calculus dispatcher behind `dint calc`, and solver report files.
//
// Config layout (atom parameters are flat numeric arrays, matrices row-major):
//
//   {
//     "name":   "closed_form_quadratic",
//     "space":  {"weights": [1.0]},
//     "field":  {"dims": [1]},
//     "atoms":  {"operators": [{"name": "affine", "params": [1, 0]}],
//                "functions": [{"name": "abs", "params": []}],
//                "sets":      [{"name": "box", "params": [-1, 1]}]},
//     "linear": {"source_dim": 1, "matrices": [[[1]]]},
//     "W":      {"name": "affine", "params": [1, -1]},
//     "solver": {"max_iters": 100000, "tol": 1e-8}
//   }
//
// Composite atoms ("normal_cone", "subdifferential", "yosida", "indicator")
// carry their argument atom under "inner".

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dint/errors.hpp"
#include "dint/functions.hpp"
#include "dint/inclusion_solver.hpp"
#include "dint/linear_family.hpp"
#include "dint/operators.hpp"

namespace dint {

/// Invalid configuration; `path()` is a JSON pointer to the offending entry.
class ConfigError : public StructuralError {
 public:
  ConfigError(std::string path, const std::string& what)
      : StructuralError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct AtomDesc {
  std::string name;
  std::vector<double> params;
  std::vector<AtomDesc> inner;  // zero or one entry

  bool operator==(const AtomDesc&) const = default;
};

struct LinearDesc {
  std::size_t source_dim = 0;
  /// matrices[k][row][col]
  std::vector<std::vector<std::vector<double>>> matrices;

  bool operator==(const LinearDesc&) const = default;
};

struct SolverSettings {
  std::optional<double> gamma;
  std::size_t max_iters = 100000;
  double tol = 1e-8;
  std::optional<std::vector<double>> start_z;
  std::optional<std::vector<double>> start_xstar;  // flat over the field

  bool operator==(const SolverSettings&) const = default;
};

struct ProblemConfig {
  std::string name;
  std::vector<double> weights;
  std::vector<std::size_t> dims;
  std::vector<AtomDesc> operators;
  std::vector<AtomDesc> functions;
  std::vector<AtomDesc> sets;
  std::optional<LinearDesc> linear;
  std::optional<AtomDesc> w;
  SolverSettings solver;

  bool operator==(const ProblemConfig&) const = default;
};

/// Parses and validates; every atom is built once to check its parameters.
ProblemConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const ProblemConfig& config);
ProblemConfig load_config(const std::filesystem::path& path);
void save_config(const ProblemConfig& config, const std::filesystem::path& path);

MonotoneAtom build_operator(const AtomDesc& desc, std::size_t dim, const std::string& path = "");
ConvexAtom build_function(const AtomDesc& desc, std::size_t dim, const std::string& path = "");
ConvexSetAtom build_set(const AtomDesc& desc, std::size_t dim, const std::string& path = "");

HilbertField build_field(const ProblemConfig& config);
LinearFamily build_linear(const ProblemConfig& config);
DirectIntegralOperator build_operators(const ProblemConfig& config);
DirectIntegralFunction build_functions(const ProblemConfig& config);
DirectIntegralSet build_sets(const ProblemConfig& config);
PrimalDualProblem build_problem(const ProblemConfig& config);
SolverConfig build_solver_config(const ProblemConfig& config);

/// Names of the bundled demo problems.
std::vector<std::string> demo_names();
ProblemConfig demo_config(const std::string& name);

struct SolveOutcome {
  KKTPoint point;
  SolveReport report;
  /// Distance of L_k z to C_k when the config lists sets.
  std::vector<double> set_distances;
};

SolveOutcome run_solve(const ProblemConfig& config);
int exit_code(SolveStatus status);

/// Evaluates one calculus operation and returns its printed form.
/// Operations: prox, envelope, conjugate, project, mixture, recession.
std::string run_calc(const ProblemConfig& config, const std::string& op, const std::vector<double>& input,
                     double gamma = 1.0);

std::string format_real(double v);
std::string format_vector(const Vector& v);
std::string format_blocks(const BlockVector& x);
/// Parses "1,2,3" (surrounding parentheses and blanks allowed).
std::vector<double> parse_numbers(const std::string& text);

/// Residual trace as comma-separated rows under a '#'-prefixed summary.
void emit_report(const SolveOutcome& outcome, const std::filesystem::path& path);
/// Summary JSON with the primal-dual point.
void emit_summary(const SolveOutcome& outcome, const std::filesystem::path& path);

struct TraceFile {
  std::vector<std::string> header;  // summary lines without the leading '#'
  std::vector<TraceRow> rows;
};

TraceFile read_report(const std::filesystem::path& path);

}  // namespace dint
