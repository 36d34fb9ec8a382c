// dint: solve / calc / report / generate front end.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dint/config.hpp"

namespace fs = std::filesystem;

namespace {

int fail(int code, const std::string& message) {
  std::cerr << "dint: " << message << '\n';
  return code;
}

int cmd_solve(const std::string& config_path, const std::string& out_dir) {
  const dint::ProblemConfig config = dint::load_config(config_path);
  const dint::SolveOutcome outcome = dint::run_solve(config);
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  const std::string stem = config.name.empty() ? "run" : config.name;
  dint::emit_report(outcome, dir / (stem + ".trace.csv"));
  dint::emit_summary(outcome, dir / (stem + ".report.json"));

  const dint::SolveReport& r = outcome.report;
  std::cout << "status " << dint::to_string(r.status) << '\n'
            << "iterations " << r.iterations << '\n'
            << "kkt_residual " << dint::format_real(r.kkt_residual) << '\n'
            << "z " << dint::format_vector(outcome.point.z) << '\n';
  if (!outcome.set_distances.empty()) {
    double worst = 0.0;
    for (double d : outcome.set_distances) worst = std::max(worst, d);
    std::cout << "max_set_distance " << dint::format_real(worst) << '\n';
  }
  return dint::exit_code(r.status);
}

int cmd_report(const std::string& path) {
  const dint::TraceFile file = dint::read_report(path);
  for (const auto& line : file.header) std::cout << line << '\n';
  std::cout << "rows " << file.rows.size() << '\n';
  if (!file.rows.empty()) {
    const auto& last = file.rows.back();
    std::cout << "last " << last.iteration << ' ' << dint::format_real(last.kkt_residual) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct integrals of monotone operators and convex functions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* solve = app.add_subcommand("solve", "Run the primal-dual solver on a config");
  solve->add_option("config", config_path, "Problem config (JSON)")->required();
  solve->add_option("--out", out_dir, "Directory for the trace table and summary");

  std::string op;
  std::string input;
  double gamma = 1.0;
  auto* calc = app.add_subcommand("calc", "Evaluate one direct-integral operation");
  calc->add_option("config", config_path, "Problem config (JSON)")->required();
  calc->add_option("--op", op, "prox | envelope | conjugate | project | mixture | recession")->required();
  calc->add_option("--input", input, "Comma-separated input, flattened over atoms")->required();
  calc->add_option("--gamma", gamma, "Scale parameter");

  std::string report_path;
  auto* report = app.add_subcommand("report", "Summarize a trace table written by solve");
  report->add_option("path", report_path, "Trace file")->required();

  std::string demo;
  std::string demo_out;
  bool list = false;
  auto* generate = app.add_subcommand("generate", "Write a bundled demo config");
  generate->add_option("demo", demo, "Demo name");
  generate->add_option("--out", demo_out, "Output file (stdout if omitted)");
  generate->add_flag("--list", list, "List demo names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(config_path, out_dir);
    if (*calc) {
      const dint::ProblemConfig config = dint::load_config(config_path);
      std::cout << dint::run_calc(config, op, dint::parse_numbers(input), gamma) << '\n';
      return 0;
    }
    if (*report) return cmd_report(report_path);
    if (*generate) {
      if (list || demo.empty()) {
        for (const auto& n : dint::demo_names()) std::cout << n << '\n';
        return 0;
      }
      const dint::ProblemConfig config = dint::demo_config(demo);
      if (demo_out.empty()) {
        std::cout << dint::to_json(config).dump(2) << '\n';
      } else {
        dint::save_config(config, demo_out);
      }
      return 0;
    }
  } catch (const dint::IoError& e) {
    return fail(4, e.what());
  } catch (const dint::Error& e) {
    return fail(1, e.what());
  } catch (const std::exception& e) {
    return fail(1, e.what());
  }
  return 1;
}
