#include "dint/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dint {

using nlohmann::json;

namespace {

// --- json helpers ------------------------------------------------------------

const json& require_key(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + "/" + key, "missing entry");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

std::size_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(path, "expected a nonnegative integer");
  const auto v = j.get<long long>();
  if (v < 0) throw ConfigError(path, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::vector<double> as_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "/" + std::to_string(i)));
  return out;
}

AtomDesc parse_atom(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an atom object");
  AtomDesc desc;
  const json& name = require_key(j, "name", path);
  if (!name.is_string()) throw ConfigError(path + "/name", "expected a string");
  desc.name = name.get<std::string>();
  if (const auto it = j.find("params"); it != j.end()) desc.params = as_numbers(*it, path + "/params");
  if (const auto it = j.find("inner"); it != j.end()) desc.inner.push_back(parse_atom(*it, path + "/inner"));
  return desc;
}

std::vector<AtomDesc> parse_atom_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of atoms");
  std::vector<AtomDesc> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_atom(j[i], path + "/" + std::to_string(i)));
  return out;
}

json atom_to_json(const AtomDesc& desc) {
  json j = {{"name", desc.name}, {"params", desc.params}};
  if (!desc.inner.empty()) j["inner"] = atom_to_json(desc.inner.front());
  return j;
}

// --- atom construction -------------------------------------------------------

void expect_params(const AtomDesc& desc, std::size_t count, const std::string& path) {
  if (desc.params.size() != count) {
    throw ConfigError(path + "/params", "'" + desc.name + "' expects " + std::to_string(count) + " parameters, got " +
                                            std::to_string(desc.params.size()));
  }
}

const AtomDesc& expect_inner(const AtomDesc& desc, const std::string& path) {
  if (desc.inner.size() != 1) throw ConfigError(path + "/inner", "'" + desc.name + "' needs an inner atom");
  return desc.inner.front();
}

Vector slice(const std::vector<double>& params, std::size_t offset, std::size_t count) {
  return Eigen::Map<const Vector>(params.data() + offset, static_cast<Eigen::Index>(count));
}

Matrix square(const std::vector<double>& params, std::size_t offset, std::size_t d) {
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = params[offset + r * d + c];
  }
  return m;
}

// Library constructors report invalid parameters as StructuralError; tag
// them with the config path.
template <class F>
auto with_path(const std::string& path, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const StructuralError& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

ConvexSetAtom build_set(const AtomDesc& desc, std::size_t d, const std::string& path) {
  const auto& p = desc.params;
  return with_path(path, [&]() -> ConvexSetAtom {
    if (desc.name == "box") {
      expect_params(desc, 2 * d, path);
      return box_set(slice(p, 0, d), slice(p, d, d));
    }
    if (desc.name == "ball") {
      expect_params(desc, d + 1, path);
      return ball_set(slice(p, 0, d), p[d]);
    }
    if (desc.name == "halfspace") {
      expect_params(desc, d + 1, path);
      return halfspace_set(slice(p, 0, d), p[d]);
    }
    if (desc.name == "nonnegative") {
      expect_params(desc, 0, path);
      return nonnegative_orthant(d);
    }
    if (desc.name == "singleton") {
      expect_params(desc, d, path);
      return singleton_set(slice(p, 0, d));
    }
    if (desc.name == "affine") {
      if (p.empty() || p[0] < 1 || p[0] != std::floor(p[0])) {
        throw ConfigError(path + "/params/0", "'affine' starts with the number of constraint rows");
      }
      const auto rows = static_cast<std::size_t>(p[0]);
      expect_params(desc, 1 + rows * d + rows, path);
      Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < d; ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = p[1 + r * d + c];
      }
      return affine_set(a, slice(p, 1 + rows * d, rows));
    }
    throw ConfigError(path + "/name", "unknown set '" + desc.name + "'");
  });
}

ConvexAtom build_function(const AtomDesc& desc, std::size_t d, const std::string& path) {
  const auto& p = desc.params;
  return with_path(path, [&]() -> ConvexAtom {
    if (desc.name == "zero") {
      expect_params(desc, 0, path);
      return zero_function(d);
    }
    if (desc.name == "quadratic") {
      expect_params(desc, d * d + d, path);
      return quadratic(square(p, 0, d), slice(p, d * d, d));
    }
    if (desc.name == "abs") {
      expect_params(desc, 0, path);
      if (d != 1) throw ConfigError(path + "/name", "'abs' acts on dimension 1; use 'l1'");
      return l1_norm(1);
    }
    if (desc.name == "l1") {
      expect_params(desc, 0, path);
      return l1_norm(d);
    }
    if (desc.name == "l2") {
      expect_params(desc, 0, path);
      return l2_norm(d);
    }
    if (desc.name == "linear") {
      expect_params(desc, d, path);
      return linear_function(slice(p, 0, d));
    }
    if (desc.name == "support_box") {
      expect_params(desc, 2 * d, path);
      return box_support(slice(p, 0, d), slice(p, d, d));
    }
    if (desc.name == "indicator") {
      expect_params(desc, 0, path);
      return indicator(build_set(expect_inner(desc, path), d, path + "/inner"));
    }
    throw ConfigError(path + "/name", "unknown function '" + desc.name + "'");
  });
}

MonotoneAtom build_operator(const AtomDesc& desc, std::size_t d, const std::string& path) {
  const auto& p = desc.params;
  return with_path(path, [&]() -> MonotoneAtom {
    if (desc.name == "zero") {
      expect_params(desc, 0, path);
      return zero_operator(d);
    }
    if (desc.name == "scaled_identity") {
      expect_params(desc, 1, path);
      return scaled_identity(d, p[0]);
    }
    if (desc.name == "affine") {
      expect_params(desc, d * d + d, path);
      return affine_operator(square(p, 0, d), slice(p, d * d, d));
    }
    if (desc.name == "scalar_power") {
      expect_params(desc, 2, path);
      if (d != 1) throw ConfigError(path + "/name", "'scalar_power' acts on dimension 1");
      return scalar_power(p[0], p[1]);
    }
    if (desc.name == "normal_cone") {
      expect_params(desc, 0, path);
      return normal_cone(build_set(expect_inner(desc, path), d, path + "/inner"));
    }
    if (desc.name == "subdifferential") {
      expect_params(desc, 0, path);
      return subdifferential(build_function(expect_inner(desc, path), d, path + "/inner"));
    }
    if (desc.name == "yosida") {
      expect_params(desc, 1, path);
      if (!(p[0] > 0.0)) throw ConfigError(path + "/params/0", "'yosida' parameter must be positive");
      return yosida_atom(build_operator(expect_inner(desc, path), d, path + "/inner"), p[0]);
    }
    throw ConfigError(path + "/name", "unknown operator '" + desc.name + "'");
  });
}

HilbertField build_field(const ProblemConfig& config) {
  const AtomicMeasureSpace space = with_path("/space/weights", [&] { return AtomicMeasureSpace(config.weights); });
  return with_path("/field/dims", [&] { return HilbertField(space, config.dims); });
}

LinearFamily build_linear(const ProblemConfig& config) {
  if (!config.linear) throw ConfigError("/linear", "missing entry");
  const HilbertField field = build_field(config);
  const LinearDesc& desc = *config.linear;
  if (desc.source_dim == 0) throw ConfigError("/linear/source_dim", "must be positive");
  if (desc.matrices.size() != field.count()) {
    throw ConfigError("/linear/matrices", "expected one matrix per atom (" + std::to_string(field.count()) + ")");
  }
  std::vector<Matrix> mats;
  for (std::size_t k = 0; k < desc.matrices.size(); ++k) {
    const std::string path = "/linear/matrices/" + std::to_string(k);
    const auto& rows = desc.matrices[k];
    if (rows.size() != field.dim(k)) throw ConfigError(path, "expected " + std::to_string(field.dim(k)) + " rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(desc.source_dim));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != desc.source_dim) {
        throw ConfigError(path + "/" + std::to_string(r), "expected " + std::to_string(desc.source_dim) + " columns");
      }
      for (std::size_t c = 0; c < desc.source_dim; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    mats.push_back(std::move(m));
  }
  return with_path("/linear", [&] { return LinearFamily(field, desc.source_dim, std::move(mats)); });
}

DirectIntegralOperator build_operators(const ProblemConfig& config) {
  const HilbertField field = build_field(config);
  if (config.operators.size() != field.count()) {
    throw ConfigError("/atoms/operators", "expected one operator per atom (" + std::to_string(field.count()) + ")");
  }
  std::vector<MonotoneAtom> atoms;
  for (std::size_t k = 0; k < field.count(); ++k) {
    atoms.push_back(build_operator(config.operators[k], field.dim(k), "/atoms/operators/" + std::to_string(k)));
  }
  return DirectIntegralOperator(field, std::move(atoms));
}

DirectIntegralFunction build_functions(const ProblemConfig& config) {
  const HilbertField field = build_field(config);
  if (config.functions.size() != field.count()) {
    throw ConfigError("/atoms/functions", "expected one function per atom (" + std::to_string(field.count()) + ")");
  }
  std::vector<ConvexAtom> atoms;
  for (std::size_t k = 0; k < field.count(); ++k) {
    atoms.push_back(build_function(config.functions[k], field.dim(k), "/atoms/functions/" + std::to_string(k)));
  }
  return DirectIntegralFunction(field, std::move(atoms));
}

DirectIntegralSet build_sets(const ProblemConfig& config) {
  const HilbertField field = build_field(config);
  if (config.sets.size() != field.count()) {
    throw ConfigError("/atoms/sets", "expected one set per atom (" + std::to_string(field.count()) + ")");
  }
  std::vector<ConvexSetAtom> atoms;
  for (std::size_t k = 0; k < field.count(); ++k) {
    atoms.push_back(build_set(config.sets[k], field.dim(k), "/atoms/sets/" + std::to_string(k)));
  }
  return DirectIntegralSet(field, std::move(atoms));
}

PrimalDualProblem build_problem(const ProblemConfig& config) {
  if (!config.w) throw ConfigError("/W", "missing entry");
  LinearFamily family = build_linear(config);
  MonotoneAtom w = build_operator(*config.w, family.source_dim(), "/W");
  return PrimalDualProblem(std::move(w), std::move(family), build_operators(config));
}

SolverConfig build_solver_config(const ProblemConfig& config) {
  SolverConfig out;
  out.gamma = config.solver.gamma;
  out.max_iters = config.solver.max_iters;
  out.tol = config.solver.tol;
  if (config.solver.start_z || config.solver.start_xstar) {
    const HilbertField field = build_field(config);
    const std::size_t m = config.linear ? config.linear->source_dim : 0;
    KKTPoint start;
    start.z = Vector::Zero(static_cast<Eigen::Index>(m));
    start.xstar = BlockVector::zeros(field);
    if (config.solver.start_z) {
      if (config.solver.start_z->size() != m) throw ConfigError("/solver/start/z", "expected " + std::to_string(m) + " entries");
      start.z = slice(*config.solver.start_z, 0, m);
    }
    if (config.solver.start_xstar) {
      start.xstar = with_path("/solver/start/xstar", [&] { return BlockVector::from_flat(field, *config.solver.start_xstar); });
    }
    out.start = std::move(start);
  }
  return out;
}

ProblemConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  ProblemConfig cfg;
  if (const auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw ConfigError("/name", "expected a string");
    cfg.name = it->get<std::string>();
  }
  cfg.weights = as_numbers(require_key(require_key(doc, "space", ""), "weights", "/space"), "/space/weights");
  const json& dims = require_key(require_key(doc, "field", ""), "dims", "/field");
  if (!dims.is_array()) throw ConfigError("/field/dims", "expected an array of integers");
  for (std::size_t i = 0; i < dims.size(); ++i) cfg.dims.push_back(as_count(dims[i], "/field/dims/" + std::to_string(i)));

  if (const auto atoms = doc.find("atoms"); atoms != doc.end()) {
    if (!atoms->is_object()) throw ConfigError("/atoms", "expected an object");
    if (const auto it = atoms->find("operators"); it != atoms->end()) cfg.operators = parse_atom_list(*it, "/atoms/operators");
    if (const auto it = atoms->find("functions"); it != atoms->end()) cfg.functions = parse_atom_list(*it, "/atoms/functions");
    if (const auto it = atoms->find("sets"); it != atoms->end()) cfg.sets = parse_atom_list(*it, "/atoms/sets");
  }

  if (const auto lin = doc.find("linear"); lin != doc.end()) {
    LinearDesc desc;
    desc.source_dim = as_count(require_key(*lin, "source_dim", "/linear"), "/linear/source_dim");
    const json& mats = require_key(*lin, "matrices", "/linear");
    if (!mats.is_array()) throw ConfigError("/linear/matrices", "expected an array of matrices");
    for (std::size_t k = 0; k < mats.size(); ++k) {
      const std::string path = "/linear/matrices/" + std::to_string(k);
      if (!mats[k].is_array()) throw ConfigError(path, "expected an array of rows");
      std::vector<std::vector<double>> rows;
      for (std::size_t r = 0; r < mats[k].size(); ++r) rows.push_back(as_numbers(mats[k][r], path + "/" + std::to_string(r)));
      desc.matrices.push_back(std::move(rows));
    }
    cfg.linear = std::move(desc);
  }
  if (const auto w = doc.find("W"); w != doc.end()) cfg.w = parse_atom(*w, "/W");

  if (const auto s = doc.find("solver"); s != doc.end()) {
    if (!s->is_object()) throw ConfigError("/solver", "expected an object");
    if (const auto it = s->find("gamma"); it != s->end()) {
      cfg.solver.gamma = as_number(*it, "/solver/gamma");
      if (!(*cfg.solver.gamma > 0.0)) throw ConfigError("/solver/gamma", "must be positive");
    }
    if (const auto it = s->find("max_iters"); it != s->end()) cfg.solver.max_iters = as_count(*it, "/solver/max_iters");
    if (const auto it = s->find("tol"); it != s->end()) {
      cfg.solver.tol = as_number(*it, "/solver/tol");
      if (cfg.solver.tol < 0.0) throw ConfigError("/solver/tol", "must be nonnegative");
    }
    if (const auto start = s->find("start"); start != s->end()) {
      if (const auto it = start->find("z"); it != start->end()) cfg.solver.start_z = as_numbers(*it, "/solver/start/z");
      if (const auto it = start->find("xstar"); it != start->end()) {
        cfg.solver.start_xstar = as_numbers(*it, "/solver/start/xstar");
      }
    }
  }

  // Validation: build everything that is present.
  const HilbertField field = build_field(cfg);
  if (!cfg.operators.empty()) build_operators(cfg);
  if (!cfg.functions.empty()) build_functions(cfg);
  if (!cfg.sets.empty()) build_sets(cfg);
  if (cfg.linear) build_linear(cfg);
  if (cfg.w) {
    if (!cfg.linear) throw ConfigError("/linear", "W requires a linear family to fix the dimension of G");
    build_operator(*cfg.w, cfg.linear->source_dim, "/W");
  }
  build_solver_config(cfg);
  return cfg;
}

json to_json(const ProblemConfig& config) {
  json doc;
  doc["name"] = config.name;
  doc["space"] = {{"weights", config.weights}};
  doc["field"] = {{"dims", config.dims}};
  json atoms = json::object();
  auto list = [](const std::vector<AtomDesc>& descs) {
    json arr = json::array();
    for (const auto& s : descs) arr.push_back(atom_to_json(s));
    return arr;
  };
  if (!config.operators.empty()) atoms["operators"] = list(config.operators);
  if (!config.functions.empty()) atoms["functions"] = list(config.functions);
  if (!config.sets.empty()) atoms["sets"] = list(config.sets);
  doc["atoms"] = atoms;
  if (config.linear) doc["linear"] = {{"source_dim", config.linear->source_dim}, {"matrices", config.linear->matrices}};
  if (config.w) doc["W"] = atom_to_json(*config.w);
  json solver = {{"max_iters", config.solver.max_iters}, {"tol", config.solver.tol}};
  if (config.solver.gamma) solver["gamma"] = *config.solver.gamma;
  if (config.solver.start_z || config.solver.start_xstar) {
    json start = json::object();
    if (config.solver.start_z) start["z"] = *config.solver.start_z;
    if (config.solver.start_xstar) start["xstar"] = *config.solver.start_xstar;
    solver["start"] = start;
  }
  doc["solver"] = solver;
  return doc;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  ProblemConfig cfg = parse_config(doc);
  if (cfg.name.empty()) cfg.name = path.stem().string();
  return cfg;
}

void save_config(const ProblemConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(config).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

// --- demos -------------------------------------------------------------------

std::vector<std::string> demo_names() {
  return {"closed_form_quadratic", "split_common_zero", "stochastic_feasibility"};
}

namespace {

AtomDesc atom(std::string name, std::vector<double> params = {}, std::optional<AtomDesc> inner = std::nullopt) {
  AtomDesc s{std::move(name), std::move(params), {}};
  if (inner) s.inner.push_back(std::move(*inner));
  return s;
}

LinearDesc identity_matrices(std::size_t m, std::size_t count) {
  LinearDesc desc;
  desc.source_dim = m;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<std::vector<double>> rows(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) rows[i][i] = 1.0;
    desc.matrices.push_back(std::move(rows));
  }
  return desc;
}

// Operator A_k = Yosida approximation (parameter 1) of the normal cone of a box.
AtomDesc relaxed_box(std::vector<double> lo_hi) {
  return atom("yosida", {1.0}, atom("normal_cone", {}, atom("box", std::move(lo_hi))));
}

}  // namespace

ProblemConfig demo_config(const std::string& name) {
  ProblemConfig cfg;
  cfg.name = name;
  if (name == "closed_form_quadratic") {
    // 0 = (z - 1) + z, solution z = 1/2 with multiplier x* = 1/2.
    cfg.weights = {1.0};
    cfg.dims = {1};
    cfg.operators = {atom("affine", {1.0, 0.0})};
    cfg.functions = {atom("abs")};
    cfg.sets = {atom("box", {-1.0, 1.0})};
    cfg.linear = identity_matrices(1, 1);
    cfg.w = atom("affine", {1.0, -1.0});
  } else if (name == "split_common_zero") {
    // Find z with L_k z in C_k, C_1 = [0, 2], C_2 = [1, 3], through the
    // Yosida-relaxed normal cones; the solutions are [1, 2].
    cfg.weights = {0.5, 0.5};
    cfg.dims = {1, 1};
    cfg.operators = {relaxed_box({0.0, 2.0}), relaxed_box({1.0, 3.0})};
    cfg.functions = {atom("indicator", {}, atom("box", {0.0, 2.0})), atom("indicator", {}, atom("box", {1.0, 3.0}))};
    cfg.sets = {atom("box", {0.0, 2.0}), atom("box", {1.0, 3.0})};
    cfg.linear = identity_matrices(1, 2);
    cfg.w = atom("zero");
  } else if (name == "stochastic_feasibility") {
    // Probability measure over three boxes in R^2 meeting in [1, 1.5]^2.
    cfg.weights = {0.2, 0.3, 0.5};
    cfg.dims = {2, 2, 2};
    const std::vector<std::vector<double>> boxes = {
        {0.0, 0.0, 2.0, 2.0}, {1.0, -1.0, 3.0, 1.5}, {0.5, 1.0, 1.5, 4.0}};
    for (const auto& b : boxes) {
      cfg.operators.push_back(relaxed_box(b));
      cfg.functions.push_back(atom("indicator", {}, atom("box", b)));
      cfg.sets.push_back(atom("box", b));
    }
    cfg.linear = identity_matrices(2, 3);
    cfg.w = atom("zero");
    cfg.solver.start_z = std::vector<double>{4.0, -2.0};
  } else {
    throw ConfigError("/name", "unknown demo '" + name + "'");
  }
  return cfg;
}

// --- solve -------------------------------------------------------------------

SolveOutcome run_solve(const ProblemConfig& config) {
  const PrimalDualProblem problem = build_problem(config);
  auto [point, report] = fbf_solve(problem, build_solver_config(config));
  SolveOutcome out{std::move(point), std::move(report), {}};
  if (!config.sets.empty()) {
    const DirectIntegralSet sets = build_sets(config);
    const BlockVector u = apply(problem.family(), out.point.z);
    const BlockVector p = project(sets, u);
    for (std::size_t k = 0; k < u.size(); ++k) out.set_distances.push_back((u[k] - p[k]).norm());
  }
  return out;
}

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged:
      return 0;
    case SolveStatus::max_iters:
      return 2;
    case SolveStatus::diverged:
      return 3;
  }
  return 3;
}

// --- calc --------------------------------------------------------------------

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_vector(const Vector& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_real(v(i));
  }
  return out + ")";
}

std::string format_blocks(const BlockVector& x) {
  std::string out = "(";
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k > 0) out += ',';
    out += format_vector(x[k]);
  }
  return out + ")";
}

std::vector<double> parse_numbers(const std::string& text) {
  std::string cleaned;
  for (const char c : text) cleaned += (c == '(' || c == ')' || c == '[' || c == ']') ? ',' : c;
  std::vector<double> out;
  std::stringstream ss(cleaned);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = token.find_last_not_of(" \t");
    token = token.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw StructuralError("cannot parse number '" + token + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::string run_calc(const ProblemConfig& config, const std::string& op, const std::vector<double>& input,
                     double gamma) {
  const HilbertField field = build_field(config);
  auto blocks = [&] { return BlockVector::from_flat(field, input); };
  // A single-atom field prints its only block unnested.
  auto format_blocks = [&](const BlockVector& x) { return field.count() == 1 ? format_vector(x[0]) : dint::format_blocks(x); };
  if (op == "prox") return format_blocks(di_prox(build_functions(config), gamma, blocks()));
  if (op == "envelope") return format_real(di_envelope(build_functions(config), gamma, blocks()));
  if (op == "conjugate") return format_real(di_conjugate(build_functions(config), blocks()).value);
  if (op == "project") return format_blocks(project(build_sets(config), blocks()));
  if (op == "recession") {
    const RecessionValue r = recession_estimate(build_functions(config), blocks());
    return format_real(r.value);
  }
  if (op == "mixture") {
    const LinearFamily family = build_linear(config);
    if (input.size() != family.source_dim()) {
      throw StructuralError("mixture input must have " + std::to_string(family.source_dim()) + " entries");
    }
    const Vector z = slice(input, 0, input.size());
    return format_vector(prox_mixture(build_functions(config), family, z));
  }
  throw CapabilityError("unknown calc operation '" + op + "'");
}

// --- reports -----------------------------------------------------------------

void emit_report(const SolveOutcome& outcome, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report " + path.string());
  const SolveReport& r = outcome.report;
  out << "# status=" << to_string(r.status) << '\n';
  out << "# iterations=" << r.iterations << '\n';
  out << "# step=" << format_real(r.step) << '\n';
  out << "# kkt_residual=" << format_real(r.kkt_residual) << '\n';
  out << "# primal_residual=" << format_real(r.primal_residual) << '\n';
  out << "# dual_residual=" << format_real(r.dual_residual) << '\n';
  out << "# z=" << format_vector(outcome.point.z) << '\n';
  if (!outcome.set_distances.empty()) {
    out << "# set_distances="
        << format_vector(Eigen::Map<const Vector>(outcome.set_distances.data(),
                                                  static_cast<Eigen::Index>(outcome.set_distances.size())))
        << '\n';
  }
  out << "iteration,kkt_residual,primal_residual,dual_residual\n";
  for (const TraceRow& row : r.trace) {
    out << row.iteration << ',' << format_real(row.kkt_residual) << ',' << format_real(row.primal_residual) << ','
        << format_real(row.dual_residual) << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed writing report " + path.string());
}

void emit_summary(const SolveOutcome& outcome, const std::filesystem::path& path) {
  const SolveReport& r = outcome.report;
  json xstar = json::array();
  for (const auto& b : outcome.point.xstar.blocks()) xstar.push_back(std::vector<double>(b.data(), b.data() + b.size()));
  const json doc = {
      {"status", to_string(r.status)},
      {"iterations", r.iterations},
      {"step", r.step},
      {"kkt_residual", r.kkt_residual},
      {"primal_residual", r.primal_residual},
      {"dual_residual", r.dual_residual},
      {"z", std::vector<double>(outcome.point.z.data(), outcome.point.z.data() + outcome.point.z.size())},
      {"xstar", xstar},
      {"set_distances", outcome.set_distances},
  };
  std::ofstream out(path);
  if (!out) throw IoError("cannot write summary " + path.string());
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing summary " + path.string());
}

TraceFile read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read report " + path.string());
  TraceFile file;
  std::string line;
  bool seen_columns = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      file.header.push_back(line.substr(line.find_first_not_of("# ") == std::string::npos ? line.size()
                                                                                           : line.find_first_not_of("# ")));
      continue;
    }
    if (!seen_columns) {
      if (line != "iteration,kkt_residual,primal_residual,dual_residual") {
        throw StructuralError("report line " + std::to_string(lineno) + ": unexpected column header");
      }
      seen_columns = true;
      continue;
    }
    const std::vector<double> v = parse_numbers(line);
    if (v.size() != 4) throw StructuralError("report line " + std::to_string(lineno) + ": expected 4 columns");
    file.rows.push_back({static_cast<std::size_t>(v[0]), v[1], v[2], v[3]});
  }
  if (!seen_columns) throw StructuralError("report has no column header");
  return file;
}

}  // namespace dint
