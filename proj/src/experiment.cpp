#include "aniso/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "aniso/analysis.hpp"
#include "aniso/models.hpp"
#include "aniso/svg_plot.hpp"

namespace aniso {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& get(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(child(key), "missing required field");
    return j_.at(key);
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  double number(const std::string& key) { return as_number(get(key), child(key)); }
  double number_or(const std::string& key, double def) {
    const json* v = find(key);
    return v ? as_number(*v, child(key)) : def;
  }
  int integer(const std::string& key) { return as_int(get(key), child(key)); }
  int integer_or(const std::string& key, int def) {
    const json* v = find(key);
    return v ? as_int(*v, child(key)) : def;
  }
  std::string string(const std::string& key) { return as_string(get(key), child(key)); }
  std::string string_or(const std::string& key, const std::string& def) {
    const json* v = find(key);
    return v ? as_string(*v, child(key)) : def;
  }
  bool boolean_or(const std::string& key, bool def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(child(key), "expected true or false");
    return v->get<bool>();
  }

  std::string child(const std::string& key) const { return path_ + "/" + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(child(it.key()), "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config " + (path.empty() ? std::string("/") : path) + ": " + what);
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }
  static int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }
  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Study parse_study(const std::string& s, const std::string& path) {
  if (s == "solve") return Study::Solve;
  if (s == "convergence") return Study::Convergence;
  if (s == "interface-scan") return Study::InterfaceScan;
  if (s == "conditioning") return Study::Conditioning;
  if (s == "efficiency") return Study::Efficiency;
  if (s == "theorem-fits") return Study::TheoremFits;
  ObjectReader::fail(path, "unknown study '" + s +
                               "' (solve, convergence, interface-scan, conditioning, "
                               "efficiency, theorem-fits)");
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) ObjectReader::fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(ObjectReader::as_number(v[i], path + "/" + std::to_string(i)));
  }
  return out;
}

EpsConfig parse_eps(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  EpsConfig e;
  e.profile = r.string_or("profile", "tanh");
  if (e.profile == "tanh") {
    e.eps_min = r.number_or("eps_min", e.eps_min);
    e.eps_max = r.number_or("eps_max", e.eps_max);
    e.r = r.number_or("r", e.r);
  } else if (e.profile == "constant") {
    e.value = r.number("value");
  } else {
    ObjectReader::fail(r.child("profile"), "expected \"tanh\" or \"constant\"");
  }
  r.finish();
  try {
    (void)e.make();
  } catch (const std::invalid_argument& ex) {
    ObjectReader::fail(path, ex.what());
  }
  return e;
}

SetupConfig parse_setup(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SetupConfig s;
  s.name = r.string_or("name", "a");
  if (s.name != "a" && s.name != "b" && s.name != "zero-fluct" && s.name != "zero") {
    ObjectReader::fail(r.child("name"), "unknown setup '" + s.name + "' (a, b, zero-fluct, zero)");
  }
  if (const json* d = r.find("domain")) {
    if (d->is_string()) {
      s.domain_preset = d->get<std::string>();
      if (s.domain_preset != "a" && s.domain_preset != "b") {
        ObjectReader::fail(r.child("domain"), "unknown preset '" + s.domain_preset + "' (a, b)");
      }
    } else {
      ObjectReader dr(*d, r.child("domain"));
      Domain dom{dr.number("x_minus"), dr.number("x_plus"), dr.number("z_minus"),
                 dr.number("z_plus")};
      dr.finish();
      try {
        dom.validate();
      } catch (const std::invalid_argument& ex) {
        ObjectReader::fail(r.child("domain"), ex.what());
      }
      s.domain = dom;
    }
  }
  if (const json* e = r.find("eps")) s.eps = parse_eps(*e, r.child("eps"));
  if (const json* c = r.find("c1")) s.c1 = ObjectReader::as_number(*c, r.child("c1"));
  if (const json* c = r.find("c2")) s.c2 = ObjectReader::as_number(*c, r.child("c2"));
  r.finish();
  return s;
}

InterfaceSpec parse_interface(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  InterfaceSpec s;
  if (const json* v = r.find("iota")) s.iota = ObjectReader::as_int(*v, r.child("iota"));
  if (const json* v = r.find("eps_target")) {
    s.eps_target = ObjectReader::as_number(*v, r.child("eps_target"));
  }
  if (const json* v = r.find("omega1_fraction")) {
    s.omega1_fraction = ObjectReader::as_number(*v, r.child("omega1_fraction"));
    if (!(*s.omega1_fraction > 0.0 && *s.omega1_fraction < 1.0)) {
      ObjectReader::fail(r.child("omega1_fraction"), "must lie in (0, 1)");
    }
  }
  r.finish();
  const int n = int(s.iota.has_value()) + int(s.eps_target.has_value()) +
                int(s.omega1_fraction.has_value());
  if (n != 1) ObjectReader::fail(path, "give exactly one of iota, eps_target, omega1_fraction");
  return s;
}

std::string fmt_real(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void run_parallel(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

ResultRow base_row(const ExperimentConfig& cfg, const std::string& model, const TensorMesh& mesh,
                   const ManufacturedProblem& problem) {
  ResultRow r;
  r.study = to_string(cfg.study);
  r.setup = cfg.setup.name;
  r.model = model;
  r.nx = mesh.nx();
  r.nz = mesh.nz();
  r.eps_iota = kNaN;
  r.eps_min = problem.eps.eps_min();
  r.eps_max = problem.eps.eps_max();
  r.cond_estimate = r.rel_l2 = r.rel_h1 = r.residual = kNaN;
  r.constraint_residual = r.xi_dx = r.xi_dz = r.ess_distance = kNaN;
  return r;
}

void fill_from_solution(ResultRow& row, const SolutionField& sol,
                        const ManufacturedProblem& problem) {
  const ErrorReport e = error_norms(sol, problem);
  row.rows = sol.report.rows;
  row.nnz = static_cast<long long>(sol.report.nnz);
  row.factor_nnz = static_cast<long long>(sol.report.factor_nnz);
  row.cond_estimate = sol.report.cond1;
  row.rel_l2 = e.rel_l2;
  row.rel_h1 = e.rel_h1;
  row.residual = sol.report.residual;
  if (sol.kind == ModelKind::AP || sol.kind == ModelKind::APL) {
    row.constraint_residual = sol.constraint_residual;
  }
  if (sol.split) {
    row.iota = sol.split->iota;
    row.eps_iota = problem.eps(sol.split->z_iota);
  }
  row.status = sol.report.breakdown ? "breakdown" : "ok";
  row.assemble_seconds = sol.report.assemble_seconds;
  row.factorize_seconds = sol.report.factorize_seconds;
  row.solve_seconds = sol.report.solve_seconds;
}

// One model solve at one parameter point. Failures become "failed" rows.
ResultRow solve_row(const ExperimentConfig& cfg, ModelKind kind, const TensorMesh& mesh,
                    const ManufacturedProblem& problem, std::optional<int> iota, bool required) {
  ResultRow row = base_row(cfg, to_string(kind), mesh, problem);
  row.required = required;
  try {
    std::optional<SubdomainSplit> split;
    if (kind == ModelKind::APL) {
      split = split_at_interface(mesh, iota.value());
      row.iota = split->iota;
      row.eps_iota = problem.eps(split->z_iota);
    }
    SolveOptions opts;
    opts.quad_order = cfg.quad_order;
    const SolutionField sol =
        solve_model(kind, mesh, split ? &*split : nullptr, problem, opts);
    fill_from_solution(row, sol, problem);
  } catch (const std::exception& ex) {
    row.status = "failed";
    std::cerr << "aniso-hybrid: " << row.model << " at " << mesh.nx() << "x" << mesh.nz()
              << " failed: " << ex.what() << '\n';
  }
  return row;
}

std::vector<ModelKind> model_list(const ExperimentConfig& cfg) {
  std::vector<ModelKind> out;
  for (const auto& m : cfg.models) out.push_back(parse_model_kind(m));
  return out;
}

std::vector<int> sweep_interfaces(const ExperimentConfig& cfg, const TensorMesh& mesh,
                                  const EpsProfile& eps) {
  if (cfg.eps_targets.empty()) {
    return {cfg.interface.resolve(mesh, eps)};
  }
  return interfaces_for_eps_targets(mesh, eps, cfg.eps_targets);
}

std::string mesh_label(const ResultRow& r) {
  return std::to_string(r.nx + 1) + "x" + std::to_string(r.nz + 1) + " cells";
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  f << text;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["study"] = to_string(cfg.study);
  json s;
  s["name"] = cfg.setup.name;
  if (cfg.setup.domain) {
    const Domain& d = *cfg.setup.domain;
    s["domain"] = {{"x_minus", d.x_minus}, {"x_plus", d.x_plus}, {"z_minus", d.z_minus},
                   {"z_plus", d.z_plus}};
  } else {
    s["domain"] = cfg.setup.domain_preset;
  }
  if (cfg.setup.eps.profile == "tanh") {
    s["eps"] = {{"profile", "tanh"},
                {"eps_min", cfg.setup.eps.eps_min},
                {"eps_max", cfg.setup.eps.eps_max},
                {"r", cfg.setup.eps.r}};
  } else {
    s["eps"] = {{"profile", "constant"}, {"value", cfg.setup.eps.value}};
  }
  if (cfg.setup.c1) s["c1"] = *cfg.setup.c1;
  if (cfg.setup.c2) s["c2"] = *cfg.setup.c2;
  j["setup"] = s;
  json meshes = json::array();
  for (const MeshSpec& m : cfg.meshes) meshes.push_back({{"nx", m.nx}, {"nz", m.nz}});
  j["meshes"] = meshes;
  j["models"] = cfg.models;
  json itf = json::object();
  if (cfg.interface.iota) itf["iota"] = *cfg.interface.iota;
  if (cfg.interface.eps_target) itf["eps_target"] = *cfg.interface.eps_target;
  if (cfg.interface.omega1_fraction) itf["omega1_fraction"] = *cfg.interface.omega1_fraction;
  j["interface"] = itf;
  if (!cfg.eps_min_sweep.empty()) j["eps_min_sweep"] = cfg.eps_min_sweep;
  if (!cfg.eps_targets.empty()) j["eps_targets"] = cfg.eps_targets;
  j["quad_order"] = cfg.quad_order;
  j["plateau_tol"] = cfg.plateau_tol;
  j["plots"] = cfg.plots;
  return j;
}

bool needs_interface(const ExperimentConfig& cfg) {
  if (cfg.study == Study::InterfaceScan || cfg.study == Study::TheoremFits) {
    return cfg.eps_targets.empty();
  }
  return std::find_if(cfg.models.begin(), cfg.models.end(), [](const std::string& m) {
           return parse_model_kind(m) == ModelKind::APL;
         }) != cfg.models.end();
}

}  // namespace

std::string to_string(Study s) {
  switch (s) {
    case Study::Solve: return "solve";
    case Study::Convergence: return "convergence";
    case Study::InterfaceScan: return "interface-scan";
    case Study::Conditioning: return "conditioning";
    case Study::Efficiency: return "efficiency";
    case Study::TheoremFits: return "theorem-fits";
  }
  return "?";
}

EpsProfile EpsConfig::make(double eps_min_override) const {
  if (profile == "constant") {
    return EpsProfile::constant(eps_min_override > 0.0 ? eps_min_override : value);
  }
  return EpsProfile::tanh(eps_min_override > 0.0 ? eps_min_override : eps_min, eps_max, r);
}

Domain SetupConfig::resolved_domain() const {
  if (domain) return *domain;
  return domain_preset == "a" ? Domain::preset_a() : Domain::preset_b();
}

ManufacturedProblem SetupConfig::make(double eps_min_override) const {
  const Domain d = resolved_domain();
  const EpsProfile e = eps.make(eps_min_override);
  const double cc1 = c1.value_or(d.lz());
  const double cc2 = c2.value_or(d.lz());
  if (name == "a") return setup_a(d, e, cc1, cc2);
  if (name == "b") return setup_b(d, e, cc1, cc2);
  if (name == "zero-fluct") return setup_zero_fluctuation(d, e);
  return setup_zero_data(d, e);
}

int InterfaceSpec::resolve(const TensorMesh& mesh, const EpsProfile& eps) const {
  if (iota) return *iota;
  if (eps_target) {
    return find_interface_for_eps(mesh, [&eps](double z) { return eps(z); }, *eps_target);
  }
  if (omega1_fraction) return interface_for_omega1_fraction(mesh, *omega1_fraction);
  throw std::invalid_argument("interface is not specified");
}

std::string InterfaceSpec::describe() const {
  if (iota) return "iota=" + std::to_string(*iota);
  if (eps_target) return "eps_target=" + fmt_real(*eps_target);
  if (omega1_fraction) return "omega1_fraction=" + fmt_real(*omega1_fraction);
  return "unset";
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < ex.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + ex.what());
  }

  ObjectReader r(j, "");
  ExperimentConfig cfg;
  cfg.study = parse_study(r.string("study"), "/study");
  if (const json* s = r.find("setup")) cfg.setup = parse_setup(*s, "/setup");

  const json& meshes = r.get("meshes");
  if (!meshes.is_array() || meshes.empty()) {
    ObjectReader::fail("/meshes", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const std::string p = "/meshes/" + std::to_string(i);
    ObjectReader m(meshes[i], p);
    MeshSpec spec;
    if (m.has("cells")) {
      const int c = m.integer("cells");
      spec.nx = spec.nz = c - 1;
    } else {
      spec.nx = m.integer("nx");
      spec.nz = m.integer("nz");
    }
    m.finish();
    if (spec.nx < 1 || spec.nz < 1) ObjectReader::fail(p, "need at least one interior node");
    cfg.meshes.push_back(spec);
  }

  if (const json* m = r.find("models")) {
    if (!m->is_array() || m->empty()) ObjectReader::fail("/models", "expected a non-empty array");
    for (std::size_t i = 0; i < m->size(); ++i) {
      const std::string p = "/models/" + std::to_string(i);
      const std::string name = ObjectReader::as_string((*m)[i], p);
      try {
        (void)parse_model_kind(name);
      } catch (const std::invalid_argument& ex) {
        ObjectReader::fail(p, ex.what());
      }
      cfg.models.push_back(name);
    }
  } else {
    switch (cfg.study) {
      case Study::InterfaceScan: cfg.models = {"apl"}; break;
      case Study::TheoremFits: cfg.models = {"ap", "apl"}; break;
      default: cfg.models = {"p", "ap", "apl"};
    }
  }

  if (const json* v = r.find("interface")) cfg.interface = parse_interface(*v, "/interface");
  if (const json* v = r.find("eps_min_sweep")) cfg.eps_min_sweep = number_list(*v, "/eps_min_sweep");
  if (const json* v = r.find("eps_targets")) cfg.eps_targets = number_list(*v, "/eps_targets");
  cfg.quad_order = r.integer_or("quad_order", 3);
  if (cfg.quad_order < 1 || cfg.quad_order > 5) ObjectReader::fail("/quad_order", "must be 1..5");
  cfg.plateau_tol = r.number_or("plateau_tol", 0.10);
  if (!(cfg.plateau_tol >= 0.0)) ObjectReader::fail("/plateau_tol", "must be non-negative");
  cfg.plots = r.boolean_or("plots", true);
  r.finish();

  if (cfg.study == Study::Conditioning && cfg.eps_min_sweep.empty()) {
    ObjectReader::fail("/eps_min_sweep", "conditioning study needs a non-empty sweep");
  }
  if ((cfg.study == Study::InterfaceScan || cfg.study == Study::TheoremFits) &&
      cfg.eps_targets.size() < 2) {
    ObjectReader::fail("/eps_targets", "this study needs at least two eps targets");
  }
  const bool has_interface = cfg.interface.iota || cfg.interface.eps_target ||
                             cfg.interface.omega1_fraction;
  if (needs_interface(cfg) && !has_interface) {
    ObjectReader::fail("/interface", "required when the APL model is requested");
  }
  try {
    (void)cfg.setup.make();
  } catch (const std::invalid_argument& ex) {
    ObjectReader::fail("/setup", ex.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

int default_thread_count() {
  if (const char* env = std::getenv("ANISO_HYBRID_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<std::string> result_columns() {
  return {"study",    "setup",    "model",   "nx",     "nz",         "iota",
          "eps_iota", "eps_min",  "eps_max", "rows",   "nnz",        "factor_nnz",
          "cond_estimate", "rel_l2", "rel_h1", "residual", "constraint_residual",
          "xi_dx",    "xi_dz",    "ess_distance", "status"};
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  const auto cols = result_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const ResultRow& r : rows) {
    const bool solved = r.status != "failed";
    os << csv_field(r.study) << ',' << csv_field(r.setup) << ',' << r.model << ',' << r.nx << ','
       << r.nz << ',' << (r.iota >= 0 ? std::to_string(r.iota) : "") << ','
       << fmt_real(r.eps_iota) << ',' << fmt_real(r.eps_min) << ',' << fmt_real(r.eps_max) << ','
       << (solved ? std::to_string(r.rows) : "") << ','
       << (solved ? std::to_string(r.nnz) : "") << ','
       << (solved ? std::to_string(r.factor_nnz) : "") << ',' << fmt_real(r.cond_estimate)
       << ',' << fmt_real(r.rel_l2) << ',' << fmt_real(r.rel_h1) << ',' << fmt_real(r.residual)
       << ',' << fmt_real(r.constraint_residual) << ',' << fmt_real(r.xi_dx) << ','
       << fmt_real(r.xi_dz) << ',' << fmt_real(r.ess_distance) << ',' << r.status << '\n';
  }
}

void write_timings_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "study,model,nx,nz,iota,eps_min,assemble_seconds,factorize_seconds,solve_seconds\n";
  for (const ResultRow& r : rows) {
    os << r.study << ',' << r.model << ',' << r.nx << ',' << r.nz << ','
       << (r.iota >= 0 ? std::to_string(r.iota) : "") << ',' << fmt_real(r.eps_min) << ','
       << fmt_real(r.assemble_seconds) << ',' << fmt_real(r.factorize_seconds) << ','
       << fmt_real(r.solve_seconds) << '\n';
  }
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  namespace fs = std::filesystem;
  const fs::path out(opts.out_dir);
  fs::create_directories(out);

  // Each task yields one or more rows; tasks run in any order but rows are
  // stored by task index, so the CSV order is the configuration order.
  std::vector<std::function<std::vector<ResultRow>()>> tasks;
  const std::vector<ModelKind> models = model_list(cfg);

  switch (cfg.study) {
    case Study::Solve:
    case Study::Convergence:
    case Study::Efficiency:
      for (const MeshSpec& ms : cfg.meshes) {
        for (ModelKind kind : models) {
          tasks.emplace_back([&cfg, ms, kind]() -> std::vector<ResultRow> {
            const TensorMesh mesh(cfg.setup.resolved_domain(), ms.nx, ms.nz);
            const ManufacturedProblem problem = cfg.setup.make();
            std::optional<int> iota;
            if (kind == ModelKind::APL) iota = cfg.interface.resolve(mesh, problem.eps);
            return {solve_row(cfg, kind, mesh, problem, iota, true)};
          });
        }
      }
      break;

    case Study::Conditioning:
      for (const MeshSpec& ms : cfg.meshes) {
        for (double em : cfg.eps_min_sweep) {
          for (ModelKind kind : models) {
            tasks.emplace_back([&cfg, ms, kind, em]() -> std::vector<ResultRow> {
              const TensorMesh mesh(cfg.setup.resolved_domain(), ms.nx, ms.nz);
              const ManufacturedProblem problem = cfg.setup.make(em);
              std::optional<int> iota;
              if (kind == ModelKind::APL) iota = cfg.interface.resolve(mesh, problem.eps);
              // The P model is expected to break down at small eps_min.
              return {solve_row(cfg, kind, mesh, problem, iota, kind != ModelKind::P)};
            });
          }
        }
      }
      break;

    case Study::InterfaceScan:
      for (const MeshSpec& ms : cfg.meshes) {
        const TensorMesh mesh(cfg.setup.resolved_domain(), ms.nx, ms.nz);
        for (int iota : sweep_interfaces(cfg, mesh, cfg.setup.eps.make())) {
          tasks.emplace_back([&cfg, ms, iota]() -> std::vector<ResultRow> {
            const TensorMesh mesh(cfg.setup.resolved_domain(), ms.nx, ms.nz);
            const ManufacturedProblem problem = cfg.setup.make();
            return {solve_row(cfg, ModelKind::APL, mesh, problem, iota, true)};
          });
        }
      }
      break;

    case Study::TheoremFits:
      for (const MeshSpec& ms : cfg.meshes) {
        tasks.emplace_back([&cfg, ms]() -> std::vector<ResultRow> {
          const TensorMesh mesh(cfg.setup.resolved_domain(), ms.nx, ms.nz);
          const ManufacturedProblem problem = cfg.setup.make();
          std::vector<ResultRow> rows;
          ResultRow ap_row = base_row(cfg, "AP", mesh, problem);
          SolveOptions so;
          so.quad_order = cfg.quad_order;
          std::optional<SolutionField> ap;
          try {
            ap = solve_model(ModelKind::AP, mesh, nullptr, problem, so);
            fill_from_solution(ap_row, *ap, problem);
          } catch (const std::exception& ex) {
            ap_row.status = "failed";
            std::cerr << "aniso-hybrid: AP reference failed: " << ex.what() << '\n';
          }
          rows.push_back(ap_row);
          if (!ap) return rows;
          for (int iota : sweep_interfaces(cfg, mesh, problem.eps)) {
            ResultRow row = base_row(cfg, "APL", mesh, problem);
            try {
              const SubdomainSplit split = split_at_interface(mesh, iota);
              const SolutionField apl = solve_model(ModelKind::APL, mesh, &split, problem, so);
              fill_from_solution(row, apl, problem);
              const SeminormPair xi = xi2_seminorms(mesh, split, derive_xi2(*ap, split));
              row.xi_dx = xi.dx;
              row.xi_dz = xi.dz;
              row.ess_distance = ess_distance(*ap, apl, split);
            } catch (const std::exception& ex) {
              row.status = "failed";
              std::cerr << "aniso-hybrid: APL at iota=" << iota << " failed: " << ex.what()
                        << '\n';
            }
            rows.push_back(row);
          }
          return rows;
        });
      }
      break;
  }

  std::vector<std::vector<ResultRow>> per_task(tasks.size());
  run_parallel(tasks.size(), opts.threads, [&](std::size_t i) { per_task[i] = tasks[i](); });

  RunResult result;
  for (auto& rows : per_task) {
    for (auto& r : rows) {
      if (r.status == "failed" && r.required) result.success = false;
      result.rows.push_back(std::move(r));
    }
  }

  {
    std::ofstream f(out / "results.csv");
    if (!f) throw std::runtime_error("cannot write results.csv in '" + opts.out_dir + "'");
    write_results_csv(f, result.rows);
  }
  {
    std::ofstream f(out / "timings.csv");
    write_timings_csv(f, result.rows);
  }

  json echo = config_to_json(cfg);
  echo["threads"] = opts.threads;
  if (opts.seed) echo["seed"] = *opts.seed;
  write_text(out / "config-echo.json", echo.dump(2) + "\n");

  // Study summaries and plots.
  json summary;
  summary["study"] = to_string(cfg.study);
  summary["success"] = result.success;
  std::map<std::string, std::vector<const ResultRow*>> by_model;
  std::map<int, std::vector<const ResultRow*>> by_mesh;
  for (const ResultRow& r : result.rows) {
    by_model[r.model].push_back(&r);
    by_mesh[r.nx].push_back(&r);
  }
  const bool plots = cfg.plots;

  if (cfg.study == Study::Convergence || cfg.study == Study::Solve ||
      cfg.study == Study::Efficiency) {
    std::vector<PlotSeries> series;
    for (const auto& [model, rows] : by_model) {
      PlotSeries s{model, {}, {}};
      std::vector<std::pair<double, double>> pts_h1, pts_l2;
      for (const ResultRow* r : rows) {
        if (r->status == "failed") continue;
        const TensorMesh mesh(cfg.setup.resolved_domain(), r->nx, r->nz);
        pts_h1.emplace_back(mesh.h(), r->rel_h1);
        pts_l2.emplace_back(mesh.h(), r->rel_l2);
        s.x.push_back(mesh.h());
        s.y.push_back(r->rel_h1);
      }
      if (cfg.study == Study::Convergence) {
        try {
          summary["eoc_h1"][model] = eoc(pts_h1);
          summary["eoc_l2"][model] = eoc(pts_l2);
        } catch (const std::invalid_argument&) {
          summary["eoc_h1"][model] = nullptr;
          summary["eoc_l2"][model] = nullptr;
        }
      }
      series.push_back(std::move(s));
    }
    if (plots && cfg.study == Study::Convergence) {
      write_svg((out / "convergence.svg").string(),
                {"Relative H1 error", "h = sqrt(dx dz)", "relative H1 error"}, series);
    }
  }

  if (cfg.study == Study::Conditioning) {
    std::vector<PlotSeries> cond, err;
    for (const auto& [model, rows] : by_model) {
      PlotSeries c{model, {}, {}}, e{model, {}, {}};
      for (const ResultRow* r : rows) {
        if (r->status == "failed") continue;
        c.x.push_back(r->eps_min);
        c.y.push_back(r->cond_estimate);
        e.x.push_back(r->eps_min);
        e.y.push_back(r->rel_l2);
      }
      if (!c.y.empty()) {
        const auto [lo, hi] = std::minmax_element(c.y.begin(), c.y.end());
        const auto [elo, ehi] = std::minmax_element(e.y.begin(), e.y.end());
        summary["cond_orders_of_magnitude"][model] = std::log10(*hi / *lo);
        summary["error_ratio_max_over_min"][model] = *ehi / *elo;
      }
      cond.push_back(std::move(c));
      err.push_back(std::move(e));
    }
    if (plots) {
      write_svg((out / "conditioning-cond.svg").string(),
                {"Condition estimate", "eps_min", "cond_1 (equilibrated)"}, cond);
      write_svg((out / "conditioning-error.svg").string(),
                {"Relative L2 error", "eps_min", "relative L2 error"}, err);
    }
  }

  if (cfg.study == Study::InterfaceScan) {
    std::vector<PlotSeries> series;
    json per_mesh = json::array();
    for (const auto& [nx, rows] : by_mesh) {
      std::vector<ScanPoint> pts;
      PlotSeries s{mesh_label(*rows.front()), {}, {}};
      for (const ResultRow* r : rows) {
        if (r->status == "failed") continue;
        pts.push_back({r->iota, r->eps_iota, r->rel_h1, r->rel_l2});
      }
      if (pts.empty()) continue;
      const ScanResult sr = select_eps_star(pts, cfg.plateau_tol);
      for (const ScanPoint& p : sr.points) {
        s.x.push_back(p.eps_iota);
        s.y.push_back(p.rel_h1);
      }
      per_mesh.push_back({{"nx", rows.front()->nx},
                          {"nz", rows.front()->nz},
                          {"eps_star", sr.eps_star},
                          {"iota_star", sr.iota_star},
                          {"min_error", sr.min_error},
                          {"plateau_reached", sr.plateau_reached}});
      series.push_back(std::move(s));
    }
    summary["meshes"] = per_mesh;
    std::vector<double> stars;
    for (const json& m : per_mesh) stars.push_back(m["eps_star"].get<double>());
    // by_mesh is keyed on nx, so this is refinement order
    summary["eps_star_non_increasing"] = non_increasing(stars, 0.0);
    if (plots) {
      write_svg((out / "interface-scan.svg").string(),
                {"APL error against interface anisotropy", "eps(z_iota)", "relative H1 error"},
                series);
    }
  }

  if (cfg.study == Study::TheoremFits) {
    json per_mesh = json::array();
    std::vector<PlotSeries> series;
    for (const auto& [nx, rows] : by_mesh) {
      std::vector<double> e, dx, dz, d;
      for (const ResultRow* r : rows) {
        if (r->model != "APL" || r->status == "failed") continue;
        e.push_back(r->eps_iota);
        dx.push_back(r->xi_dx);
        dz.push_back(r->xi_dz);
        d.push_back(r->ess_distance);
      }
      json m = {{"nx", rows.front()->nx}, {"nz", rows.front()->nz}};
      try {
        m["slope_xi_dx"] = loglog_slope(e, dx);
        m["slope_xi_dz"] = loglog_slope(e, dz);
        m["slope_ess_distance"] = loglog_slope(e, d);
      } catch (const std::invalid_argument& ex) {
        m["error"] = ex.what();
      }
      per_mesh.push_back(m);
      const std::string label = mesh_label(*rows.front());
      series.push_back({"xi dx, " + label, e, dx});
      series.push_back({"xi dz, " + label, e, dz});
      series.push_back({"ESS distance, " + label, e, d});
    }
    summary["meshes"] = per_mesh;
    if (plots) {
      write_svg((out / "theorem-fits.svg").string(),
                {"Lifted fluctuation and AP/APL distance", "eps(z_iota)", "norm"}, series);
    }
  }

  result.summary_json = summary.dump(2) + "\n";
  write_text(out / "summary.json", result.summary_json);
  return result;
}

}  // namespace aniso
