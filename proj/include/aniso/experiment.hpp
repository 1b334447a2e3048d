#pragma once

#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <vector>

#include "aniso/mesh.hpp"
#include "aniso/problem.hpp"

namespace aniso {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Study { Solve, Convergence, InterfaceScan, Conditioning, Efficiency, TheoremFits };

std::string to_string(Study s);

struct EpsConfig {
  std::string profile = "tanh";  ///< "tanh" or "constant"
  double eps_min = 1e-8;
  double eps_max = 1.0;
  double r = 30.0;
  double value = 1.0;  ///< constant profile only

  EpsProfile make(double eps_min_override = 0.0) const;
};

struct SetupConfig {
  std::string name = "a";  ///< "a", "b", "zero-fluct" or "zero"
  std::string domain_preset = "b";
  std::optional<Domain> domain;  ///< explicit bounds win over the preset
  EpsConfig eps;
  std::optional<double> c1;
  std::optional<double> c2;

  Domain resolved_domain() const;
  ManufacturedProblem make(double eps_min_override = 0.0) const;
};

struct MeshSpec {
  int nx = 0;
  int nz = 0;
};

/// Exactly one of the three selectors is set.
struct InterfaceSpec {
  std::optional<int> iota;
  std::optional<double> eps_target;
  std::optional<double> omega1_fraction;

  int resolve(const TensorMesh& mesh, const EpsProfile& eps) const;
  std::string describe() const;
};

struct ExperimentConfig {
  Study study = Study::Solve;
  SetupConfig setup;
  std::vector<MeshSpec> meshes;
  std::vector<std::string> models;
  InterfaceSpec interface;
  std::vector<double> eps_min_sweep;  ///< conditioning
  std::vector<double> eps_targets;    ///< interface-scan, theorem-fits
  int quad_order = 3;
  double plateau_tol = 0.10;
  bool plots = true;
};

/// Parses a JSON document. Unknown keys, wrong types and missing required
/// fields raise ConfigError naming the offending path (and line for syntax errors).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// ANISO_HYBRID_THREADS when set and positive, otherwise the hardware concurrency.
int default_thread_count();

struct RunOptions {
  std::string out_dir;
  int threads = 1;
  std::optional<unsigned long long> seed;
};

struct ResultRow {
  std::string study;
  std::string setup;
  std::string model;
  int nx = 0;
  int nz = 0;
  int iota = -1;
  double eps_iota = 0.0;
  double eps_min = 0.0;
  double eps_max = 0.0;
  int rows = 0;
  long long nnz = 0;
  long long factor_nnz = 0;
  double cond_estimate = 0.0;
  double rel_l2 = 0.0;
  double rel_h1 = 0.0;
  double residual = 0.0;
  double constraint_residual = 0.0;
  double xi_dx = 0.0;
  double xi_dz = 0.0;
  double ess_distance = 0.0;
  std::string status = "ok";  ///< ok | breakdown | failed | assembled
  bool required = true;
  double assemble_seconds = 0.0;
  double factorize_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct RunResult {
  std::vector<ResultRow> rows;
  bool success = true;
  std::string summary_json;
};

/// Runs the study and writes results.csv, timings.csv, summary.json,
/// config-echo.json and SVG plots into opts.out_dir.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opts);

std::vector<std::string> result_columns();
void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_timings_csv(std::ostream& os, const std::vector<ResultRow>& rows);

}  // namespace aniso
