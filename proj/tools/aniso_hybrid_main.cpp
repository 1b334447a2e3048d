// aniso-hybrid: run configured studies or export assembled systems.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aniso/experiment.hpp"
#include "aniso/models.hpp"
#include "aniso/sparse.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, int threads,
            std::optional<unsigned long long> seed) {
  const aniso::ExperimentConfig cfg = aniso::load_config(config_path);
  aniso::RunOptions opts;
  opts.out_dir = out_dir;
  opts.threads = threads > 0 ? threads : aniso::default_thread_count();
  opts.seed = seed;
  const aniso::RunResult res = aniso::run_experiment(cfg, opts);

  int ok = 0, breakdown = 0, failed = 0;
  for (const auto& r : res.rows) {
    if (r.status == "failed") {
      ++failed;
    } else if (r.status == "breakdown") {
      ++breakdown;
    } else {
      ++ok;
    }
  }
  std::printf("%s: %zu rows (%d ok, %d breakdown, %d failed) -> %s\n",
              aniso::to_string(cfg.study).c_str(), res.rows.size(), ok, breakdown, failed,
              out_dir.c_str());
  return res.success ? 0 : 1;
}

struct DumpArgs {
  std::string model;
  int nx = 0;
  int nz = 0;
  int iota = -1;
  std::string out;
  std::string rhs_out;
  std::string setup = "a";
  std::string domain = "b";
  double eps_min = 1e-8;
  double eps_max = 1.0;
  double r = 30.0;
};

int cmd_dump(const DumpArgs& a) {
  aniso::SetupConfig sc;
  sc.name = a.setup;
  sc.domain_preset = a.domain;
  sc.eps.eps_min = a.eps_min;
  sc.eps.eps_max = a.eps_max;
  sc.eps.r = a.r;
  const aniso::ManufacturedProblem problem = sc.make();
  const aniso::TensorMesh mesh(sc.resolved_domain(), a.nx, a.nz);

  aniso::ModelSystem sys;
  if (a.model == "p") {
    sys = aniso::build_p_system(mesh, problem);
  } else if (a.model == "ap") {
    sys = aniso::build_ap_system(mesh, problem);
  } else {
    if (a.iota < 1) throw CLI::ValidationError("--iota", "required for the apl model");
    sys = aniso::build_apl_system(mesh, aniso::split_at_interface(mesh, a.iota), problem);
  }
  aniso::write_matrix_market(a.out, sys.system.matrix);
  if (!a.rhs_out.empty()) {
    std::ofstream f(a.rhs_out);
    if (!f) throw std::runtime_error("cannot write '" + a.rhs_out + "'");
    f << "%%MatrixMarket matrix array real general\n" << sys.system.rhs.size() << " 1\n";
    char buf[32];
    for (double v : sys.system.rhs) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      f << buf << '\n';
    }
  }
  std::printf("%s: %d rows, %zu nonzeros -> %s\n", a.model.c_str(), sys.system.matrix.rows(),
              sys.system.matrix.nnz(), a.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic-preserving solvers for anisotropic elliptic problems"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  std::optional<unsigned long long> seed;
  auto* run = app.add_subcommand("run", "Run a study described by a JSON config");
  run->add_option("--config", config_path, "Study configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--threads", threads,
                  "Worker threads (default: ANISO_HYBRID_THREADS or hardware concurrency)")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Recorded in config-echo.json; the solvers are deterministic");

  DumpArgs dump;
  auto* dm = app.add_subcommand("dump-matrix", "Write an assembled system in MatrixMarket format");
  dm->add_option("--model", dump.model, "p, ap or apl")
      ->required()
      ->check(CLI::IsMember({"p", "ap", "apl"}));
  dm->add_option("--nx", dump.nx, "Interior nodes along x")->required()->check(CLI::PositiveNumber);
  dm->add_option("--nz", dump.nz, "Interior nodes along z")->required()->check(CLI::PositiveNumber);
  dm->add_option("--iota", dump.iota, "Interface node index (apl only)");
  dm->add_option("--out", dump.out, "Matrix output path (.mtx)")->required();
  dm->add_option("--rhs-out", dump.rhs_out, "Optional right-hand side output path");
  dm->add_option("--setup", dump.setup, "Manufactured setup")
      ->check(CLI::IsMember({"a", "b", "zero-fluct", "zero"}));
  dm->add_option("--domain", dump.domain, "Domain preset")->check(CLI::IsMember({"a", "b"}));
  dm->add_option("--eps-min", dump.eps_min, "Smallest anisotropy")->check(CLI::PositiveNumber);
  dm->add_option("--eps-max", dump.eps_max, "Largest anisotropy")->check(CLI::PositiveNumber);
  dm->add_option("--r", dump.r, "Transition steepness of the tanh profile");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, out_dir, threads, seed);
    return cmd_dump(dump);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const aniso::ConfigError& e) {
    std::cerr << "aniso-hybrid: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "aniso-hybrid: " << e.what() << '\n';
    return 1;
  }
}
