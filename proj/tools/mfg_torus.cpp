#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <tbb/global_control.h>

#include "mfgt/commands.hpp"
#include "mfgt/config.hpp"
#include "mfgt/error.hpp"

namespace {

int threads_from_env() {
  const char* env = std::getenv("MFG_TORUS_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return std::stoi(env);
  } catch (const std::exception&) {
    throw mfgt::Error(mfgt::ErrorCode::kConfig, "MFG_TORUS_THREADS is not an integer");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-order mean field games on the flat torus"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string report_path;
  int threads = 0;
  double scale = 1.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
    sub->add_option("--threads", threads, "Worker thread cap")->check(CLI::NonNegativeNumber);
    sub->add_option("--resolution-scale", scale, "Multiply n_x and n_t")
        ->check(CLI::PositiveNumber);
  };

  const std::vector<std::pair<const char*, const char*>> names{
      {"solve-hj", "Backward Lax-Oleinik solve under the stationary coupling"},
      {"optimal-curves", "Optimal curves from every atom of mu0"},
      {"cost-matrix", "Minimal-action matrix S_T over all cell pairs"},
      {"mfg", "Damped fixed-point search and equilibrium report"},
      {"verify", "Recompute certificates of a stored report"},
      {"fenchel-sweep", "Perturbed Lagrangian conjugate checks"},
      {"continuity-check", "Continuity-equation and drift-field diagnostics"},
  };
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (std::string(name) == "verify") {
      sub->add_option("--report", report_path, "report.json from an mfg run")->required();
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (threads == 0) threads = threads_from_env();
    std::unique_ptr<tbb::global_control> cap;
    if (threads > 0) {
      cap = std::make_unique<tbb::global_control>(
          tbb::global_control::max_allowed_parallelism, static_cast<std::size_t>(threads));
    }

    mfgt::RunConfig cfg = mfgt::load_config(config_path);
    if (scale != 1.0) cfg = cfg.scaled(scale);
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    const std::string& out = cfg.output.directory;

    if (command == "solve-hj") return mfgt::cmd_solve_hj(cfg, out, std::cout);
    if (command == "optimal-curves") return mfgt::cmd_optimal_curves(cfg, out, std::cout);
    if (command == "cost-matrix") return mfgt::cmd_cost_matrix(cfg, out, std::cout);
    if (command == "mfg") return mfgt::cmd_mfg(cfg, out, std::cout);
    if (command == "fenchel-sweep") return mfgt::cmd_fenchel_sweep(cfg, out, std::cout);
    if (command == "continuity-check") return mfgt::cmd_continuity_check(cfg, out, std::cout);
    return mfgt::cmd_verify(cfg, report_path, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
