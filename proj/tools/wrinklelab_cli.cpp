#include "wrinkle/experiments.hpp"

#include "wrinkle/cascade.hpp"
#include "wrinkle/repair.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

// exit codes: 0 ok, 2 validation, 3 solver non-convergence, 4 I/O
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIo = 4;

wrinkle::ExperimentConfig load_config(const std::string& config_path,
                                      const std::string& out_dir,
                                      std::vector<double> L_list, int grid_n,
                                      int modes, std::uint64_t seed, bool seed_set) {
  wrinkle::json j = wrinkle::json::object();
  if (!config_path.empty())
    j = wrinkle::json::parse(wrinkle::read_text_file(config_path));
  if (!L_list.empty()) j["L_list"] = L_list;
  if (grid_n > 0) j["grid"]["n"] = grid_n;
  if (modes > 0) j["grid"]["modes"] = modes;
  if (seed_set) j["seed"] = seed;
  if (!out_dir.empty()) j["out_dir"] = out_dir;
  return wrinkle::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for the stretched-film wrinkling scaling law"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::vector<double> L_list;
  int grid_n = 0, modes = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON config file")->envname("WRINKLELAB_CONFIG");
  app.add_option("--out", out_dir, "output directory")->envname("WRINKLELAB_OUT");
  app.add_option("--L", L_list, "half-period list")->envname("WRINKLELAB_L");
  app.add_option("--grid-n", grid_n, "x-grid cell count")->envname("WRINKLELAB_GRID_N");
  app.add_option("--modes", modes, "frequency mode cap")->envname("WRINKLELAB_MODES");
  auto* seed_opt = app.add_option("--seed", seed, "random seed")->envname("WRINKLELAB_SEED");

  auto* cmd_solve = app.add_subcommand("solve", "minimize at a single L and dump diagnostics");
  auto* cmd_scan = app.add_subcommand("scan", "sigma(L) scan with inequality verdicts");
  auto* cmd_scaling = app.add_subcommand("scaling", "assembled upper bound vs h = L^-2");
  auto* cmd_repair = app.add_subcommand("repair-test", "repair overhead trend over L");
  auto* cmd_report = app.add_subcommand("report", "regenerate report.md from persisted JSON");

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  try {
    wrinkle::ExperimentConfig cfg;
    try {
      cfg = load_config(config_path, out_dir, L_list, grid_n, modes, seed, seed_set);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitValidation;
    }

    if (cmd_report->parsed()) {
      wrinkle::write_report(cfg.out_dir);
      std::cout << "report written to " << cfg.out_dir << "/report.md\n";
      return 0;
    }
    if (cmd_solve->parsed()) {
      cfg.experiment = "solve";
      if (cfg.L_list.size() != 1) {
        std::cerr << "config error: solve expects exactly one L\n";
        return kExitValidation;
      }
      auto out = wrinkle::sigma_scan(cfg);
      std::cout << "L = " << cfg.L_list[0]
                << "  sigma = " << out.records[0].sigma
                << "  converged = " << out.records[0].converged << "\n";
      return out.records[0].converged ? 0 : kExitNonConvergence;
    }
    if (cmd_scan->parsed()) {
      cfg.experiment = "scan";
      auto out = wrinkle::sigma_scan(cfg);
      bool all = true;
      for (const auto& r : out.records) {
        std::printf("L = %-8g sigma = %-12.8g %s\n", r.L, r.sigma,
                    r.converged ? "" : "(not converged)");
        all = all && r.converged;
      }
      for (const auto& v : out.verdicts)
        std::printf("%s %s\n", v.pass ? "[ok]  " : "[FAIL]", v.name.c_str());
      wrinkle::write_report(cfg.out_dir);
      return all ? 0 : kExitNonConvergence;
    }
    if (cmd_scaling->parsed()) {
      cfg.experiment = "scaling";
      auto out = wrinkle::scaling_law(cfg);
      std::printf("L0 = %g  sigma_L0 = %.8g\n", out.L0, out.sigma_L0);
      for (const auto& r : out.rows)
        std::printf("L = %-6g h = %-10.4g L^2(E_L - E0) = %-12.8g certificate = %.6g\n",
                    r.L, r.h, r.excess_rescaled, r.certificate);
      wrinkle::write_report(cfg.out_dir);
      return 0;
    }
    if (cmd_repair->parsed()) {
      cfg.experiment = "repair-test";
      auto rows = wrinkle::repair_trend(cfg);
      for (const auto& r : rows)
        std::printf("L = %-6g eta = %-10.6g delta_hat = %-12.6g margin = %.3g\n",
                    r.L, r.budget.eta, r.budget.delta_hat,
                    r.budget.feasibility_margin);
      wrinkle::write_report(cfg.out_dir);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.find("cannot open") != std::string::npos ||
        what.find("write failed") != std::string::npos) {
      std::cerr << "I/O error: " << what << "\n";
      return kExitIo;
    }
    std::cerr << "error: " << what << "\n";
    return kExitNonConvergence;
  }
  return 0;
}
