#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cam/cli/run.hpp"
#include "cam/cli/scenario.hpp"

namespace {

using cam::Error;
using cam::ErrorKind;

int report_error(ErrorKind kind, const std::string& message, const std::string& scenario = {}) {
  std::cout << cam::cli::error_json(kind, message, scenario);
  return cam::cli::exit_code(kind);
}

int run_one(const std::string& path, cam::cli::RunConfig config) {
  std::string name = path;
  try {
    const auto scenario = cam::cli::read_scenario(path);
    if (!scenario.name.empty()) name = scenario.name;
    const auto out = cam::cli::run_scenario(scenario, config);
    if (config.out_path.empty()) std::cout << out.result_json;
    return 0;
  } catch (const Error& e) {
    return report_error(e.kind(), e.what(), name);
  } catch (const std::exception& e) {
    return report_error(ErrorKind::kNumeric, e.what(), name);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision avoidance maneuver design from high-order PoC maps"};
  app.require_subcommand(1);

  cam::cli::RunConfig rc;
  std::vector<std::string> scenarios;
  std::string mode, dyn, fixed_dir;
  double target = 0.0, umax = 0.0;
  int order = 0, keep = 0;

  auto* run = app.add_subcommand("run", "Design a maneuver for one or more scenario files");
  run->add_option("scenarios", scenarios, "Scenario JSON files")->required()->check(CLI::ExistingFile);
  auto* o_order = run->add_option("--order", order, "Map and solver order");
  auto* o_mode = run->add_option("--mode", mode, "impulse | lowthrust")->check(CLI::IsMember({"impulse", "lowthrust"}));
  run->add_option("--nodes", rc.nodes,
                  "Node times: lead in orbits (Earth) or nondimensional time (CR3BP); "
                  "suffix s for seconds relative to TCA; a:b:step ranges")
      ->delimiter(',');
  auto* o_target = run->add_option("--target-poc", target, "Target probability of collision");
  run->add_option("--etol", rc.e_tol, "Fixed-point tolerance")->capture_default_str();
  run->add_option("--max-iter", rc.max_iterations, "Iteration cap per order")->capture_default_str();
  auto* o_umax = run->add_option("--umax", umax, "Per-impulse bound in m/s (thrust-limited sequencing)");
  auto* o_fixed = run->add_option("--fixed-dir", fixed_dir, "Fixed thrust direction: R, T, N or x,y,z");
  run->add_option("--filter-grid", rc.filter_grid, "Candidate node times for gradient filtering")->delimiter(',');
  auto* o_keep = run->add_option("--filter-keep", keep, "Number of filtered nodes to keep");
  auto* o_dyn = run->add_option("--dyn", dyn, "kepler | j2 | cr3bp")->check(CLI::IsMember({"kepler", "j2", "cr3bp"}));
  run->add_option("--out", rc.out_path, "Result JSON path (a directory in batch mode)");
  run->add_option("--csv", rc.csv_path, "B-plane CSV path (a directory in batch mode)");

  std::uint64_t seed = 42;
  int count = 20;
  std::string regime = "leo", out_dir = ".";
  auto* gen = app.add_subcommand("generate", "Write a deterministic synthetic scenario suite");
  gen->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen->add_option("--count", count, "Number of scenarios")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--regime", regime, "leo | cislunar")->capture_default_str()->check(CLI::IsMember({"leo", "cislunar"}));
  gen->add_option("--out", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(ErrorKind::kParse, e.what());
  }

  if (gen->parsed()) {
    try {
      const auto suite = cam::cli::generate_synthetic_suite(
          seed, count, regime == "leo" ? cam::cli::Regime::kLeo : cam::cli::Regime::kCislunar);
      std::filesystem::create_directories(out_dir);
      for (const auto& sc : suite) {
        const auto path = std::filesystem::path(out_dir) / (sc.name + ".json");
        cam::cli::write_file_atomic(path.string(), cam::cli::scenario_to_json(sc));
        std::cout << path.string() << "\n";
      }
      return 0;
    } catch (const Error& e) {
      return report_error(e.kind(), e.what());
    } catch (const std::exception& e) {
      return report_error(ErrorKind::kConfiguration, e.what());
    }
  }

  if (*o_order) rc.order = order;
  if (*o_mode) rc.mode = mode;
  if (*o_target) rc.target_poc = target;
  if (*o_umax) rc.umax = umax;
  if (*o_fixed) rc.fixed_dir = fixed_dir;
  if (*o_keep) rc.filter_keep = keep;
  if (*o_dyn) rc.dynamics = dyn;

  if (scenarios.size() == 1) return run_one(scenarios.front(), rc);

  // Batch: --out and --csv name directories; one file per scenario.
  int worst = 0;
  for (const auto& path : scenarios) {
    cam::cli::RunConfig each = rc;
    const std::string stem = std::filesystem::path(path).stem().string();
    try {
      if (!rc.out_path.empty()) {
        std::filesystem::create_directories(rc.out_path);
        each.out_path = (std::filesystem::path(rc.out_path) / (stem + ".result.json")).string();
      }
      if (!rc.csv_path.empty()) {
        std::filesystem::create_directories(rc.csv_path);
        each.csv_path = (std::filesystem::path(rc.csv_path) / (stem + ".bplane.csv")).string();
      }
    } catch (const std::exception& e) {
      return report_error(ErrorKind::kConfiguration, e.what());
    }
    worst = std::max(worst, run_one(path, each));
  }
  return worst;
}
