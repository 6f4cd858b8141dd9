#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cam/cli/scenario.hpp"
#include "cam/solver/solver.hpp"
#include "cam/validate/validate.hpp"

namespace cam::cli {

/// Command-line settings for one run. Unset fields fall back to the
/// scenario defaults, then to built-in values.
///
/// Node tokens: a bare number is a lead time before TCA, in orbits of the
/// primary for Earth models and in nondimensional time for CR3BP; a number
/// with an `s` suffix is seconds relative to TCA (`-600s`). `a:b:step`
/// expands to an inclusive range of bare lead times.
struct RunConfig {
  std::optional<int> order;
  std::optional<std::string> mode;  // "impulse" | "lowthrust"
  std::vector<std::string> nodes;
  std::optional<double> target_poc;
  double e_tol = 1e-10;
  int max_iterations = 200;
  std::optional<double> umax;            // m/s, thrust-limited sequencing
  std::optional<std::string> fixed_dir;  // "R" | "T" | "N" | "x,y,z"
  std::vector<std::string> filter_grid;
  std::optional<int> filter_keep;
  std::optional<std::string> dynamics;  // "kepler" | "j2" | "cr3bp"
  std::string out_path;
  std::string csv_path;
};

/// Node times in seconds relative to TCA, in the order given.
std::vector<double> parse_node_times(const std::vector<std::string>& tokens, const conj::ConjunctionEvent& event);

/// Control direction in the control frame of `model`.
Eigen::Vector3d parse_direction(const std::string& text, const dyn::DynamicsModel& model);

struct RunOutput {
  solve::ManeuverSolution solution;
  check::ValidationReport report;
  std::string result_json;
  std::string csv;  // empty unless csv_path is set
};

/// Full pipeline: configuration, map, solve, validation. Output files are
/// written only on success, each through a temporary file and a rename.
RunOutput run_scenario(const ScenarioFile& scenario, const RunConfig& config);

/// Re-propagates the controls stored in a result JSON against its scenario.
check::ValidationReport revalidate_result(const ScenarioFile& scenario, const std::string& result_json);

/// 0 ok, 2 parse, 3 validation, 4 non-convergence, 5 infeasible.
int exit_code(ErrorKind kind);

/// Machine-readable error object.
std::string error_json(ErrorKind kind, const std::string& message, const std::string& scenario = {});

/// Writes `text` to `path` atomically.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace cam::cli
