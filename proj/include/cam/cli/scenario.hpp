#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cam/conjunction/conjunction.hpp"

namespace cam::cli {

inline constexpr int kSchemaVersion = 1;

/// Per-scenario defaults; command-line flags take precedence.
struct ScenarioDefaults {
  std::optional<int> order;
  std::optional<std::string> mode;                // "impulse" | "lowthrust"
  std::optional<std::vector<double>> node_seconds;  // seconds relative to TCA (negative)
  std::optional<std::vector<double>> node_orbits;   // orbits before TCA (positive), Earth only
  std::optional<double> target_poc;
  std::optional<double> umax;
  std::optional<std::string> fixed_dir;           // "R" | "T" | "N" | "x,y,z"
};

/// Conjunction at TCA. Units: km, km/s, km^2 covariances, HBR in km, epochs
/// in seconds relative to TCA.
struct ScenarioFile {
  int schema_version = kSchemaVersion;
  std::string name;
  conj::ConjunctionEvent event;
  ScenarioDefaults defaults;
};

std::string scenario_to_json(const ScenarioFile& scenario);
/// Throws kParse on malformed input and kValidation on unsupported versions.
ScenarioFile scenario_from_json(std::string_view text);

ScenarioFile read_scenario(const std::string& path);
void write_scenario(const std::string& path, const ScenarioFile& scenario);

enum class Regime { kLeo, kCislunar };

/// Deterministic pseudo-random conjunctions with ballistic PoC in
/// [1e-5, 1e-2] (checked by quadrature). LEO scenarios use two-body dynamics.
std::vector<ScenarioFile> generate_synthetic_suite(std::uint64_t seed, int count, Regime regime);

/// Initial state of the reference near-rectilinear halo orbit (synodic,
/// nondimensional) and its period.
dyn::SpacecraftState nrho_initial_state();
inline constexpr double kNrhoPeriod = 1.5111;

}  // namespace cam::cli
