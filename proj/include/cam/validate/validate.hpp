#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "cam/conjunction/conjunction.hpp"
#include "cam/mapbuilder/mapbuilder.hpp"
#include "cam/solver/solver.hpp"

namespace cam::check {

struct ValidationReport {
  double validated_poc = 0.0;
  double quadrature_poc = 0.0;
  bool quadrature_agrees = true;  // series and quadrature within 1e-6 relative
  double poc_log_error = 0.0;     // |log10 validated - log10 target|
  double dv_total = 0.0;          // m/s
  std::vector<Eigen::Vector3d> per_node_dv;
  std::optional<double> map_residual;  // |predicted - validated|
  Eigen::Vector2d bplane_before = Eigen::Vector2d::Zero();  // km
  Eigen::Vector2d bplane_after = Eigen::Vector2d::Zero();
};

/// Real-valued propagation of the primary with the given per-node controls
/// (control frame, m/s or m/s^2) and recomputed PoC.
ValidationReport validate_solution(const conj::ConjunctionEvent& event, const map::ControlSchedule& schedule,
                                   std::span<const Eigen::Vector3d> controls, double target_poc,
                                   const dyn::PropagationConfig& propagation = {});

/// Same for a solver result; fills map_residual.
ValidationReport validate_solution(const conj::ConjunctionEvent& event, const solve::ManeuverSolution& solution,
                                   double target_poc, const dyn::PropagationConfig& propagation = {});

struct OracleResult {
  bool feasible = false;
  Eigen::Vector3d dv = Eigen::Vector3d::Zero();  // m/s, control frame
  double magnitude = 0.0;
  double poc = 0.0;
  long evaluations = 0;
};

struct OracleGrid {
  int directions = 2000;     // Fibonacci-sphere points
  int magnitude_steps = 40;  // uniform levels in (0, radius]
  int bisection_steps = 40;
};

/// Brute-force minimum-magnitude single impulse at `node_time` reaching
/// PoC <= target, searched over direction x magnitude and refined by
/// bisection. Independent of the polynomial machinery.
OracleResult grid_oracle_single_impulse(const conj::ConjunctionEvent& event, double node_time, double target_poc,
                                        double radius, const OracleGrid& grid = {},
                                        std::optional<map::ControlFrame> frame = std::nullopt,
                                        const dyn::PropagationConfig& propagation = {});

}  // namespace cam::check
