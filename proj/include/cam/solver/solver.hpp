#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "cam/conjunction/conjunction.hpp"
#include "cam/mapbuilder/mapbuilder.hpp"

namespace cam::solve {

struct SolverConfig {
  int order = 5;
  double e_tol = 1e-10;
  int max_iterations = 200;
  double target_poc = 1e-6;
  bool allow_negative_magnitude = true;  // fixed-direction solves
  map::PocScale scale = map::PocScale::kLog10;
  dyn::PropagationConfig propagation;
};

/// order >= 1, e_tol > 0, max_iterations >= 1, 0 < target < 1.
void validate(const SolverConfig& config);

struct NodeControl {
  double time = 0.0;                           // seconds relative to TCA
  Eigen::Vector3d u = Eigen::Vector3d::Zero();  // m/s or m/s^2, control frame
  bool saturated = false;
};

struct ManeuverSolution {
  map::ControlSchedule schedule;     // nodes actually used, references included
  std::vector<map::Variable> variables;
  std::vector<double> phi;           // map unknowns in physical units
  std::vector<NodeControl> nodes;    // total control per node
  std::vector<int> per_order_iterations;
  double rho = 0.0;                  // target minus reference value on the map scale
  double ballistic_poc = 0.0;
  double predicted_poc = 0.0;        // map evaluated at the solution
  double residual = 0.0;             // |predicted_poc - target|
  double constraint_residual = 0.0;  // |sum_k F^(k) phi^k - rho| on the map scale
  double gradient_norm = 0.0;        // |g_n(phi)| in scaled variables
  std::optional<double> validated_poc;
  double dv_total = 0.0;             // m/s
  double wall_time = 0.0;            // s
};

/// Probability gap on the map's scale: target - constant part.
double probability_gap(const map::PocMap& map, double target_poc);

/// Degree-1 coefficients of the map.
std::vector<double> gradient(const map::PocMap& map);

/// Greedy first-order step phi = rho g / |g|^2 (scaled variables).
std::vector<double> solve_order1(const map::PocMap& map, double rho);

/// g_j = grad + sum_{k=2..j} F^(k) phi^(k-1).
std::vector<double> pseudo_gradient(const map::PocMap& map, int j, std::span<const double> phi);

struct OrderResult {
  std::vector<double> phi;
  int iterations = 0;
};

/// Fixed-point iteration phi <- rho g_j(phi) / |g_j(phi)|^2 until successive
/// iterates differ by at most e_tol.
OrderResult solve_order_j(const map::PocMap& map, int j, std::span<const double> phi_init, double rho,
                          const SolverConfig& config);

/// Order 1 seed, then orders 2..n each started from the previous one.
/// Zero control when the reference PoC is already at or below the target.
ManeuverSolution solve_recursive(const map::PocMap& map, const SolverConfig& config);

/// Builds the map for `schedule` and solves it; wall time covers both.
ManeuverSolution solve_schedule(const conj::ConjunctionEvent& event, const map::ControlSchedule& schedule,
                                const SolverConfig& config);

/// Candidate times sorted by decreasing gradient norm (ties: earlier time,
/// then list position).
std::vector<map::NodeGradient> rank_nodes(const conj::ConjunctionEvent& event, std::span<const double> dense_times,
                                          const map::ControlSchedule& node_template, double arc_seconds = 0.0,
                                          const dyn::PropagationConfig& propagation = {});

/// Schedule with the `keep` best distinct times, in time order. Node
/// attributes (direction, bound) come from the template's first node.
map::ControlSchedule filter_nodes(const conj::ConjunctionEvent& event, std::span<const double> dense_times,
                                  int keep, const map::ControlSchedule& node_template, double arc_seconds = 0.0,
                                  const dyn::PropagationConfig& propagation = {});

/// Adds impulses in ranking order, saturating each at u_max (m/s) and
/// folding it into the reference, until an unsaturated solve closes the gap.
/// Throws InfeasibleError when the candidates run out.
ManeuverSolution solve_thrust_limited(const conj::ConjunctionEvent& event, std::span<const double> dense_times,
                                      double u_max, const SolverConfig& config,
                                      const map::ControlSchedule& node_template = {});

/// One magnitude per node along its fixed direction.
ManeuverSolution solve_fixed_direction(const conj::ConjunctionEvent& event, const map::ControlSchedule& schedule,
                                       const SolverConfig& config);

/// Sum of impulse norms (m/s); for low thrust, sum of |a| * arc duration.
double total_delta_v(const map::ControlSchedule& schedule, std::span<const NodeControl> nodes);

}  // namespace cam::solve
