#include "cam/solver/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cam::solve {
namespace {

constexpr double kMinGradient = 1e-30;

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

[[noreturn]] void degenerate(const std::string& what) { throw Error(ErrorKind::kDegenerateGradient, what); }

// rho g / |g|^2
std::vector<double> greedy_step(std::span<const double> g, double rho, const char* where) {
  const double gn = norm(g);
  if (!(gn >= kMinGradient)) degenerate(std::string("gradient vanishes in ") + where + ": no control authority");
  std::vector<double> phi(g.size());
  const double scale = rho / (gn * gn);
  for (std::size_t i = 0; i < g.size(); ++i) phi[i] = g[i] * scale;
  return phi;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void validate(const SolverConfig& c) {
  if (c.order < 1) throw Error(ErrorKind::kConfiguration, "order must be at least 1");
  if (!(c.e_tol > 0.0)) throw Error(ErrorKind::kConfiguration, "e_tol must be positive");
  if (c.max_iterations < 1) throw Error(ErrorKind::kConfiguration, "max_iterations must be at least 1");
  if (!(c.target_poc > 0.0 && c.target_poc < 1.0)) {
    throw Error(ErrorKind::kConfiguration, "target PoC must lie in (0, 1)");
  }
}

double probability_gap(const map::PocMap& map, double target_poc) {
  return map.to_scale(target_poc) - map.poly.constant_part();
}

std::vector<double> gradient(const map::PocMap& map) {
  const std::vector<double> zero(map.size(), 0.0);
  return da::contract_no_first_mode(map.poly, 1, zero);
}

std::vector<double> solve_order1(const map::PocMap& map, double rho) {
  if (rho == 0.0) return std::vector<double>(map.size(), 0.0);
  return greedy_step(gradient(map), rho, "the first-order map");
}

std::vector<double> pseudo_gradient(const map::PocMap& map, int j, std::span<const double> phi) {
  if (j < 1 || j > map.order()) {
    throw Error(ErrorKind::kConfiguration, "order " + std::to_string(j) + " outside the map's range");
  }
  return da::contract_no_first_mode_sum(map.poly, j, phi);
}

OrderResult solve_order_j(const map::PocMap& map, int j, std::span<const double> phi_init, double rho,
                          const SolverConfig& config) {
  if (phi_init.size() != map.size()) throw Error(ErrorKind::kConfiguration, "initial guess has the wrong size");
  std::vector<double> prev(phi_init.begin(), phi_init.end());
  std::vector<double> tilde = prev;
  double last_update = std::numeric_limits<double>::infinity();
  std::vector<double> last_step(prev.size(), 0.0), step(prev.size());
  int stalls = 0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const std::vector<double> g = pseudo_gradient(map, j, tilde);
    std::vector<double> next = greedy_step(g, rho, "the pseudo-gradient");
    double update = 0.0, turn = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      step[i] = next[i] - prev[i];
      update += step[i] * step[i];
      turn += step[i] * last_step[i];
    }
    update = std::sqrt(update);
    if (!std::isfinite(update)) throw NonConvergenceError("iteration diverged at order " + std::to_string(j), prev);
    if (update <= config.e_tol) return {std::move(next), it};
    // Growing or back-and-forth updates count as stalls.
    stalls = (update > last_update || turn < 0.0) ? stalls + 1 : 0;
    last_update = update;
    std::swap(last_step, step);
    if (stalls >= 3) {
      // Damping: average the last two iterates.
      for (std::size_t i = 0; i < next.size(); ++i) tilde[i] = 0.5 * (next[i] + prev[i]);
      stalls = 0;
    } else {
      tilde = next;
    }
    prev = std::move(next);
  }
  throw NonConvergenceError("no convergence at order " + std::to_string(j) + " within " +
                                std::to_string(config.max_iterations) + " iterations",
                            prev);
}

double total_delta_v(const map::ControlSchedule& schedule, std::span<const NodeControl> nodes) {
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double m = nodes[i].u.norm();
    if (schedule.mode == map::ControlMode::kImpulsive) {
      total += m;
    } else if (i + 1 < nodes.size()) {
      total += m * (nodes[i + 1].time - nodes[i].time);
    }
  }
  return total;
}

ManeuverSolution solve_recursive(const map::PocMap& map, const SolverConfig& config) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  const int n = std::min(config.order, map.order());
  ManeuverSolution sol;
  sol.schedule = map.schedule;
  sol.variables = map.variables;
  sol.ballistic_poc = map.ballistic_poc;
  sol.per_order_iterations.assign(static_cast<std::size_t>(n), 0);
  sol.rho = probability_gap(map, config.target_poc);

  std::vector<double> phi(map.size(), 0.0);
  if (sol.rho < 0.0) {
    phi = solve_order1(map, sol.rho);
    sol.per_order_iterations[0] = 1;
    for (int j = 2; j <= n; ++j) {
      OrderResult r = solve_order_j(map, j, phi, sol.rho, config);
      phi = std::move(r.phi);
      sol.per_order_iterations[static_cast<std::size_t>(j - 1)] = r.iterations;
    }
  }

  const double value = da::evaluate(map.poly, phi);
  sol.predicted_poc = map.from_scale(value);
  sol.residual = std::abs(sol.predicted_poc - config.target_poc);
  if (sol.rho < 0.0) {
    sol.constraint_residual = std::abs((value - map.poly.constant_part()) - sol.rho);
    sol.gradient_norm = norm(pseudo_gradient(map, n, phi));
  }
  sol.phi.resize(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) sol.phi[i] = phi[i] * map.unit;
  const auto u = map::node_controls(map.schedule, map.variables, map.unit, phi);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& node = map.schedule.nodes[i];
    sol.nodes.push_back({node.time, u[i], !node.active});
  }
  sol.dv_total = total_delta_v(map.schedule, sol.nodes);
  sol.wall_time = seconds_since(t0);
  return sol;
}

ManeuverSolution solve_schedule(const conj::ConjunctionEvent& event, const map::ControlSchedule& schedule,
                                const SolverConfig& config) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  map::MapOptions options;
  options.scale = config.scale;
  options.propagation = config.propagation;
  const map::PocMap m = map::build_poc_map(event, schedule, config.order, options);
  ManeuverSolution sol = solve_recursive(m, config);
  sol.wall_time = seconds_since(t0);
  return sol;
}

std::vector<map::NodeGradient> rank_nodes(const conj::ConjunctionEvent& event, std::span<const double> dense_times,
                                          const map::ControlSchedule& node_template, double arc_seconds,
                                          const dyn::PropagationConfig& propagation) {
  if (dense_times.empty()) throw Error(ErrorKind::kConfiguration, "node grid is empty");
  auto g = map::gradient_norm_per_node(event, dense_times, node_template, arc_seconds, propagation);
  std::stable_sort(g.begin(), g.end(), [](const map::NodeGradient& a, const map::NodeGradient& b) {
    if (a.norm != b.norm) return a.norm > b.norm;
    return a.time < b.time;
  });
  return g;
}

namespace {

map::ControlNode node_from_template(const map::ControlSchedule& tmpl, double time) {
  map::ControlNode n;
  if (!tmpl.nodes.empty()) n = tmpl.nodes.front();
  n.time = time;
  n.active = true;
  n.reference.setZero();
  return n;
}

void sort_by_time(map::ControlSchedule& s) {
  std::stable_sort(s.nodes.begin(), s.nodes.end(),
                   [](const map::ControlNode& a, const map::ControlNode& b) { return a.time < b.time; });
}

}  // namespace

map::ControlSchedule filter_nodes(const conj::ConjunctionEvent& event, std::span<const double> dense_times,
                                  int keep, const map::ControlSchedule& node_template, double arc_seconds,
                                  const dyn::PropagationConfig& propagation) {
  if (keep < 1 || static_cast<std::size_t>(keep) > dense_times.size()) {
    throw Error(ErrorKind::kConfiguration, "keep count must lie in [1, grid size]");
  }
  const auto ranked = rank_nodes(event, dense_times, node_template, arc_seconds, propagation);
  map::ControlSchedule s;
  s.mode = node_template.mode;
  s.frame = node_template.frame;
  for (const auto& r : ranked) {
    if (static_cast<int>(s.nodes.size()) == keep) break;
    const bool seen = std::any_of(s.nodes.begin(), s.nodes.end(), [&](const map::ControlNode& n) { return n.time == r.time; });
    if (!seen) s.nodes.push_back(node_from_template(node_template, r.time));
  }
  sort_by_time(s);
  return s;
}

ManeuverSolution solve_thrust_limited(const conj::ConjunctionEvent& event, std::span<const double> dense_times,
                                      double u_max, const SolverConfig& config,
                                      const map::ControlSchedule& node_template) {
  validate(config);
  if (!(u_max > 0.0)) throw Error(ErrorKind::kConfiguration, "u_max must be positive");
  if (node_template.mode != map::ControlMode::kImpulsive) {
    throw Error(ErrorKind::kConfiguration, "thrust-limited sequencing supports impulsive control only");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto ranked = rank_nodes(event, dense_times, node_template, 0.0, config.propagation);

  map::MapOptions options;
  options.scale = config.scale;
  options.propagation = config.propagation;

  map::ControlSchedule fixed;
  fixed.mode = node_template.mode;
  fixed.frame = node_template.frame;
  for (const auto& r : ranked) {
    const bool seen =
        std::any_of(fixed.nodes.begin(), fixed.nodes.end(), [&](const map::ControlNode& n) { return n.time == r.time; });
    if (seen) continue;
    map::ControlSchedule s = fixed;
    map::ControlNode node = node_from_template(node_template, r.time);
    node.u_max = u_max;
    s.nodes.push_back(node);
    sort_by_time(s);
    const map::PocMap m = map::build_poc_map(event, s, config.order, options);
    ManeuverSolution sol = solve_recursive(m, config);
    const auto it = std::find_if(sol.nodes.begin(), sol.nodes.end(),
                                 [&](const NodeControl& n) { return n.time == r.time && !n.saturated; });
    const Eigen::Vector3d u = it->u;
    const double mag = u.norm();
    if (mag <= u_max * (1.0 + 1e-12)) {
      sol.wall_time = seconds_since(t0);
      return sol;
    }
    node.active = false;
    node.reference = u * (u_max / mag);
    fixed.nodes.push_back(node);
    sort_by_time(fixed);
  }

  // Candidates exhausted: report the PoC left with every node saturated.
  double residual = std::numeric_limits<double>::quiet_NaN();
  if (!fixed.nodes.empty()) {
    const map::Trajectory traj(event, fixed, config.propagation);
    std::vector<std::array<double, 3>> u(fixed.nodes.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      for (int k = 0; k < 3; ++k) u[i][static_cast<std::size_t>(k)] = fixed.nodes[i].reference[k];
    }
    residual = traj.poc<double>(u);
  }
  throw InfeasibleError("thrust limit cannot close the PoC gap with the available nodes", residual);
}

ManeuverSolution solve_fixed_direction(const conj::ConjunctionEvent& event, const map::ControlSchedule& schedule,
                                       const SolverConfig& config) {
  for (const auto& n : schedule.nodes) {
    if (n.active && !n.fixed_direction) {
      throw Error(ErrorKind::kConfiguration, "every node needs a fixed direction");
    }
  }
  ManeuverSolution sol = solve_schedule(event, schedule, config);
  if (!config.allow_negative_magnitude) {
    for (double m : sol.phi) {
      if (m < 0.0) throw InfeasibleError("solution needs a retrograde impulse", sol.predicted_poc);
    }
  }
  return sol;
}

}  // namespace cam::solve
