#include "cam/validate/validate.hpp"

#include <cmath>
#include <numbers>

namespace cam::check {
namespace {

std::vector<std::array<double, 3>> as_arrays(std::span<const Eigen::Vector3d> u) {
  std::vector<std::array<double, 3>> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = {u[i].x(), u[i].y(), u[i].z()};
  return out;
}

double series_poc(const map::Trajectory& traj, const std::array<double, 2>& rb) {
  return conj::poc_chan(Eigen::Vector2d(rb[0], rb[1]), traj.bplane().p_b, traj.event().hbr);
}

}  // namespace

ValidationReport validate_solution(const conj::ConjunctionEvent& event, const map::ControlSchedule& schedule,
                                   std::span<const Eigen::Vector3d> controls, double target_poc,
                                   const dyn::PropagationConfig& propagation) {
  if (controls.size() != schedule.nodes.size()) {
    throw Error(ErrorKind::kConfiguration, "one control vector per node is required");
  }
  const map::Trajectory traj(event, schedule, propagation);
  const auto rb = traj.bplane_position<double>(as_arrays(controls));
  ValidationReport r;
  r.bplane_before = traj.bplane().r_b;
  r.bplane_after = {rb[0], rb[1]};
  r.validated_poc = series_poc(traj, rb);
  r.quadrature_poc = conj::poc_quadrature(r.bplane_after, traj.bplane().p_b, event.hbr);
  const double scale = std::max(r.validated_poc, r.quadrature_poc);
  r.quadrature_agrees = scale < 1e-300 || std::abs(r.validated_poc - r.quadrature_poc) <= 1e-6 * scale;
  r.poc_log_error = r.validated_poc > 0.0 ? std::abs(std::log10(r.validated_poc) - std::log10(target_poc))
                                          : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < controls.size(); ++i) r.per_node_dv.push_back(controls[i]);
  std::vector<solve::NodeControl> nodes;
  for (std::size_t i = 0; i < controls.size(); ++i) nodes.push_back({schedule.nodes[i].time, controls[i], false});
  r.dv_total = solve::total_delta_v(schedule, nodes);
  return r;
}

ValidationReport validate_solution(const conj::ConjunctionEvent& event, const solve::ManeuverSolution& solution,
                                   double target_poc, const dyn::PropagationConfig& propagation) {
  std::vector<Eigen::Vector3d> u;
  for (const auto& n : solution.nodes) u.push_back(n.u);
  ValidationReport r = validate_solution(event, solution.schedule, u, target_poc, propagation);
  r.map_residual = std::abs(solution.predicted_poc - r.validated_poc);
  return r;
}

OracleResult grid_oracle_single_impulse(const conj::ConjunctionEvent& event, double node_time, double target_poc,
                                        double radius, const OracleGrid& grid, std::optional<map::ControlFrame> frame,
                                        const dyn::PropagationConfig& propagation) {
  if (grid.directions < 1 || grid.magnitude_steps < 1 || grid.bisection_steps < 0) {
    throw Error(ErrorKind::kConfiguration, "oracle grid needs positive resolution");
  }
  if (static_cast<double>(grid.directions) * grid.magnitude_steps > 1e7) {
    throw Error(ErrorKind::kConfiguration, "oracle grid exceeds 1e7 candidates");
  }
  if (!(radius > 0.0)) throw Error(ErrorKind::kConfiguration, "oracle radius must be positive");
  map::ControlSchedule s;
  s.frame = frame.value_or(map::default_frame(event.dynamics));
  map::ControlNode node;
  node.time = node_time;
  s.nodes.push_back(node);
  const map::Trajectory traj(event, s, propagation);

  OracleResult best;
  auto poc_at = [&](const Eigen::Vector3d& dv) {
    ++best.evaluations;
    const std::array<std::array<double, 3>, 1> u = {{{dv.x(), dv.y(), dv.z()}}};
    return series_poc(traj, traj.bplane_position<double>(u));
  };
  const double p0 = poc_at(Eigen::Vector3d::Zero());
  if (p0 <= target_poc) {
    best.feasible = true;
    best.poc = p0;
    return best;
  }

  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double best_mag = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.directions; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / grid.directions;
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Eigen::Vector3d dir(rxy * std::cos(golden * i), rxy * std::sin(golden * i), z);
    // First feasible level along this direction, skipping levels that
    // cannot beat the incumbent.
    double lo = 0.0, hi = -1.0, p_hi = 0.0;
    for (int k = 1; k <= grid.magnitude_steps; ++k) {
      const double m = radius * k / grid.magnitude_steps;
      if (lo >= best_mag) break;
      const double p = poc_at(dir * m);
      if (p <= target_poc) {
        hi = m;
        p_hi = p;
        break;
      }
      lo = m;
    }
    if (hi < 0.0 || lo >= best_mag) continue;
    for (int b = 0; b < grid.bisection_steps; ++b) {
      const double mid = 0.5 * (lo + hi);
      const double p = poc_at(dir * mid);
      if (p <= target_poc) {
        hi = mid;
        p_hi = p;
      } else {
        lo = mid;
      }
    }
    if (hi < best_mag) {
      best_mag = hi;
      best.feasible = true;
      best.magnitude = hi;
      best.dv = dir * hi;
      best.poc = p_hi;
    }
  }
  return best;
}

}  // namespace cam::check
