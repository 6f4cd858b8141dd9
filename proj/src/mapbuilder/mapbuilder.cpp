#include "cam/mapbuilder/mapbuilder.hpp"

#include <cmath>
#include <string>

namespace cam::map {
namespace {

dyn::State6<double> nd_state(const dyn::SpacecraftState& s, const dyn::Units& u) {
  const double v = u.velocity();
  return {s.r.x() / u.length, s.r.y() / u.length, s.r.z() / u.length,
          s.v.x() / v,        s.v.y() / v,        s.v.z() / v};
}

dyn::SpacecraftState dimensional(const dyn::State6<double>& x, double t, const dyn::Units& u, dyn::Frame f) {
  dyn::SpacecraftState s;
  const double v = u.velocity();
  s.r = {x[0] * u.length, x[1] * u.length, x[2] * u.length};
  s.v = {x[3] * v, x[4] * v, x[5] * v};
  s.epoch = t * u.time;
  s.frame = f;
  return s;
}

}  // namespace

ControlFrame default_frame(const dyn::DynamicsModel& model) {
  return model.earth() ? ControlFrame::kRtn : ControlFrame::kSynodic;
}

double control_unit(ControlMode mode) { return mode == ControlMode::kImpulsive ? kImpulseUnit : kThrustUnit; }

void validate(const ControlSchedule& schedule, const dyn::DynamicsModel& model) {
  if (schedule.nodes.empty()) throw Error(ErrorKind::kConfiguration, "control schedule has no nodes");
  if (schedule.mode == ControlMode::kLowThrust && schedule.nodes.size() < 2) {
    throw Error(ErrorKind::kConfiguration, "a low-thrust arc needs at least two nodes");
  }
  if (schedule.frame == ControlFrame::kSynodic && model.earth()) {
    throw Error(ErrorKind::kFrame, "synodic control frame needs the CR3BP model");
  }
  if (schedule.frame == ControlFrame::kInertial && !model.earth()) {
    throw Error(ErrorKind::kFrame, "inertial control frame needs an Earth model");
  }
  for (std::size_t i = 0; i < schedule.nodes.size(); ++i) {
    const ControlNode& n = schedule.nodes[i];
    if (!std::isfinite(n.time) || n.time > 0.0) {
      throw Error(ErrorKind::kConfiguration, "node times must be finite and not after TCA");
    }
    if (i > 0 && !(n.time > schedule.nodes[i - 1].time)) {
      throw Error(ErrorKind::kConfiguration, "node times must be strictly increasing");
    }
    if (n.fixed_direction) {
      const double norm = n.fixed_direction->norm();
      if (!(std::abs(norm - 1.0) <= 1e-9)) throw Error(ErrorKind::kConfiguration, "fixed direction must be a unit vector");
    }
    if (!(n.u_max >= 0.0)) throw Error(ErrorKind::kConfiguration, "u_max must be non-negative");
    if (!n.reference.allFinite()) throw Error(ErrorKind::kConfiguration, "reference control must be finite");
  }
}

std::vector<Variable> layout_variables(const ControlSchedule& schedule) {
  std::vector<Variable> vars;
  const std::size_t n = schedule.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (schedule.mode == ControlMode::kLowThrust && i + 1 == n) break;
    const ControlNode& node = schedule.nodes[i];
    if (!node.active) continue;
    const int idx = static_cast<int>(i);
    if (node.fixed_direction) {
      vars.push_back({idx, -1});
    } else {
      for (int k = 0; k < 3; ++k) vars.push_back({idx, k});
    }
  }
  return vars;
}

Trajectory::Trajectory(const conj::ConjunctionEvent& event, const ControlSchedule& schedule,
                       const dyn::PropagationConfig& config)
    : event_(event), schedule_(schedule), config_(config) {
  conj::validate(event_);
  validate(schedule_, event_.dynamics);
  const dyn::DynamicsModel& model = event_.dynamics;
  units_ = dyn::make_units(model, event_.primary.r.norm());
  model_ = dyn::make_nd_model(model, units_);
  const double step = dyn::max_step(model, config_);
  const double per_unit = schedule_.mode == ControlMode::kImpulsive ? units_.velocity() : units_.acceleration();
  // Control units are m/s or m/s^2; states are km-based.
  control_to_nd_ = 1e-3 / per_unit;

  const std::size_t n = schedule_.nodes.size();
  times_.resize(n);
  for (std::size_t i = 0; i < n; ++i) times_[i] = schedule_.nodes[i].time / units_.time;

  dyn::State6<double> x = nd_state(event_.primary, units_);
  dyn::propagate_fixed<double>(model_, x, nullptr, 0.0, times_[0], dyn::step_count(config_, times_[0], step),
                               units_.time);
  node_states_.resize(n);
  steps_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    node_states_[i] = x;
    const double t1 = i + 1 < n ? times_[i + 1] : 0.0;
    steps_[i] = dyn::step_count(config_, t1 - times_[i], step);
    dyn::propagate_fixed<double>(model_, x, nullptr, times_[i], t1, steps_[i], units_.time);
  }
  tca_state_ = x;

  frames_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (schedule_.frame == ControlFrame::kRtn) {
      frames_[i] = dyn::rtn_rotation(dimensional(node_states_[i], times_[i], units_, model.frame()));
    } else {
      frames_[i].setIdentity();
    }
  }

  const conj::RelativeState rel = conj::combine_relative(event_);
  r_rel_cdm_ = rel.r;
  bplane_ = conj::project_bplane(rel.r, rel.v, rel.cov);
}

std::vector<dyn::SpacecraftState> Trajectory::node_states() const {
  std::vector<dyn::SpacecraftState> out;
  out.reserve(node_states_.size());
  for (std::size_t i = 0; i < node_states_.size(); ++i) {
    out.push_back(dimensional(node_states_[i], times_[i], units_, event_.dynamics.frame()));
  }
  return out;
}

dyn::SpacecraftState Trajectory::tca_state() const {
  return dimensional(tca_state_, 0.0, units_, event_.dynamics.frame());
}

std::vector<dyn::SpacecraftState> ballistic_reference(const conj::ConjunctionEvent& event,
                                                      const ControlSchedule& schedule,
                                                      const dyn::PropagationConfig& config) {
  return Trajectory(event, schedule, config).node_states();
}

double PocMap::to_scale(double poc) const {
  if (scale == PocScale::kLinear) return poc;
  if (!(poc > 0.0)) throw DomainError("log10 of a non-positive PoC", poc);
  return std::log(poc) * kInvLn10;
}

double PocMap::from_scale(double value) const {
  return scale == PocScale::kLinear ? value : std::pow(10.0, value);
}

double PocMap::predicted_poc(std::span<const double> phi) const { return from_scale(da::evaluate(poly, phi)); }

std::vector<Eigen::Vector3d> node_controls(const ControlSchedule& schedule, std::span<const Variable> variables,
                                           double unit, std::span<const double> phi) {
  if (phi.size() != variables.size()) {
    throw Error(ErrorKind::kConfiguration, "control vector has " + std::to_string(phi.size()) +
                                               " entries, the map has " + std::to_string(variables.size()));
  }
  std::vector<Eigen::Vector3d> out;
  out.reserve(schedule.nodes.size());
  for (const ControlNode& n : schedule.nodes) out.push_back(n.reference);
  for (std::size_t v = 0; v < variables.size(); ++v) {
    const Variable& var = variables[v];
    Eigen::Vector3d& u = out[static_cast<std::size_t>(var.node)];
    if (var.component < 0) {
      u += *schedule.nodes[static_cast<std::size_t>(var.node)].fixed_direction * (unit * phi[v]);
    } else {
      u[var.component] += unit * phi[v];
    }
  }
  return out;
}

PocMap build_poc_map(const conj::ConjunctionEvent& event, const ControlSchedule& schedule, int order,
                     const MapOptions& options) {
  if (order < 1) throw Error(ErrorKind::kConfiguration, "expansion order must be at least 1");
  const Trajectory traj(event, schedule, options.propagation);
  PocMap map;
  map.scale = options.scale;
  map.schedule = schedule;
  map.variables = layout_variables(schedule);
  map.unit = control_unit(schedule.mode);
  if (map.variables.empty()) throw Error(ErrorKind::kConfiguration, "schedule has no control variables");

  const da::AlgebraConfig cfg{static_cast<int>(map.variables.size()), order};
  da::validate(cfg);
  std::vector<std::array<da::TaylorPoly, 3>> controls(schedule.nodes.size());
  for (std::size_t i = 0; i < schedule.nodes.size(); ++i) {
    for (int k = 0; k < 3; ++k) controls[i][k] = da::TaylorPoly(cfg, schedule.nodes[i].reference[k]);
  }
  for (std::size_t v = 0; v < map.variables.size(); ++v) {
    const Variable& var = map.variables[v];
    const da::TaylorPoly x = da::TaylorPoly::variable(cfg, static_cast<int>(v));
    auto& u = controls[static_cast<std::size_t>(var.node)];
    if (var.component < 0) {
      const Eigen::Vector3d& dir = *schedule.nodes[static_cast<std::size_t>(var.node)].fixed_direction;
      for (int k = 0; k < 3; ++k) u[k].axpy(dir[k] * map.unit, x);
    } else {
      u[var.component].axpy(map.unit, x);
    }
  }

  const da::TaylorPoly poc = traj.poc<da::TaylorPoly>(controls);
  map.ballistic_poc = poc.constant_part();
  if (map.scale == PocScale::kLog10) {
    if (!(map.ballistic_poc > 0.0)) {
      throw DomainError("reference PoC is zero; a logarithmic map is undefined", map.ballistic_poc);
    }
    map.poly = da::log(poc) * kInvLn10;
  } else {
    map.poly = poc;
  }
  return map;
}

std::vector<NodeGradient> gradient_norm_per_node(const conj::ConjunctionEvent& event,
                                                 std::span<const double> candidate_times,
                                                 const ControlSchedule& node_template, double arc_seconds,
                                                 const dyn::PropagationConfig& config) {
  if (candidate_times.empty()) throw Error(ErrorKind::kConfiguration, "candidate grid is empty");
  const bool low_thrust = node_template.mode == ControlMode::kLowThrust;
  if (low_thrust && !(arc_seconds > 0.0)) {
    throw Error(ErrorKind::kConfiguration, "low-thrust ranking needs a positive arc length");
  }
  MapOptions options;
  options.scale = PocScale::kLinear;
  options.propagation = config;
  std::vector<NodeGradient> out;
  out.reserve(candidate_times.size());
  for (double t : candidate_times) {
    ControlSchedule s;
    s.mode = node_template.mode;
    s.frame = node_template.frame;
    ControlNode node;
    node.time = t;
    s.nodes.push_back(node);
    if (low_thrust) {
      ControlNode end;
      end.time = std::min(t + arc_seconds, 0.0);
      if (!(end.time > t)) {
        out.push_back({t, 0.0});
        continue;
      }
      s.nodes.push_back(end);
    }
    const PocMap map = build_poc_map(event, s, 1, options);
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      std::vector<int> e(3, 0);
      e[static_cast<std::size_t>(k)] = 1;
      const double g = map.poly.coefficient(e) / map.unit;
      sum += g * g;
    }
    out.push_back({t, std::sqrt(sum)});
  }
  return out;
}

}  // namespace cam::map
