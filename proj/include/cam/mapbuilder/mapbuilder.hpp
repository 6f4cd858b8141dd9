#pragma once

#include <Eigen/Core>
#include <array>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "cam/conjunction/conjunction.hpp"
#include "cam/da/taylor_poly.hpp"
#include "cam/dynamics/dynamics.hpp"
#include "cam/dynamics/integrator.hpp"

namespace cam::map {

enum class ControlMode { kImpulsive, kLowThrust };
enum class ControlFrame { kRtn, kSynodic, kInertial };
enum class PocScale { kLog10, kLinear };

/// Physical size of one scaled control variable.
inline constexpr double kImpulseUnit = 1.0;   // m/s
inline constexpr double kThrustUnit = 1e-4;   // m/s^2

struct ControlNode {
  double time = 0.0;  // seconds relative to TCA, <= 0
  std::optional<Eigen::Vector3d> fixed_direction;  // unit vector in the control frame
  double u_max = std::numeric_limits<double>::infinity();
  // Nodes without variables keep their reference control (m/s or m/s^2 in
  // the control frame); used for saturated nodes.
  bool active = true;
  Eigen::Vector3d reference = Eigen::Vector3d::Zero();
};

struct ControlSchedule {
  ControlMode mode = ControlMode::kImpulsive;
  ControlFrame frame = ControlFrame::kRtn;
  std::vector<ControlNode> nodes;
};

/// Nodes strictly increasing and <= 0; unit fixed directions; low thrust
/// needs two nodes (the last one closes the arc and is idle).
void validate(const ControlSchedule& schedule, const dyn::DynamicsModel& model);

/// Default control frame for a dynamics regime.
ControlFrame default_frame(const dyn::DynamicsModel& model);

/// One scalar unknown of the map.
struct Variable {
  int node = 0;
  int component = 0;  // 0..2, or -1 for the magnitude along a fixed direction
};

/// Unknowns in node order: three per active node, one when the direction is
/// fixed; the last low-thrust node carries none.
std::vector<Variable> layout_variables(const ControlSchedule& schedule);

double control_unit(ControlMode mode);

/// Ballistic trajectory of the primary sampled on the schedule, plus the
/// frozen B-plane data. Shared by the polynomial map and real-valued
/// validation so that both follow the same arithmetic.
class Trajectory {
 public:
  Trajectory(const conj::ConjunctionEvent& event, const ControlSchedule& schedule,
             const dyn::PropagationConfig& config = {});

  const conj::ConjunctionEvent& event() const noexcept { return event_; }
  const ControlSchedule& schedule() const noexcept { return schedule_; }
  const dyn::Units& units() const noexcept { return units_; }
  const conj::BPlaneProjection& bplane() const noexcept { return bplane_; }
  const Eigen::Matrix3d& frame(std::size_t node) const noexcept { return frames_[node]; }

  /// Ballistic states at the nodes (km, km/s; epochs in seconds).
  std::vector<dyn::SpacecraftState> node_states() const;
  /// Ballistic state at TCA after the back-then-forward round trip.
  dyn::SpacecraftState tca_state() const;

  /// Relative position at TCA (km) for per-node controls given in the
  /// control frame in physical units (m/s or m/s^2). Controls of idle nodes
  /// are ignored.
  template <class T>
  std::array<T, 3> relative_position(std::span<const std::array<T, 3>> controls) const;

  /// B-plane coordinates (km) and PoC for the given controls.
  template <class T>
  std::array<T, 2> bplane_position(std::span<const std::array<T, 3>> controls) const {
    return conj::bplane_coordinates<T>(bplane_.basis, relative_position<T>(controls));
  }
  template <class T>
  T poc(std::span<const std::array<T, 3>> controls) const {
    return conj::poc_chan<T>(bplane_position<T>(controls), bplane_.p_b, event_.hbr);
  }

 private:
  int steps(std::size_t segment) const noexcept { return steps_[segment]; }

  conj::ConjunctionEvent event_;
  ControlSchedule schedule_;
  dyn::PropagationConfig config_;
  dyn::Units units_;
  dyn::NdModel model_;
  double control_to_nd_ = 1.0;
  std::vector<double> times_;                   // node times, nondimensional
  std::vector<dyn::State6<double>> node_states_;  // ballistic, nondimensional
  std::vector<Eigen::Matrix3d> frames_;          // control frame rows per node
  std::vector<int> steps_;                        // per segment; last one ends at TCA
  dyn::State6<double> tca_state_{};
  Eigen::Vector3d r_rel_cdm_ = Eigen::Vector3d::Zero();
  conj::BPlaneProjection bplane_;
};

/// Ballistic node states (back-propagated to the first node, then forward).
std::vector<dyn::SpacecraftState> ballistic_reference(const conj::ConjunctionEvent& event,
                                                      const ControlSchedule& schedule,
                                                      const dyn::PropagationConfig& config = {});

struct MapOptions {
  PocScale scale = PocScale::kLog10;
  dyn::PropagationConfig propagation;
};

/// log10 written as log(x) * (1 / ln 10) so that real and polynomial
/// evaluations share one arithmetic path.
inline constexpr double kInvLn10 = 1.0 / std::numbers::ln10;

struct PocMap {
  da::TaylorPoly poly;   // PoC (or log10 PoC) in scaled control variables
  double ballistic_poc = 0.0;  // PoC at the reference controls
  PocScale scale = PocScale::kLog10;
  ControlSchedule schedule;
  std::vector<Variable> variables;
  double unit = kImpulseUnit;  // physical size of one variable

  int order() const { return poly.max_order(); }
  std::size_t size() const { return variables.size(); }
  /// PoC expressed on the map's scale.
  double to_scale(double poc) const;
  double from_scale(double value) const;
  /// PoC predicted by the map at a scaled variable vector.
  double predicted_poc(std::span<const double> phi) const;
};

PocMap build_poc_map(const conj::ConjunctionEvent& event, const ControlSchedule& schedule, int order,
                     const MapOptions& options = {});

/// Per-node controls (control frame, physical units) for a scaled variable
/// vector, including the nodes' reference controls.
std::vector<Eigen::Vector3d> node_controls(const ControlSchedule& schedule, std::span<const Variable> variables,
                                           double unit, std::span<const double> phi);

struct NodeGradient {
  double time = 0.0;
  double norm = 0.0;  // |dPoC/du| per m/s (or per m/s^2)
};

/// First-order map per candidate time, each with a single free node built
/// from `node_template` (mode and frame). For low thrust each candidate opens
/// an arc of `arc_seconds`.
std::vector<NodeGradient> gradient_norm_per_node(const conj::ConjunctionEvent& event,
                                                 std::span<const double> candidate_times,
                                                 const ControlSchedule& node_template, double arc_seconds = 0.0,
                                                 const dyn::PropagationConfig& config = {});

// ---------------------------------------------------------------------------

template <class T>
std::array<T, 3> Trajectory::relative_position(std::span<const std::array<T, 3>> controls) const {
  if (controls.size() != schedule_.nodes.size()) {
    throw Error(ErrorKind::kConfiguration, "one control vector per node is required");
  }
  const std::size_t n = schedule_.nodes.size();
  const bool impulsive = schedule_.mode == ControlMode::kImpulsive;

  // Control of node i in nondimensional inertial components.
  auto inertial = [&](std::size_t i) {
    const Eigen::Matrix3d& R = frames_[i];
    std::array<T, 3> out;
    for (int k = 0; k < 3; ++k) {
      out[k] = controls[i][0] * (R(0, k) * control_to_nd_);
      out[k] += controls[i][1] * (R(1, k) * control_to_nd_);
      out[k] += controls[i][2] * (R(2, k) * control_to_nd_);
    }
    return out;
  };

  dyn::State6<T> x;
  for (int k = 0; k < 6; ++k) {
    if constexpr (std::is_same_v<T, da::TaylorPoly>) {
      x[k] = da::TaylorPoly(controls[0][0].algebra_ptr(), node_states_[0][k]);
    } else {
      x[k] = node_states_[0][k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = times_[i];
    const double t1 = i + 1 < n ? times_[i + 1] : 0.0;
    if (impulsive) {
      const auto dv = inertial(i);
      for (int k = 0; k < 3; ++k) x[k + 3] += dv[k];
      dyn::propagate_fixed<T>(model_, x, nullptr, t0, t1, steps(i), units_.time);
    } else if (i + 1 < n) {
      const auto u = inertial(i);
      dyn::propagate_fixed<T>(model_, x, &u, t0, t1, steps(i), units_.time);
    } else {
      dyn::propagate_fixed<T>(model_, x, nullptr, t0, t1, steps(i), units_.time);
    }
  }
  std::array<T, 3> r;
  for (int k = 0; k < 3; ++k) {
    r[k] = (x[k] - tca_state_[k]) * units_.length;
    r[k] += r_rel_cdm_[k];
  }
  return r;
}

}  // namespace cam::map
