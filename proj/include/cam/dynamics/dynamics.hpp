#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>
#include <vector>

namespace cam::dyn {

enum class Frame { kEci, kSynodic };
enum class ModelKind { kKepler, kJ2, kCr3bp };

/// Position and velocity in km and km/s (ECI), or nondimensional (synodic).
/// Epoch in seconds relative to TCA.
struct SpacecraftState {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  double epoch = 0.0;
  Frame frame = Frame::kEci;
};

struct DynamicsModel {
  ModelKind kind = ModelKind::kKepler;
  double mu = 398600.4418;     // km^3/s^2
  double r_e = 6378.137;       // km
  double j2 = 1.08262668e-3;
  // Earth-Moon system.
  double mass_ratio = 0.012150585609624;
  double char_length = 384405.0;  // km
  double char_time = 375677.0;    // s
  double char_mass = 6.04564e15;  // kg

  static DynamicsModel kepler();
  static DynamicsModel earth_j2();
  static DynamicsModel cr3bp();

  bool earth() const noexcept { return kind != ModelKind::kCr3bp; }
  Frame frame() const noexcept { return earth() ? Frame::kEci : Frame::kSynodic; }
};

/// Throws a configuration error for non-positive constants.
void validate(const DynamicsModel& model);

struct PropagationConfig {
  int steps_per_segment = 100;
  // Largest nondimensional step; <= 0 selects 1% of the reference circular
  // period for Earth models and 0.001 for CR3BP.
  double max_step = 0.0;
};

/// Length and time scales of the internal nondimensional units.
struct Units {
  double length = 1.0;
  double time = 1.0;
  double velocity() const noexcept { return length / time; }
  double acceleration() const noexcept { return length / (time * time); }
};

/// Earth: L = reference radius, V = sqrt(mu / L), T = L / V so that mu = 1.
/// CR3BP: the characteristic length and time of the model.
Units make_units(const DynamicsModel& model, double reference_radius);

/// Nondimensional step limit actually used for `model`.
double max_step(const DynamicsModel& model, const PropagationConfig& config);

/// Number of fixed steps for a span of |dt| nondimensional time units.
int step_count(const PropagationConfig& config, double dt, double max_step);

/// Acceleration of the two-body (+J2) model in km/s^2 including control u.
Eigen::Vector3d accel_kepler_j2(const SpacecraftState& state, const Eigen::Vector3d& u,
                                const DynamicsModel& model);

/// Synodic-frame CR3BP acceleration (nondimensional) including control u.
Eigen::Vector3d accel_cr3bp(const SpacecraftState& state, const Eigen::Vector3d& u, const DynamicsModel& model);

/// Constant control acceleration over [t_begin, t_end] (km/s^2 ECI, or
/// nondimensional synodic).
struct ControlSegment {
  double t_begin = 0.0;
  double t_end = 0.0;
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
};

/// Fixed-step RK7(8) propagation from state.epoch to t1 (either direction).
/// Epochs and t1 are seconds for Earth models and nondimensional for CR3BP.
/// Segments that do not overlap the interval are ignored.
SpacecraftState propagate(const SpacecraftState& state, double t1, const DynamicsModel& model,
                          const PropagationConfig& config = {}, std::span<const ControlSegment> controls = {});

/// Rows are the radial, transverse and normal unit vectors.
Eigen::Matrix3d rtn_rotation(const SpacecraftState& state);

double specific_energy(const SpacecraftState& state, double mu);
double jacobi_constant(const SpacecraftState& state, double mass_ratio);

/// Osculating two-body period; throws a domain error for unbound orbits.
double orbital_period(const SpacecraftState& state, double mu);

/// Classical elements (km, rad) to ECI state.
SpacecraftState state_from_elements(double a, double e, double inc, double raan, double argp,
                                    double true_anomaly, double mu);

}  // namespace cam::dyn
