#include "cam/dynamics/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "cam/dynamics/integrator.hpp"
#include "cam/error.hpp"

namespace cam::dyn {
namespace {

State6<double> to_array(const Eigen::Vector3d& r, const Eigen::Vector3d& v) {
  return {r.x(), r.y(), r.z(), v.x(), v.y(), v.z()};
}

void require_frame(const SpacecraftState& s, Frame f) {
  if (s.frame != f) throw Error(ErrorKind::kFrame, "state frame does not match the dynamics model");
}

}  // namespace

DynamicsModel DynamicsModel::kepler() { return {}; }

DynamicsModel DynamicsModel::earth_j2() {
  DynamicsModel m;
  m.kind = ModelKind::kJ2;
  return m;
}

DynamicsModel DynamicsModel::cr3bp() {
  DynamicsModel m;
  m.kind = ModelKind::kCr3bp;
  return m;
}

void validate(const DynamicsModel& m) {
  if (m.earth()) {
    if (!(m.mu > 0.0) || !(m.r_e > 0.0) || !std::isfinite(m.j2)) {
      throw Error(ErrorKind::kConfiguration, "Earth model needs mu > 0, R_E > 0 and finite J2");
    }
  } else if (!(m.mass_ratio > 0.0 && m.mass_ratio < 0.5) || !(m.char_length > 0.0) || !(m.char_time > 0.0)) {
    throw Error(ErrorKind::kConfiguration, "CR3BP model needs 0 < mass ratio < 0.5 and positive scales");
  }
}

Units make_units(const DynamicsModel& model, double reference_radius) {
  if (!model.earth()) return {model.char_length, model.char_time};
  if (!(reference_radius > 0.0)) throw Error(ErrorKind::kConfiguration, "reference radius must be positive");
  const double v = std::sqrt(model.mu / reference_radius);
  return {reference_radius, reference_radius / v};
}

NdModel make_nd_model(const DynamicsModel& model, const Units& units) {
  NdModel m;
  m.kind = model.kind;
  if (model.earth()) {
    m.mu = model.mu * units.time * units.time / (units.length * units.length * units.length);
    // Exactly one in the canonical units built by make_units.
    if (std::abs(m.mu - 1.0) < 1e-12) m.mu = 1.0;
    const double re = model.r_e / units.length;
    m.j2_factor = model.kind == ModelKind::kJ2 ? 1.5 * model.j2 * re * re : 0.0;
  } else {
    m.mass_ratio = model.mass_ratio;
  }
  return m;
}

double max_step(const DynamicsModel& model, const PropagationConfig& config) {
  if (config.max_step > 0.0) return config.max_step;
  return model.earth() ? 0.02 * std::numbers::pi : 0.001;
}

int step_count(const PropagationConfig& config, double dt, double max_step) {
  if (config.steps_per_segment < 1) throw Error(ErrorKind::kConfiguration, "steps per segment must be >= 1");
  const double need = std::ceil(std::abs(dt) / max_step);
  return std::max(config.steps_per_segment, static_cast<int>(std::min(need, 1e8)));
}

Eigen::Vector3d accel_kepler_j2(const SpacecraftState& state, const Eigen::Vector3d& u, const DynamicsModel& model) {
  require_frame(state, Frame::kEci);
  if (!model.earth()) throw Error(ErrorKind::kConfiguration, "accel_kepler_j2 needs an Earth model");
  const NdModel m = make_nd_model(model, Units{});
  const auto x = to_array(state.r, state.v);
  const Vec3T<double> uu = {u.x(), u.y(), u.z()};
  const auto a = acceleration(m, x, &uu, state.epoch);
  return {a[0], a[1], a[2]};
}

Eigen::Vector3d accel_cr3bp(const SpacecraftState& state, const Eigen::Vector3d& u, const DynamicsModel& model) {
  require_frame(state, Frame::kSynodic);
  if (model.earth()) throw Error(ErrorKind::kConfiguration, "accel_cr3bp needs a CR3BP model");
  const NdModel m = make_nd_model(model, Units{model.char_length, model.char_time});
  const auto x = to_array(state.r, state.v);
  const Vec3T<double> uu = {u.x(), u.y(), u.z()};
  const auto a = acceleration(m, x, &uu, state.epoch);
  return {a[0], a[1], a[2]};
}

SpacecraftState propagate(const SpacecraftState& state, double t1, const DynamicsModel& model,
                          const PropagationConfig& config, std::span<const ControlSegment> controls) {
  validate(model);
  require_frame(state, model.frame());
  const bool earth = model.earth();
  // CR3BP epochs are already nondimensional.
  const Units units = earth ? make_units(model, state.r.norm()) : Units{};
  const Units accel_units = earth ? units : Units{};
  const NdModel m = make_nd_model(model, earth ? units : Units{model.char_length, model.char_time});
  const double hmax = max_step(model, config);

  // Breakpoints: the interval ends plus every control boundary inside it.
  const double t0 = state.epoch;
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  std::vector<double> cuts = {t0, t1};
  for (const auto& seg : controls) {
    for (double t : {seg.t_begin, seg.t_end}) {
      if (t > lo && t < hi) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (t1 < t0) std::reverse(cuts.begin(), cuts.end());

  auto x = to_array(state.r / units.length, state.v / units.velocity());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double mid = 0.5 * (a + b);
    Vec3T<double> u = {0.0, 0.0, 0.0};
    bool active = false;
    for (const auto& seg : controls) {
      if (mid > std::min(seg.t_begin, seg.t_end) && mid < std::max(seg.t_begin, seg.t_end)) {
        for (int k = 0; k < 3; ++k) u[k] += seg.u[k] / accel_units.acceleration();
        active = true;
      }
    }
    const double ta = a / units.time, tb = b / units.time;
    propagate_fixed(m, x, active ? &u : nullptr, ta, tb, step_count(config, tb - ta, hmax), units.time);
  }
  SpacecraftState out;
  out.r = Eigen::Vector3d(x[0], x[1], x[2]) * units.length;
  out.v = Eigen::Vector3d(x[3], x[4], x[5]) * units.velocity();
  out.epoch = t1;
  out.frame = state.frame;
  return out;
}

Eigen::Matrix3d rtn_rotation(const SpacecraftState& state) {
  const double rn = state.r.norm();
  const Eigen::Vector3d h = state.r.cross(state.v);
  const double hn = h.norm();
  if (!(rn > 0.0) || !(hn > 1e-12 * rn * state.v.norm()) || !std::isfinite(hn)) {
    throw Error(ErrorKind::kFrame, "RTN frame undefined: position and velocity are parallel or zero");
  }
  const Eigen::Vector3d R = state.r / rn;
  const Eigen::Vector3d N = h / hn;
  const Eigen::Vector3d T = N.cross(R);
  Eigen::Matrix3d rot;
  rot.row(0) = R;
  rot.row(1) = T;
  rot.row(2) = N;
  return rot;
}

double specific_energy(const SpacecraftState& s, double mu) { return 0.5 * s.v.squaredNorm() - mu / s.r.norm(); }

double jacobi_constant(const SpacecraftState& s, double mu) {
  const Eigen::Vector3d& r = s.r;
  const double r1 = std::sqrt((r.x() + mu) * (r.x() + mu) + r.y() * r.y() + r.z() * r.z());
  const double r2 = std::sqrt((r.x() - 1.0 + mu) * (r.x() - 1.0 + mu) + r.y() * r.y() + r.z() * r.z());
  const double u = 0.5 * (r.x() * r.x() + r.y() * r.y()) + (1.0 - mu) / r1 + mu / r2;
  return 2.0 * u - s.v.squaredNorm();
}

double orbital_period(const SpacecraftState& s, double mu) {
  const double energy = specific_energy(s, mu);
  if (!(energy < 0.0)) throw DomainError("orbit is not bound; period undefined", energy);
  const double a = -mu / (2.0 * energy);
  return 2.0 * std::numbers::pi * std::sqrt(a * a * a / mu);
}

SpacecraftState state_from_elements(double a, double e, double inc, double raan, double argp, double nu,
                                    double mu) {
  if (!(a > 0.0) || !(e >= 0.0 && e < 1.0)) throw DomainError("elements must describe an ellipse", e);
  const double p = a * (1.0 - e * e);
  const double r = p / (1.0 + e * std::cos(nu));
  const Eigen::Vector3d r_pf(r * std::cos(nu), r * std::sin(nu), 0.0);
  const double k = std::sqrt(mu / p);
  const Eigen::Vector3d v_pf(-k * std::sin(nu), k * (e + std::cos(nu)), 0.0);
  const Eigen::Matrix3d rot = (Eigen::AngleAxisd(raan, Eigen::Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(inc, Eigen::Vector3d::UnitX()) *
                               Eigen::AngleAxisd(argp, Eigen::Vector3d::UnitZ()))
                                  .toRotationMatrix();
  SpacecraftState s;
  s.r = rot * r_pf;
  s.v = rot * v_pf;
  return s;
}

}  // namespace cam::dyn
