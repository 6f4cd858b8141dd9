#pragma once

// Equations of motion and the fixed-step RK7(8) scheme, generic over the
// scalar type (double or da::TaylorPoly). Both instantiations perform the same
// sequence of floating-point operations on the constant part, so evaluating a
// propagated polynomial at zero reproduces the real-valued propagation.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cam/da/taylor_poly.hpp"
#include "cam/dynamics/dynamics.hpp"
#include "cam/error.hpp"

namespace cam::dyn {

template <class T>
using State6 = std::array<T, 6>;
template <class T>
using Vec3T = std::array<T, 3>;

/// Model constants in the units of the integration.
struct NdModel {
  ModelKind kind = ModelKind::kKepler;
  double mu = 1.0;
  double j2_factor = 0.0;  // 1.5 * J2 * R_E^2
  double mass_ratio = 0.0;
};

NdModel make_nd_model(const DynamicsModel& model, const Units& units);

inline double constant_of(double x) { return x; }
inline double constant_of(const da::TaylorPoly& x) { return x.constant_part(); }

inline void add_scaled(double& y, double a, double x) { y += a * x; }
inline void add_scaled(da::TaylorPoly& y, double a, const da::TaylorPoly& x) { y.axpy(a, x); }

namespace rk78 {

inline constexpr int kStages = 13;

inline constexpr std::array<double, kStages> c = {
    0.0, 2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 1.0 / 2.0, 5.0 / 6.0,
    1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0, 1.0};

inline constexpr std::array<std::array<double, kStages>, kStages> a = {{
    {},
    {2.0 / 27.0},
    {1.0 / 36.0, 1.0 / 12.0},
    {1.0 / 24.0, 0.0, 1.0 / 8.0},
    {5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0},
    {1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0},
    {-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0},
    {31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0},
    {2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0},
    {-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0, -19.0 / 60.0, 17.0 / 6.0,
     -1.0 / 12.0},
    {2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -301.0 / 82.0, 2133.0 / 4100.0,
     45.0 / 82.0, 45.0 / 164.0, 18.0 / 41.0},
    {3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0, 3.0 / 41.0, 6.0 / 41.0, 0.0},
    {-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -289.0 / 82.0, 2193.0 / 4100.0,
     51.0 / 82.0, 33.0 / 164.0, 12.0 / 41.0, 0.0, 1.0},
}};

// Eighth-order weights.
inline constexpr std::array<double, kStages> b = {
    0.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105.0, 9.0 / 35.0, 9.0 / 35.0, 9.0 / 280.0, 9.0 / 280.0, 0.0,
    41.0 / 840.0, 41.0 / 840.0};

// Seventh-order weights of the embedded pair.
inline constexpr std::array<double, kStages> b7 = {
    41.0 / 840.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105.0, 9.0 / 35.0, 9.0 / 35.0, 9.0 / 280.0, 9.0 / 280.0,
    41.0 / 840.0, 0.0, 0.0};

}  // namespace rk78

namespace detail {

[[noreturn]] inline void singular(const char* what, double t) {
  throw PropagationError(ErrorKind::kSingularity, std::string(what) + " at t=" + std::to_string(t), t);
}

inline void require_finite(double x, double t) {
  if (!std::isfinite(x)) {
    throw PropagationError(ErrorKind::kPropagation, "non-finite state at t=" + std::to_string(t), t);
  }
}

constexpr double kMinRadius2 = 1e-30;

// Squared distance below which a body of gravitational parameter mu cannot be
// resolved by a step of size h (the step spans more than ~10 free-fall times).
inline double unresolved_radius2(double mu, double h) {
  const double r = 0.215 * std::cbrt(mu * h * h);
  return std::max(kMinRadius2, r * r);
}

}  // namespace detail

/// Acceleration (without the kinematic part) for the given position and
/// velocity. `t` only stamps errors; `h` is the step size used to detect
/// passages too close to a gravitating body.
template <class T>
Vec3T<T> acceleration(const NdModel& m, const State6<T>& x, const Vec3T<T>* u, double t, double h = 0.0) {
  using std::pow;
  Vec3T<T> acc;
  if (m.kind != ModelKind::kCr3bp) {
    const T r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    const double r2c = constant_of(r2);
    detail::require_finite(r2c, t);
    if (r2c < detail::unresolved_radius2(m.mu, h)) detail::singular("collision with the central body", t);
    if (m.kind == ModelKind::kKepler) {
      const T g = pow(r2, -1.5) * (-m.mu);
      for (int i = 0; i < 3; ++i) acc[i] = x[i] * g;
    } else {
      const T inv_r = pow(r2, -0.5);
      const T inv_r2 = inv_r * inv_r;
      const T inv_r3 = inv_r2 * inv_r;
      const T k = inv_r2 * m.j2_factor;
      const T z2r2 = x[2] * x[2] * inv_r2;
      const T fxy = 1.0 + k * (1.0 - 5.0 * z2r2);
      const T fz = 1.0 + k * (3.0 - 5.0 * z2r2);
      const T g = inv_r3 * (-m.mu);
      acc[0] = x[0] * g * fxy;
      acc[1] = x[1] * g * fxy;
      acc[2] = x[2] * g * fz;
    }
  } else {
    const double mu = m.mass_ratio;
    const T dx1 = x[0] + mu;
    const T dx2 = x[0] - (1.0 - mu);
    const T yz2 = x[1] * x[1] + x[2] * x[2];
    const T r1sq = dx1 * dx1 + yz2;
    const T r2sq = dx2 * dx2 + yz2;
    detail::require_finite(constant_of(r1sq) + constant_of(r2sq), t);
    if (constant_of(r1sq) < detail::unresolved_radius2(1.0 - mu, h)) detail::singular("coincident with the primary", t);
    if (constant_of(r2sq) < detail::unresolved_radius2(mu, h)) detail::singular("coincident with the secondary", t);
    const T g1 = pow(r1sq, -1.5) * (1.0 - mu);
    const T g2 = pow(r2sq, -1.5) * mu;
    // Gradient of Omega = -(1-mu)/r1 - mu/r2 - (x^2+y^2+z^2)/2.
    const T ox = dx1 * g1 + dx2 * g2 - x[0];
    const T g12 = g1 + g2;
    const T oy = x[1] * g12 - x[1];
    const T oz = x[2] * g12 - x[2];
    acc[0] = 2.0 * x[4] - ox;
    acc[1] = -2.0 * x[3] - oy;
    acc[2] = -x[2] - oz;
  }
  if (u) {
    for (int i = 0; i < 3; ++i) acc[i] += (*u)[i];
  }
  return acc;
}

template <class T>
void derivative(const NdModel& m, const State6<T>& x, const Vec3T<T>* u, State6<T>& dx, double t,
                double h = 0.0) {
  const Vec3T<T> acc = acceleration(m, x, u, t, h);
  for (int i = 0; i < 3; ++i) {
    dx[i] = x[i + 3];
    dx[i + 3] = acc[i];
  }
}

/// One RK7(8) step of size h (may be negative) from time t.
template <class T>
void rk78_step(const NdModel& m, State6<T>& x, const Vec3T<T>* u, double t, double h, double time_unit = 1.0) {
  std::array<State6<T>, rk78::kStages> k;
  State6<T> tmp;
  for (int s = 0; s < rk78::kStages; ++s) {
    tmp = x;
    for (int j = 0; j < s; ++j) {
      const double a = rk78::a[s][j];
      if (a == 0.0) continue;
      for (int i = 0; i < 6; ++i) add_scaled(tmp[i], h * a, k[j][i]);
    }
    derivative(m, tmp, u, k[s], (t + rk78::c[s] * h) * time_unit, h);
  }
  for (int j = 0; j < rk78::kStages; ++j) {
    const double b = rk78::b[j];
    if (b == 0.0) continue;
    for (int i = 0; i < 6; ++i) add_scaled(x[i], h * b, k[j][i]);
  }
  for (int i = 0; i < 6; ++i) detail::require_finite(constant_of(x[i]), (t + h) * time_unit);
}

/// Fixed-step propagation from t0 to t1 with `steps` equal steps. Times are
/// nondimensional; `time_unit` converts them for error reports.
template <class T>
void propagate_fixed(const NdModel& m, State6<T>& x, const Vec3T<T>* u, double t0, double t1, int steps,
                     double time_unit = 1.0) {
  if (steps < 1) throw Error(ErrorKind::kConfiguration, "step count must be positive");
  if (t1 == t0) return;
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) rk78_step(m, x, u, t0 + i * h, h, time_unit);
}

}  // namespace cam::dyn
