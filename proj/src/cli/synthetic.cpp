#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "cam/cli/scenario.hpp"

namespace cam::cli {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxAttempts = 5000;

// Platform-independent uniform draws (std distributions are not portable).
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }
  double log_uniform(double lo, double hi) { return lo * std::pow(hi / lo, (*this)()); }

 private:
  std::mt19937_64 rng_;
};

// Uniformly distributed rotation (Shoemake).
Eigen::Matrix3d random_rotation(Uniform& u) {
  const double u1 = u(), u2 = u(), u3 = u();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const Eigen::Quaterniond q(b * std::cos(2 * kPi * u3), a * std::sin(2 * kPi * u2), a * std::cos(2 * kPi * u2),
                             b * std::sin(2 * kPi * u3));
  return q.normalized().toRotationMatrix();
}

Eigen::Vector3d random_unit(Uniform& u) {
  const double z = u(-1.0, 1.0), phi = u(0.0, 2 * kPi);
  const double s = std::sqrt(1.0 - z * z);
  return {s * std::cos(phi), s * std::sin(phi), z};
}

conj::Matrix6d random_covariance(Uniform& u) {
  const Eigen::Matrix3d q = random_rotation(u);
  const Eigen::Vector3d sigma(u.log_uniform(0.1, 2.0), u.log_uniform(0.1, 2.0), u.log_uniform(0.1, 2.0));
  conj::Matrix6d c = conj::Matrix6d::Zero();
  c.topLeftCorner<3, 3>() = q * sigma.cwiseProduct(sigma).asDiagonal() * q.transpose();
  c.topLeftCorner<3, 3>() = 0.5 * (c.topLeftCorner<3, 3>() + c.topLeftCorner<3, 3>().transpose()).eval();
  c.bottomRightCorner<3, 3>() = Eigen::Matrix3d::Identity() * 1e-10;
  return c;
}

// Places the secondary so that the encounter has the drawn miss distance at
// TCA and the PoC lands in the accepted band.
bool place_secondary(Uniform& u, conj::ConjunctionEvent& e) {
  const Eigen::Vector3d v_rel = e.primary.v - e.secondary.v;
  const Eigen::Vector3d eta = v_rel.normalized();
  Eigen::Vector3d e1 = e.primary.r - e.primary.r.dot(eta) * eta;
  e1.normalize();
  const Eigen::Vector3d e2 = eta.cross(e1);
  e.cov_primary = random_covariance(u);
  e.cov_secondary = random_covariance(u);
  e.hbr = u(5.0, 50.0) * 1e-3;
  const Eigen::Matrix3d cov = (e.cov_primary + e.cov_secondary).topLeftCorner<3, 3>();
  const double sigma_max = std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(cov).eigenvalues()[2]);
  const double d = u(0.0, 4.0) * sigma_max;
  const double psi = u(0.0, 2 * kPi);
  const Eigen::Vector3d r_rel = d * (std::cos(psi) * e1 + std::sin(psi) * e2);
  e.secondary.r = e.primary.r - r_rel;
  const conj::RelativeState rel = conj::combine_relative(e);
  const conj::BPlaneProjection bp = conj::project_bplane(rel.r, rel.v, rel.cov);
  const double poc = conj::poc_quadrature(bp.r_b, bp.p_b, e.hbr);
  return poc >= 1e-5 && poc <= 1e-2;
}

ScenarioFile leo_scenario(Uniform& u, int index) {
  const dyn::DynamicsModel model = dyn::DynamicsModel::kepler();
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    ScenarioFile sc;
    auto& e = sc.event;
    e.dynamics = model;
    const double a = model.r_e + u(400.0, 1200.0);
    const double ecc = u(0.0, 0.01);
    const double inc = std::acos(1.0 - 2.0 * u());
    e.primary = dyn::state_from_elements(a, ecc, inc, u(0.0, 2 * kPi), u(0.0, 2 * kPi), u(0.0, 2 * kPi), model.mu);
    // Secondary: same speed, velocity rotated about the local vertical.
    const double crossing = u(30.0, 150.0) * kPi / 180.0;
    e.secondary = e.primary;
    e.secondary.v = Eigen::AngleAxisd(crossing, e.primary.r.normalized()) * e.primary.v;
    if (!place_secondary(u, e)) continue;
    char name[32];
    std::snprintf(name, sizeof name, "leo-%03d", index);
    sc.name = name;
    sc.defaults.order = 5;
    sc.defaults.mode = "impulse";
    sc.defaults.node_orbits = std::vector<double>{0.5};
    sc.defaults.target_poc = 1e-6;
    return sc;
  }
  throw Error(ErrorKind::kGeneration, "rejection sampling exhausted for LEO scenario " + std::to_string(index));
}

ScenarioFile cislunar_scenario(Uniform& u, int index) {
  const dyn::DynamicsModel model = dyn::DynamicsModel::cr3bp();
  const double L = model.char_length, V = model.char_length / model.char_time;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    ScenarioFile sc;
    auto& e = sc.event;
    e.dynamics = model;
    // Keep away from perilune (half a period from the reference state).
    double phase = u(0.15, 0.35);
    if (u() < 0.5) phase += 0.5;
    const dyn::SpacecraftState nd = dyn::propagate(nrho_initial_state(), phase * kNrhoPeriod, model);
    e.primary.r = nd.r * L;
    e.primary.v = nd.v * V;
    e.primary.epoch = 0.0;
    e.primary.frame = dyn::Frame::kSynodic;
    e.secondary = e.primary;
    e.secondary.v = e.primary.v - random_unit(u) * u(0.1, 0.5);
    if (!place_secondary(u, e)) continue;
    char name[32];
    std::snprintf(name, sizeof name, "cislunar-%03d", index);
    sc.name = name;
    sc.defaults.order = 5;
    sc.defaults.mode = "impulse";
    sc.defaults.node_seconds = std::vector<double>{-0.2 * model.char_time};
    sc.defaults.target_poc = 1e-6;
    return sc;
  }
  throw Error(ErrorKind::kGeneration, "rejection sampling exhausted for cislunar scenario " + std::to_string(index));
}

}  // namespace

dyn::SpacecraftState nrho_initial_state() {
  dyn::SpacecraftState s;
  s.r = {1.021968177072928, 0.0, -0.182096990922560};
  s.v = {0.0, -0.102830399531967, 0.0};
  s.frame = dyn::Frame::kSynodic;
  return s;
}

std::vector<ScenarioFile> generate_synthetic_suite(std::uint64_t seed, int count, Regime regime) {
  if (count < 1) throw Error(ErrorKind::kConfiguration, "scenario count must be at least 1");
  Uniform u(seed);
  std::vector<ScenarioFile> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(regime == Regime::kLeo ? leo_scenario(u, i) : cislunar_scenario(u, i));
  }
  return out;
}

}  // namespace cam::cli
