#include <cmath>

#include "cam/cli/scenario.hpp"
#include "cam/mapbuilder/mapbuilder.hpp"
#include "doctest.h"

using namespace cam;
using namespace cam::map;

namespace {

const std::vector<cli::ScenarioFile>& leo_suite() {
  static const auto suite = cli::generate_synthetic_suite(42, 4, cli::Regime::kLeo);
  return suite;
}

double period(const conj::ConjunctionEvent& e) { return dyn::orbital_period(e.primary, e.dynamics.mu); }

ControlSchedule impulses(std::initializer_list<double> times) {
  ControlSchedule s;
  for (double t : times) {
    ControlNode n;
    n.time = t;
    s.nodes.push_back(n);
  }
  return s;
}

std::vector<std::array<double, 3>> zero_controls(std::size_t n) { return std::vector<std::array<double, 3>>(n); }

double central(const Trajectory& traj, std::size_t node, int k, double h) {
  auto plus = zero_controls(traj.schedule().nodes.size());
  auto minus = plus;
  plus[node][static_cast<std::size_t>(k)] = h;
  minus[node][static_cast<std::size_t>(k)] = -h;
  return (traj.poc<double>(plus) - traj.poc<double>(minus)) / (2.0 * h);
}

// Central difference of the real pipeline along one control component,
// Richardson-extrapolated from steps h and h/2 (control units).
double fd_component(const Trajectory& traj, std::size_t node, int k, double h) {
  return (4.0 * central(traj, node, k, 0.5 * h) - central(traj, node, k, h)) / 3.0;
}

double linear_coefficient(const PocMap& m, int var) {
  std::vector<int> e(m.size(), 0);
  e[static_cast<std::size_t>(var)] = 1;
  return m.poly.coefficient(e);
}

}  // namespace

TEST_CASE("map constant part is the ballistic PoC") {
  for (const auto& sc : leo_suite()) {
    const auto s = impulses({-0.5 * period(sc.event)});
    MapOptions lin;
    lin.scale = PocScale::kLinear;
    const PocMap m = build_poc_map(sc.event, s, 3, lin);
    const double ref = conj::ballistic_poc(sc.event);
    CHECK(std::abs(m.ballistic_poc - ref) <= 1e-12 * ref);
    const std::vector<double> zero(m.size(), 0.0);
    CHECK(da::evaluate(m.poly, zero) == m.ballistic_poc);

    const PocMap lg = build_poc_map(sc.event, s, 3);
    CHECK(lg.poly.constant_part() == std::log(lg.ballistic_poc) * kInvLn10);
    CHECK(lg.predicted_poc(zero) == doctest::Approx(ref).epsilon(1e-12));

    // Real pipeline with zero controls takes the same arithmetic path.
    const Trajectory traj(sc.event, s);
    CHECK(traj.poc<double>(zero_controls(1)) == m.ballistic_poc);
  }
}

TEST_CASE("variable layout") {
  const auto& e = leo_suite()[0].event;
  const double p = period(e);
  auto s = impulses({-1.5 * p, -1.0 * p, -0.5 * p});
  CHECK(layout_variables(s).size() == 9);
  const PocMap m = build_poc_map(e, s, 2);
  CHECK(m.size() == 9);
  CHECK(m.poly.n_vars() == 9);

  for (auto& n : s.nodes) n.fixed_direction = Eigen::Vector3d::UnitY();
  CHECK(layout_variables(s).size() == 3);
  CHECK(build_poc_map(e, s, 2).poly.n_vars() == 3);

  s = impulses({-1.5 * p, -1.0 * p, -0.5 * p});
  s.mode = ControlMode::kLowThrust;
  CHECK(layout_variables(s).size() == 6);  // last node idle
  s.nodes[0].active = false;
  CHECK(layout_variables(s).size() == 3);
}

TEST_CASE("schedule validation") {
  const auto& e = leo_suite()[0].event;
  CHECK_THROWS_AS(build_poc_map(e, impulses({}), 2), Error);
  CHECK_THROWS_AS(build_poc_map(e, impulses({-100.0, -200.0}), 2), Error);
  CHECK_THROWS_AS(build_poc_map(e, impulses({-100.0, -100.0}), 2), Error);
  CHECK_THROWS_AS(build_poc_map(e, impulses({10.0}), 2), Error);
  CHECK_THROWS_AS(build_poc_map(e, impulses({-100.0}), 0), Error);
  auto s = impulses({-100.0});
  s.mode = ControlMode::kLowThrust;
  CHECK_THROWS_AS(build_poc_map(e, s, 2), Error);
  s = impulses({-100.0});
  s.nodes[0].fixed_direction = Eigen::Vector3d(1.0, 1.0, 0.0);
  CHECK_THROWS_AS(build_poc_map(e, s, 2), Error);
  s = impulses({-100.0});
  s.frame = ControlFrame::kSynodic;
  try {
    build_poc_map(e, s, 2);
    FAIL("expected frame error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kFrame);
  }
}

TEST_CASE("ballistic reference") {
  const auto& e = leo_suite()[1].event;
  // Node at TCA: the TCA state itself.
  const auto at_tca = ballistic_reference(e, impulses({0.0}));
  CHECK((at_tca[0].r - e.primary.r).norm() <= 1e-15 * e.primary.r.norm());
  CHECK((at_tca[0].v - e.primary.v).norm() <= 1e-15 * e.primary.v.norm());
  CHECK(at_tca[0].epoch == 0.0);

  // Round trip back to TCA.
  const double p = period(e);
  const auto s = impulses({-2.3 * p, -1.1 * p, -0.4 * p});
  const auto states = ballistic_reference(e, s);
  REQUIRE(states.size() == 3);
  for (const auto& st : states) {
    const auto back = dyn::propagate(st, 0.0, e.dynamics);
    CHECK((back.r - e.primary.r).norm() <= 1e-9 * e.primary.r.norm());
    CHECK((back.v - e.primary.v).norm() <= 1e-9 * e.primary.v.norm());
  }
  CHECK(states[0].epoch == doctest::Approx(-2.3 * p).epsilon(1e-14));
}

TEST_CASE("half-period nodes on a circular orbit are antipodal") {
  conj::ConjunctionEvent e = leo_suite()[0].event;
  const double mu = e.dynamics.mu;
  e.primary = dyn::state_from_elements(7000.0, 0.0, 0.7, 0.3, 0.0, 1.0, mu);
  e.secondary = e.primary;
  e.secondary.v = Eigen::AngleAxisd(1.2, e.primary.r.normalized()) * e.primary.v;
  e.secondary.r = e.primary.r - 0.1 * e.primary.r.normalized();
  const double p = 2.0 * std::numbers::pi * std::sqrt(7000.0 * 7000.0 * 7000.0 / mu);
  const auto states = ballistic_reference(e, impulses({-1.5 * p, -p}));
  CHECK((states[0].r + states[1].r).norm() <= 1e-9 * 7000.0);
  CHECK((states[0].v + states[1].v).norm() <= 1e-9 * states[0].v.norm());
}

TEST_CASE("linear part matches finite differences") {
  for (const auto& sc : leo_suite()) {
    const double p = period(sc.event);
    const auto s = impulses({-1.0 * p, -0.5 * p});
    MapOptions lin;
    lin.scale = PocScale::kLinear;
    const PocMap m = build_poc_map(sc.event, s, 2, lin);
    const Trajectory traj(sc.event, s);
    double gnorm = 0.0;
    for (int v = 0; v < 6; ++v) gnorm = std::max(gnorm, std::abs(linear_coefficient(m, v)));
    for (int v = 0; v < 6; ++v) {
      // 1e-6 km/s = 1e-3 m/s.
      const double fd = fd_component(traj, static_cast<std::size_t>(v / 3), v % 3, 1e-3) * m.unit;
      const double dg = linear_coefficient(m, v);
      CHECK(std::abs(dg - fd) <= 1e-4 * std::max(std::abs(fd), 1e-3 * gnorm));
    }
  }
}

TEST_CASE("gradient direction matches steepest finite-difference direction") {
  const auto& sc = leo_suite()[2];
  const auto s = impulses({-0.5 * period(sc.event)});
  MapOptions lin;
  lin.scale = PocScale::kLinear;
  const PocMap m = build_poc_map(sc.event, s, 1, lin);
  const Trajectory traj(sc.event, s);
  Eigen::Vector3d g, fd;
  for (int k = 0; k < 3; ++k) {
    g[k] = linear_coefficient(m, k);
    fd[k] = fd_component(traj, 0, k, 1e-3);
  }
  const double angle = std::acos(std::min(1.0, g.normalized().dot(fd.normalized())));
  CHECK(angle <= 1e-3);
}

TEST_CASE("higher-order map reproduces the nonlinear PoC near the origin") {
  const auto& sc = leo_suite()[3];
  const auto s = impulses({-0.5 * period(sc.event)});
  const Trajectory traj(sc.event, s);
  const std::array<double, 3> phi = {0.3, -0.5, 0.2};
  const double truth = traj.poc<double>(std::vector<std::array<double, 3>>{phi});
  std::vector<double> err;
  for (int order = 1; order <= 5; ++order) {
    const PocMap m = build_poc_map(sc.event, s, order);
    err.push_back(std::abs(m.predicted_poc(phi) - truth) / truth);
  }
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(err[4] < 1e-2 * err[1]);
  CHECK(err[4] <= 1e-5);
}

TEST_CASE("fixed-direction and reference controls") {
  const auto& sc = leo_suite()[0];
  const double p = period(sc.event);
  auto s = impulses({-0.5 * p});
  s.nodes[0].fixed_direction = Eigen::Vector3d::UnitY();
  const PocMap m = build_poc_map(sc.event, s, 3);
  const PocMap free = build_poc_map(sc.event, impulses({-0.5 * p}), 3);
  CHECK(linear_coefficient(m, 0) == doctest::Approx(linear_coefficient(free, 1)).epsilon(1e-12));

  // A saturated node folded into the reference shifts the map's constant part.
  auto ref = impulses({-0.5 * p});
  ref.nodes[0].active = false;
  ref.nodes[0].reference = {0.0, 0.5, 0.0};
  MapOptions lin;
  lin.scale = PocScale::kLinear;
  auto both = ref;
  ControlNode extra;
  extra.time = -0.25 * p;
  both.nodes.push_back(extra);
  const PocMap shifted = build_poc_map(sc.event, both, 2, lin);
  const Trajectory traj(sc.event, both);
  const std::vector<std::array<double, 3>> u = {{0.0, 0.5, 0.0}, {0.0, 0.0, 0.0}};
  CHECK(shifted.ballistic_poc == traj.poc<double>(u));
  CHECK(shifted.size() == 3);
  const auto controls = node_controls(both, shifted.variables, shifted.unit, std::vector<double>{1.0, 2.0, 3.0});
  CHECK(controls[0] == Eigen::Vector3d(0.0, 0.5, 0.0));
  CHECK(controls[1] == Eigen::Vector3d(1.0, 2.0, 3.0));
}

TEST_CASE("low-thrust map") {
  const auto& sc = leo_suite()[1];
  const double p = period(sc.event);
  ControlSchedule s = impulses({-0.7 * p, -0.5 * p});
  s.mode = ControlMode::kLowThrust;
  MapOptions lin;
  lin.scale = PocScale::kLinear;
  const PocMap m = build_poc_map(sc.event, s, 2, lin);
  CHECK(m.size() == 3);
  CHECK(m.unit == kThrustUnit);
  const Trajectory traj(sc.event, s);
  for (int k = 0; k < 3; ++k) {
    const double fd = fd_component(traj, 0, k, 1e-6) * m.unit;
    CHECK(linear_coefficient(m, k) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("cislunar map") {
  const auto suite = cli::generate_synthetic_suite(7, 1, cli::Regime::kCislunar);
  const auto& e = suite[0].event;
  ControlSchedule s = impulses({-0.05 * e.dynamics.char_time});
  s.frame = ControlFrame::kSynodic;
  MapOptions lin;
  lin.scale = PocScale::kLinear;
  const PocMap m = build_poc_map(e, s, 2, lin);
  CHECK(m.ballistic_poc == doctest::Approx(conj::ballistic_poc(e)).epsilon(1e-12));
  const Trajectory traj(e, s);
  for (int k = 0; k < 3; ++k) {
    const double fd = fd_component(traj, 0, k, 1e-3);
    CHECK(linear_coefficient(m, k) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("per-node gradient norms") {
  const auto& sc = leo_suite()[0];
  const double p = period(sc.event);
  ControlSchedule tmpl;
  const std::vector<double> times = {-0.5 * p, -0.5 * p, -1.0, -0.75 * p};
  const auto g = gradient_norm_per_node(sc.event, times, tmpl);
  REQUIRE(g.size() == 4);
  CHECK(g[0].norm == g[1].norm);
  CHECK(g[0].time == times[0]);
  CHECK(g[2].norm < 1e-2 * g[0].norm);
  CHECK(g[0].norm > 0.0);
  CHECK_THROWS_AS(gradient_norm_per_node(sc.event, std::vector<double>{}, tmpl), Error);

  ControlSchedule lt;
  lt.mode = ControlMode::kLowThrust;
  const auto glt = gradient_norm_per_node(sc.event, std::vector<double>{-0.6 * p}, lt, 0.1 * p);
  CHECK(glt[0].norm > 0.0);
}
