#include <cmath>

#include "cam/cli/scenario.hpp"
#include "cam/solver/solver.hpp"
#include "cam/validate/validate.hpp"
#include "doctest.h"

using namespace cam;

namespace {

const std::vector<cli::ScenarioFile>& suite() {
  static const auto s = cli::generate_synthetic_suite(7, 3, cli::Regime::kLeo);
  return s;
}

map::ControlSchedule half_orbit(const conj::ConjunctionEvent& e) {
  map::ControlSchedule s;
  map::ControlNode n;
  n.time = -0.5 * dyn::orbital_period(e.primary, e.dynamics.mu);
  s.nodes.push_back(n);
  return s;
}

}  // namespace

TEST_CASE("zero maneuver reproduces the ballistic PoC") {
  for (const auto& sc : suite()) {
    const auto s = half_orbit(sc.event);
    const std::vector<Eigen::Vector3d> zero(1, Eigen::Vector3d::Zero());
    const auto rep = check::validate_solution(sc.event, s, zero, 1e-6);
    CHECK(rep.validated_poc == conj::ballistic_poc(sc.event));
    CHECK(rep.bplane_after == rep.bplane_before);
    CHECK(rep.dv_total == 0.0);
    CHECK(rep.quadrature_agrees);
  }
  const auto s = half_orbit(suite()[0].event);
  CHECK_THROWS_AS(check::validate_solution(suite()[0].event, s, std::vector<Eigen::Vector3d>{}, 1e-6), Error);
}

TEST_CASE("solved impulse and its double") {
  for (const auto& sc : suite()) {
    const auto sol = solve::solve_schedule(sc.event, half_orbit(sc.event), {});
    const auto rep = check::validate_solution(sc.event, sol, 1e-6);
    CHECK(rep.poc_log_error <= 0.1);
    REQUIRE(rep.map_residual.has_value());
    CHECK(*rep.map_residual <= 0.05 * 1e-6);
    CHECK(rep.dv_total == doctest::Approx(sol.nodes[0].u.norm()).epsilon(1e-15));
    CHECK(rep.bplane_after != rep.bplane_before);

    const std::vector<Eigen::Vector3d> doubled = {2.0 * sol.nodes[0].u};
    const auto rep2 = check::validate_solution(sc.event, sol.schedule, doubled, 1e-6);
    CHECK(rep2.validated_poc < 1e-6);
  }
}

TEST_CASE("grid oracle") {
  const auto& sc = suite()[0];
  const auto s = half_orbit(sc.event);
  const double t = s.nodes[0].time;

  const auto trivial = check::grid_oracle_single_impulse(sc.event, t, 0.5, 1.0);
  CHECK(trivial.feasible);
  CHECK(trivial.magnitude == 0.0);

  const auto sol = solve::solve_schedule(sc.event, s, {});
  const double radius = 5.0 * sol.dv_total;
  const check::OracleGrid coarse{500, 20, 40};
  const check::OracleGrid fine{1000, 40, 40};
  const auto a = check::grid_oracle_single_impulse(sc.event, t, 1e-6, radius, coarse);
  const auto b = check::grid_oracle_single_impulse(sc.event, t, 1e-6, radius, fine);
  REQUIRE(a.feasible);
  REQUIRE(b.feasible);
  CHECK(b.poc <= 1e-6);
  CHECK(std::abs(a.magnitude - b.magnitude) < 0.01 * b.magnitude);
  // The oracle lower-bounds the solver up to discretization.
  CHECK(sol.dv_total >= b.magnitude * (1.0 - 0.01));

  const auto none = check::grid_oracle_single_impulse(sc.event, t, 1e-6, 1e-3 * sol.dv_total, coarse);
  CHECK_FALSE(none.feasible);
  CHECK_THROWS_AS(check::grid_oracle_single_impulse(sc.event, t, 1e-6, radius, {100000, 1000, 40}), Error);
}
