#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "cam/cli/run.hpp"
#include "cam/cli/scenario.hpp"
#include "doctest.h"

using namespace cam;
using namespace cam::cli;

namespace {

std::filesystem::path temp_dir() {
  auto p = std::filesystem::temp_directory_path() / "cam_test_cli";
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_wall_time(const std::string& s) {
  return std::regex_replace(s, std::regex("\"wall_time_s\": [^,\\n]*"), "\"wall_time_s\": 0");
}

}  // namespace

TEST_CASE("synthetic suite") {
  for (auto regime : {Regime::kLeo, Regime::kCislunar}) {
    const auto a = generate_synthetic_suite(11, 4, regime);
    const auto b = generate_synthetic_suite(11, 4, regime);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(scenario_to_json(a[i]) == scenario_to_json(b[i]));
      const auto& e = a[i].event;
      CHECK_NOTHROW(conj::validate(e));
      const auto rel = conj::combine_relative(e);
      const double angle = std::abs(std::asin(rel.r.normalized().dot(rel.v.normalized())));
      CHECK(angle <= 1e-6);
      const double poc = conj::ballistic_poc(e);
      CHECK(poc >= 1e-5);
      CHECK(poc <= 1e-2);
      CHECK(e.hbr >= 0.005);
      CHECK(e.hbr <= 0.05);
    }
  }
  CHECK(scenario_to_json(generate_synthetic_suite(1, 1, Regime::kLeo)[0]) !=
        scenario_to_json(generate_synthetic_suite(2, 1, Regime::kLeo)[0]));
  CHECK_THROWS_AS(generate_synthetic_suite(1, 0, Regime::kLeo), Error);
}

TEST_CASE("scenario JSON round trip") {
  for (const auto& sc : generate_synthetic_suite(3, 2, Regime::kCislunar)) {
    const std::string text = scenario_to_json(sc);
    const auto back = scenario_from_json(text);
    CHECK(scenario_to_json(back) == text);
    CHECK(back.event.primary.r == sc.event.primary.r);
    CHECK(back.event.cov_secondary == sc.event.cov_secondary);
    CHECK(back.event.dynamics.mass_ratio == sc.event.dynamics.mass_ratio);
    CHECK(conj::ballistic_poc(back.event) == conj::ballistic_poc(sc.event));
  }
}

TEST_CASE("scenario parse errors") {
  const std::string good = scenario_to_json(generate_synthetic_suite(5, 1, Regime::kLeo)[0]);
  auto kind_of = [](const std::string& text) {
    try {
      scenario_from_json(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kNumeric;
  };
  CHECK(kind_of("{") == ErrorKind::kParse);
  CHECK(kind_of("[]") == ErrorKind::kParse);
  CHECK(kind_of(std::regex_replace(good, std::regex("\"hbr_km\""), "\"hbr\"")) == ErrorKind::kParse);
  CHECK(kind_of(std::regex_replace(good, std::regex("\"kepler\""), "\"nbody\"")) == ErrorKind::kParse);
  CHECK(kind_of(std::regex_replace(good, std::regex("\"schema_version\": 1"), "\"schema_version\": 9")) ==
        ErrorKind::kValidation);
  CHECK_THROWS_AS(read_scenario("/nonexistent/scenario.json"), Error);
}

TEST_CASE("node tokens") {
  const auto leo = generate_synthetic_suite(5, 1, Regime::kLeo)[0].event;
  const double p = dyn::orbital_period(leo.primary, leo.dynamics.mu);
  const auto t = parse_node_times({"0.5", "-600s", "1:2:0.5"}, leo);
  REQUIRE(t.size() == 5);
  CHECK(t[0] == doctest::Approx(-0.5 * p));
  CHECK(t[1] == -600.0);
  CHECK(t[2] == doctest::Approx(-p));
  CHECK(t[4] == doctest::Approx(-2.0 * p));
  const auto cis = generate_synthetic_suite(5, 1, Regime::kCislunar)[0].event;
  CHECK(parse_node_times({"0.1"}, cis)[0] == doctest::Approx(-0.1 * cis.dynamics.char_time));
  CHECK_THROWS_AS(parse_node_times({"abc"}, leo), Error);
  CHECK_THROWS_AS(parse_node_times({"1:2:0"}, leo), Error);
  CHECK(parse_direction("T", leo.dynamics) == Eigen::Vector3d::UnitY());
  CHECK(parse_direction("0,0,2", cis.dynamics) == Eigen::Vector3d::UnitZ());
  CHECK_THROWS_AS(parse_direction("T", cis.dynamics), Error);
  CHECK_THROWS_AS(parse_direction("0,0,0", leo.dynamics), Error);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorKind::kParse) == 2);
  for (auto k : {ErrorKind::kConfiguration, ErrorKind::kCovariance, ErrorKind::kGeometry, ErrorKind::kFrame,
                 ErrorKind::kDomain, ErrorKind::kPropagation, ErrorKind::kSingularity, ErrorKind::kValidation}) {
    CHECK(exit_code(k) == 3);
  }
  CHECK(exit_code(ErrorKind::kNonConvergence) == 4);
  CHECK(exit_code(ErrorKind::kDegenerateGradient) == 4);
  CHECK(exit_code(ErrorKind::kInfeasible) == 5);
  const std::string e = error_json(ErrorKind::kCovariance, "bad", "x");
  CHECK(e.find("\"class\": \"covariance\"") != std::string::npos);
  CHECK(e.find("\"exit_code\": 3") != std::string::npos);
}

TEST_CASE("run scenario") {
  const auto dir = temp_dir();
  const auto sc = generate_synthetic_suite(21, 1, Regime::kLeo)[0];

  RunConfig rc;
  rc.out_path = (dir / "a.json").string();
  rc.csv_path = (dir / "a.csv").string();
  const auto first = run_scenario(sc, rc);
  CHECK(first.report.poc_log_error <= 0.1);
  CHECK(slurp(rc.out_path) == first.result_json);
  const std::string csv = slurp(rc.csv_path);
  CHECK(csv.rfind("xi_km,zeta_km,label\n", 0) == 0);
  CHECK(csv.find(",ballistic\n") != std::string::npos);
  CHECK(csv.find(",maneuvered\n") != std::string::npos);

  // Determinism modulo wall time.
  RunConfig rc2 = rc;
  rc2.out_path = (dir / "b.json").string();
  rc2.csv_path = (dir / "b.csv").string();
  run_scenario(sc, rc2);
  CHECK(without_wall_time(slurp(rc.out_path)) == without_wall_time(slurp(rc2.out_path)));
  CHECK(slurp(rc.csv_path) == slurp(rc2.csv_path));

  // Re-reading the result reproduces the validated PoC.
  const auto again = revalidate_result(sc, slurp(rc.out_path));
  CHECK(std::abs(again.validated_poc - first.report.validated_poc) <= 1e-12 * first.report.validated_poc);

  // Already below target.
  RunConfig loose;
  loose.target_poc = 0.5;
  const auto zero = run_scenario(sc, loose);
  CHECK(zero.solution.dv_total == 0.0);
  CHECK(zero.report.validated_poc == conj::ballistic_poc(sc.event));

  // Invalid covariance: validation error and no file.
  auto bad = sc;
  bad.event.cov_primary(0, 0) = -1.0;
  RunConfig rcb;
  rcb.out_path = (dir / "bad.json").string();
  std::filesystem::remove(rcb.out_path);
  try {
    run_scenario(bad, rcb);
    FAIL("expected covariance error");
  } catch (const Error& e) {
    CHECK(exit_code(e.kind()) == 3);
  }
  CHECK_FALSE(std::filesystem::exists(rcb.out_path));

  RunConfig bad_mode;
  bad_mode.mode = "warp";
  CHECK_THROWS_AS(run_scenario(sc, bad_mode), Error);

  RunConfig capped;
  capped.umax = 1e-6;
  capped.filter_grid = {"0.5:1.5:0.5"};
  try {
    run_scenario(sc, capped);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(exit_code(e.kind()) == 5);
  }

  RunConfig tang;
  tang.fixed_dir = "T";
  tang.nodes = {"1.5", "0.5"};
  const auto t = run_scenario(sc, tang);
  CHECK(t.report.poc_log_error <= 0.1);
  for (const auto& n : t.solution.nodes) {
    CHECK(n.u.x() == 0.0);
    CHECK(n.u.z() == 0.0);
  }
}
