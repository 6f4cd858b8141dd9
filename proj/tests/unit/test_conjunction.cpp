#include <cmath>
#include <numbers>
#include <random>

#include "cam/conjunction/conjunction.hpp"
#include "doctest.h"

using namespace cam::conj;
using cam::Error;
using cam::ErrorKind;

namespace {

Eigen::Matrix2d rotated_diag(double s1, double s2, double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r * Eigen::Vector2d(s1 * s1, s2 * s2).asDiagonal() * r.transpose();
}

ConjunctionEvent simple_event() {
  ConjunctionEvent e;
  e.primary.r = {7000.0, 0.0, 0.0};
  e.primary.v = {0.0, 7.5, 0.0};
  e.secondary.r = {7000.0 - 0.2, 0.0, 0.0};
  e.secondary.v = {0.0, 0.0, 7.5};
  e.cov_primary.topLeftCorner<3, 3>() = Eigen::Vector3d(0.04, 0.09, 0.01).asDiagonal();
  e.cov_secondary.topLeftCorner<3, 3>() = Eigen::Vector3d(0.01, 0.01, 0.01).asDiagonal();
  e.hbr = 0.02;
  return e;
}

}  // namespace

TEST_CASE("combine_relative") {
  auto e = simple_event();
  e.cov_secondary = e.cov_primary;
  const auto rel = combine_relative(e);
  CHECK((rel.cov - 2.0 * e.cov_primary.topLeftCorner<3, 3>()).norm() == 0.0);
  e.secondary.r = e.primary.r;
  CHECK(combine_relative(e).r.norm() == 0.0);
  e.cov_secondary.setZero();
  CHECK((combine_relative(e).cov - e.cov_primary.topLeftCorner<3, 3>()).norm() == 0.0);
  e.cov_secondary(0, 0) = -1.0;
  try {
    combine_relative(e);
    FAIL("expected covariance error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kCovariance);
  }
}

TEST_CASE("event validation") {
  auto e = simple_event();
  CHECK_NOTHROW(validate(e));
  auto bad = e;
  bad.hbr = 0.0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = e;
  bad.cov_primary(0, 1) = 0.5;
  try {
    validate(bad);
    FAIL("expected covariance error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kCovariance);
  }
  bad = e;
  bad.secondary.r.y() += 0.1;  // r_rel no longer orthogonal to v_rel
  try {
    validate(bad);
    FAIL("expected geometry error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kGeometry);
  }
  bad = e;
  bad.secondary.v = bad.primary.v;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("B-plane projection") {
  const Eigen::Vector3d r(0.3, 0.0, -0.4), v(0.0, 10.0, 0.0);
  Eigen::Matrix3d P = Eigen::Matrix3d::Identity() * 0.25;
  const auto bp = project_bplane(r, v, P);
  CHECK(bp.r_b.norm() == doctest::Approx(r.norm()).epsilon(1e-15));
  CHECK((bp.p_b - Eigen::Matrix2d::Identity() * 0.25).norm() < 1e-15);
  CHECK((bp.basis * bp.basis.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  CHECK((bp.basis.row(1).transpose() - v.normalized()).norm() < 1e-15);
  CHECK(bp.r_b.y() == doctest::Approx(0.0));

  const auto along = project_bplane(Eigen::Vector3d(2.0, 0, 0), Eigen::Vector3d(0, 0, 3.0), P);
  CHECK(std::abs(along.r_b.x()) == doctest::Approx(2.0));
  CHECK_THROWS_AS(project_bplane(r, Eigen::Vector3d::Zero(), P), Error);
  // Zero miss: basis completion still orthonormal.
  const auto zero = project_bplane(Eigen::Vector3d::Zero(), v, P);
  CHECK((zero.basis * zero.basis.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-14);
}

TEST_CASE("centered isotropic closed form") {
  for (double sigma : {0.1, 0.5, 2.0}) {
    for (double hbr : {0.005, 0.05, 0.5}) {
      const Eigen::Matrix2d P = Eigen::Matrix2d::Identity() * sigma * sigma;
      const double exact = -std::expm1(-hbr * hbr / (2.0 * sigma * sigma));
      CHECK(poc_quadrature(Eigen::Vector2d::Zero(), P, hbr) == doctest::Approx(exact).epsilon(1e-10));
      CHECK(poc_chan(Eigen::Vector2d::Zero(), P, hbr) == doctest::Approx(exact).epsilon(1e-10));
    }
  }
}

TEST_CASE("limits and tails") {
  const Eigen::Matrix2d P = rotated_diag(0.3, 1.0, 0.4);
  CHECK(poc_quadrature(Eigen::Vector2d(0.1, 0.2), P, 0.0) == 0.0);
  CHECK(poc_quadrature(Eigen::Vector2d(0.1, 0.2), P, 1e-9) < 1e-16);
  CHECK(poc_quadrature(Eigen::Vector2d(50.0, 0.0), P, 0.02) == 0.0);
  CHECK(poc_chan(Eigen::Vector2d(50.0, 0.0), P, 0.02) == 0.0);
  Eigen::Matrix2d bad;
  bad << 1.0, 2.0, 2.0, 1.0;
  try {
    poc_quadrature(Eigen::Vector2d::Zero(), bad, 0.01);
    FAIL("expected covariance error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kCovariance);
  }
  CHECK_THROWS_AS(poc_chan(Eigen::Vector2d::Zero(), bad, 0.01), Error);
}

TEST_CASE("series matches quadrature on anisotropic cases") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  double worst = 0.0, worst_equal_area = 0.0;
  while (checked < 60) {
    const double s1 = 0.1 * std::pow(20.0, u(rng)), s2 = 0.1 * std::pow(20.0, u(rng));
    const Eigen::Matrix2d P = rotated_diag(s1, s2, std::numbers::pi * u(rng));
    const double hbr = 0.005 + 0.045 * u(rng);
    const double ang = 2.0 * std::numbers::pi * u(rng);
    const double dist = 4.0 * std::max(s1, s2) * u(rng);
    const Eigen::Vector2d rb(dist * std::cos(ang), dist * std::sin(ang));
    const double q = poc_quadrature(rb, P, hbr);
    if (q < 1e-12) continue;
    ++checked;
    worst = std::max(worst, std::abs(poc_chan(rb, P, hbr) - q) / q);
    worst_equal_area = std::max(worst_equal_area, std::abs(poc_chan_equal_area(rb, P, hbr) - q) / q);
  }
  CHECK(worst <= 1e-6);
  // The equal-area series is only exact for isotropic covariance.
  CHECK(worst_equal_area > 1e-3);
}

TEST_CASE("basis invariance and symmetry") {
  const Eigen::Matrix2d P = rotated_diag(0.4, 1.3, 0.7);
  const Eigen::Vector2d rb(0.5, -0.3);
  const double hbr = 0.03;
  const double base_c = poc_chan(rb, P, hbr), base_q = poc_quadrature(rb, P, hbr);
  for (double a : {0.3, 1.1, 2.5}) {
    Eigen::Matrix2d R;
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    const Eigen::Matrix2d Pr = R * P * R.transpose();
    CHECK(poc_chan(R * rb, Pr, hbr) == doctest::Approx(base_c).epsilon(1e-12));
    CHECK(poc_quadrature(R * rb, Pr, hbr) == doctest::Approx(base_q).epsilon(1e-12));
  }
  CHECK(poc_chan(-rb, P, hbr) == doctest::Approx(base_c).epsilon(1e-14));
}

TEST_CASE("monotonicity") {
  const Eigen::Matrix2d P = rotated_diag(0.2, 0.9, 0.3);
  const Eigen::Vector2d dir = Eigen::Vector2d(1.0, 2.0).normalized();
  double prev = 2.0;
  for (int i = 0; i <= 40; ++i) {
    const double p = poc_chan(dir * (0.05 * i), P, 0.02);
    CHECK(p <= prev * (1.0 + 1e-14));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    prev = p;
  }
  prev = 0.0;
  for (int i = 1; i <= 30; ++i) {
    const double p = poc_chan(dir * 0.4, P, 0.005 * i);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("polynomial series agrees with real series") {
  using cam::da::TaylorPoly;
  const cam::da::AlgebraConfig cfg{2, 4};
  const Eigen::Matrix2d P = rotated_diag(0.3, 0.8, 0.2);
  const Eigen::Vector2d rb(0.35, 0.1);
  std::array<TaylorPoly, 2> r = {TaylorPoly::variable(cfg, 0, rb.x()), TaylorPoly::variable(cfg, 1, rb.y())};
  const TaylorPoly p = poc_chan(r, P, 0.02);
  CHECK(p.constant_part() == poc_chan(rb, P, 0.02));
  // Gradient against central differences.
  const double h = 1e-5;
  for (int j = 0; j < 2; ++j) {
    Eigen::Vector2d d = Eigen::Vector2d::Zero();
    d[j] = h;
    const double fd = (poc_chan(rb + d, P, 0.02) - poc_chan(rb - d, P, 0.02)) / (2.0 * h);
    std::vector<int> e(2, 0);
    e[j] = 1;
    CHECK(p.coefficient(e) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("ballistic PoC of an event") {
  const auto e = simple_event();
  const auto rel = combine_relative(e);
  const auto bp = project_bplane(rel.r, rel.v, rel.cov);
  CHECK(ballistic_poc(e) == poc_chan(bp.r_b, bp.p_b, e.hbr));
  CHECK(ballistic_poc(e) == doctest::Approx(poc_quadrature(bp.r_b, bp.p_b, e.hbr)).epsilon(1e-8));
}
