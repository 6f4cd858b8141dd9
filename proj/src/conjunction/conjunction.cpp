#include "cam/conjunction/conjunction.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

namespace cam::conj {
namespace {

constexpr double kTailCutoff = 40.0;

bool finite(const dyn::SpacecraftState& s) { return s.r.allFinite() && s.v.allFinite(); }

void require_psd(const Matrix6d& c, const char* name) {
  if (!c.allFinite()) throw Error(ErrorKind::kCovariance, std::string(name) + " covariance is not finite");
  const double scale = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error(ErrorKind::kCovariance, std::string(name) + " covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix6d> eig(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw Error(ErrorKind::kCovariance, std::string(name) + " covariance is not positive semidefinite");
  }
}

}  // namespace

namespace detail {

double regularized_gamma_p(double a, double x) { return boost::math::gamma_p(a, x); }

void numeric_failure(const std::string& what) { throw Error(ErrorKind::kNumeric, what); }

}  // namespace detail

void validate(const ConjunctionEvent& event) {
  if (!finite(event.primary) || !finite(event.secondary)) {
    throw Error(ErrorKind::kValidation, "conjunction states must be finite");
  }
  const dyn::Frame frame = event.dynamics.frame();
  if (event.primary.frame != frame || event.secondary.frame != frame) {
    throw Error(ErrorKind::kFrame, "state frames do not match the dynamics regime");
  }
  dyn::validate(event.dynamics);
  if (!(event.hbr > 0.0) || !std::isfinite(event.hbr)) {
    throw Error(ErrorKind::kConfiguration, "hard-body radius must be positive");
  }
  require_psd(event.cov_primary, "primary");
  require_psd(event.cov_secondary, "secondary");
  const RelativeState rel = combine_relative(event);
  const double vn = rel.v.norm();
  if (!(vn > 0.0)) throw Error(ErrorKind::kGeometry, "zero relative velocity: not a short-term encounter");
  const double rn = rel.r.norm();
  if (rn > 0.0) {
    const double c = std::abs(rel.r.dot(rel.v)) / (rn * vn);
    if (c > std::sin(1e-6)) {
      throw Error(ErrorKind::kGeometry, "relative position is not orthogonal to the relative velocity (not at TCA)");
    }
  }
}

RelativeState combine_relative(const ConjunctionEvent& event) {
  RelativeState out;
  out.r = event.primary.r - event.secondary.r;
  out.v = event.primary.v - event.secondary.v;
  out.cov = (event.cov_primary + event.cov_secondary).topLeftCorner<3, 3>();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(out.cov, Eigen::EigenvaluesOnly);
  const double scale = std::max(out.cov.cwiseAbs().maxCoeff(), 1e-300);
  if (!out.cov.allFinite() || eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw Error(ErrorKind::kCovariance, "combined covariance is not positive semidefinite");
  }
  return out;
}

Eigen::Matrix3d bplane_basis(const Eigen::Vector3d& r_rel, const Eigen::Vector3d& v_rel) {
  const double vn = v_rel.norm();
  if (!(vn > 0.0) || !std::isfinite(vn)) {
    throw Error(ErrorKind::kGeometry, "zero relative velocity: not a short-term encounter");
  }
  const Eigen::Vector3d eta = v_rel / vn;
  Eigen::Vector3d xi = r_rel - r_rel.dot(eta) * eta;
  if (!(xi.norm() > 1e-12 * std::max(r_rel.norm(), 1e-300))) {
    Eigen::Index axis = 0;
    eta.cwiseAbs().minCoeff(&axis);
    xi = eta.cross(Eigen::Vector3d::Unit(axis));
  }
  xi.normalize();
  const Eigen::Vector3d zeta = eta.cross(xi);
  Eigen::Matrix3d basis;
  basis.row(0) = xi;
  basis.row(1) = eta;
  basis.row(2) = zeta;
  return basis;
}

void require_positive_definite(const Eigen::Matrix2d& p) {
  if (!p.allFinite()) throw Error(ErrorKind::kCovariance, "B-plane covariance is not finite");
  const double scale = std::max(p.cwiseAbs().maxCoeff(), 1e-300);
  if (std::abs(p(0, 1) - p(1, 0)) > 1e-9 * scale) {
    throw Error(ErrorKind::kCovariance, "B-plane covariance is not symmetric");
  }
  if (!(p(0, 0) > 0.0) || !(p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0) > 1e-14 * scale * scale)) {
    throw Error(ErrorKind::kCovariance, "B-plane covariance is not positive definite");
  }
}

BPlaneProjection project_bplane(const Eigen::Vector3d& r_rel, const Eigen::Vector3d& v_rel,
                                const Eigen::Matrix3d& cov) {
  BPlaneProjection out;
  out.basis = bplane_basis(r_rel, v_rel);
  const auto rb = bplane_coordinates<double>(out.basis, {r_rel.x(), r_rel.y(), r_rel.z()});
  out.r_b = {rb[0], rb[1]};
  const Eigen::Matrix3d rotated = out.basis * cov * out.basis.transpose();
  out.p_b << rotated(0, 0), rotated(0, 2), rotated(2, 0), rotated(2, 2);
  out.p_b = 0.5 * (out.p_b + out.p_b.transpose()).eval();
  require_positive_definite(out.p_b);
  return out;
}

double tail_distance(const Eigen::Vector2d& r_b, const Eigen::Matrix2d& p_b, double hbr) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(p_b, Eigen::EigenvaluesOnly);
  return std::max(0.0, r_b.norm() - hbr) / std::sqrt(eig.eigenvalues()[1]);
}

double poc_quadrature(const Eigen::Vector2d& r_b, const Eigen::Matrix2d& p_b, double hbr) {
  require_positive_definite(p_b);
  if (!(hbr >= 0.0)) throw Error(ErrorKind::kConfiguration, "hard-body radius must be non-negative");
  if (hbr == 0.0 || tail_distance(r_b, p_b, hbr) > kTailCutoff) return 0.0;
  const Eigen::Matrix2d inv = p_b.inverse();
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(p_b.determinant()));
  using boost::math::quadrature::gauss_kronrod;
  constexpr double kTol = 1e-12;  // relative; tighter sits on the error-estimate noise floor
  auto radial = [&](double rho) {
    auto angular = [&](double theta) {
      const Eigen::Vector2d d(rho * std::cos(theta) - r_b.x(), rho * std::sin(theta) - r_b.y());
      return std::exp(-0.5 * d.dot(inv * d));
    };
    return rho * gauss_kronrod<double, 31>::integrate(angular, 0.0, 2.0 * std::numbers::pi, 12, kTol);
  };
  const double integral = gauss_kronrod<double, 31>::integrate(radial, 0.0, hbr, 12, kTol);
  return std::clamp(norm * integral, 0.0, 1.0);
}

double poc_chan(const Eigen::Vector2d& r_b, const Eigen::Matrix2d& p_b, double hbr, int terms) {
  require_positive_definite(p_b);
  if (!(hbr > 0.0)) throw Error(ErrorKind::kConfiguration, "hard-body radius must be positive");
  if (tail_distance(r_b, p_b, hbr) > kTailCutoff) return 0.0;
  const double p = poc_chan<double>(std::array<double, 2>{r_b.x(), r_b.y()}, p_b, hbr, terms);
  return p < 1e-300 ? 0.0 : std::min(p, 1.0);
}

double poc_chan_equal_area(const Eigen::Vector2d& r_b, const Eigen::Matrix2d& p_b, double hbr, int terms) {
  require_positive_definite(p_b);
  const double u = hbr * hbr / std::sqrt(p_b.determinant());
  const double v = r_b.dot(p_b.inverse() * r_b);
  // PoC = exp(-v/2) sum_m (v/2)^m / m! * (1 - exp(-u/2) sum_{k<=m} (u/2)^k / k!)
  double total = 0.0;
  double pm = std::exp(-0.5 * v);
  double tail = std::exp(-0.5 * u);
  double uk = tail;
  for (int m = 0; m < terms; ++m) {
    if (m > 0) {
      pm *= 0.5 * v / m;
      uk *= 0.5 * u / m;
      tail += uk;
    }
    total += pm * (1.0 - tail);
  }
  return std::clamp(total, 0.0, 1.0);
}

double ballistic_poc(const ConjunctionEvent& event) {
  const RelativeState rel = combine_relative(event);
  const BPlaneProjection bp = project_bplane(rel.r, rel.v, rel.cov);
  return poc_chan(bp.r_b, bp.p_b, event.hbr);
}

}  // namespace cam::conj
