#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cam/da/taylor_poly.hpp"
#include "cam/dynamics/dynamics.hpp"
#include "cam/dynamics/integrator.hpp"
#include "cam/error.hpp"

namespace cam::conj {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Both objects at TCA. States are km and km/s in every regime (ECI for Earth
/// models, synodic frame centred on the barycentre for CR3BP); epochs are 0.
struct ConjunctionEvent {
  dyn::SpacecraftState primary;
  dyn::SpacecraftState secondary;
  Matrix6d cov_primary = Matrix6d::Zero();
  Matrix6d cov_secondary = Matrix6d::Zero();
  double hbr = 0.0;  // km
  dyn::DynamicsModel dynamics;
};

/// Checks finiteness, frames, symmetric PSD covariances, HBR > 0, nonzero
/// relative velocity and r_rel orthogonal to v_rel within 1e-6 rad.
void validate(const ConjunctionEvent& event);

struct RelativeState {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();  // positional block of C + C_s
};

RelativeState combine_relative(const ConjunctionEvent& event);

struct BPlaneProjection {
  Eigen::Matrix3d basis = Eigen::Matrix3d::Identity();  // rows xi, eta, zeta
  Eigen::Vector2d r_b = Eigen::Vector2d::Zero();
  Eigen::Matrix2d p_b = Eigen::Matrix2d::Identity();
};

/// Rows (xi, eta, zeta): eta along v_rel, xi along the part of r_rel normal to
/// eta (any normal direction when that part vanishes), zeta = eta x xi.
Eigen::Matrix3d bplane_basis(const Eigen::Vector3d& r_rel, const Eigen::Vector3d& v_rel);

BPlaneProjection project_bplane(const Eigen::Vector3d& r_rel, const Eigen::Vector3d& v_rel,
                                const Eigen::Matrix3d& cov);

/// In-plane components of r in a basis produced by bplane_basis.
template <class T>
std::array<T, 2> bplane_coordinates(const Eigen::Matrix3d& basis, const std::array<T, 3>& r) {
  return {r[0] * basis(0, 0) + r[1] * basis(0, 1) + r[2] * basis(0, 2),
          r[0] * basis(2, 0) + r[1] * basis(2, 1) + r[2] * basis(2, 2)};
}

/// Throws a covariance error unless p_b is symmetric positive definite.
void require_positive_definite(const Eigen::Matrix2d& p_b);

/// Disc integral of the 2-D Gaussian by nested adaptive Gauss-Kronrod
/// quadrature in polar coordinates.
double poc_quadrature(const Eigen::Vector2d& r_b, const Eigen::Matrix2d& p_b, double hbr);

inline constexpr int kDefaultChanTerms = 20;

namespace detail {
double regularized_gamma_p(double a, double x);
[[noreturn]] void numeric_failure(const std::string& what);
}  // namespace detail

/// Probability that |x| <= HBR for x ~ N(r_b, p_b), as a mixture of
/// equivalent-cross-section terms:
///   PoC = sum_{k < terms} a_k P(k + 1, HBR^2 / (2 beta)),   beta = lambda_min(p_b)
/// with a_k the expansion weights of the generalized non-central chi-square
/// with scales lambda_i(p_b). For isotropic p_b this is Chan's series.
/// Works on real or polynomial r_b; p_b and HBR are plain numbers.
template <class T>
T poc_chan(const std::array<T, 2>& r_b, const Eigen::Matrix2d& p_b, double hbr, int terms = kDefaultChanTerms) {
  using std::exp;
  require_positive_definite(p_b);
  if (!(hbr > 0.0)) throw Error(ErrorKind::kConfiguration, "hard-body radius must be positive");
  if (terms < 1) throw Error(ErrorKind::kConfiguration, "series needs at least one term");

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(p_b);
  const Eigen::Vector2d lambda = eig.eigenvalues();  // ascending
  const Eigen::Matrix2d e = eig.eigenvectors();
  const double beta = lambda[0];
  const double gamma[2] = {0.0, 1.0 - beta / lambda[1]};

  std::array<T, 2> y = {r_b[0] * e(0, 0) + r_b[1] * e(1, 0), r_b[0] * e(0, 1) + r_b[1] * e(1, 1)};
  std::array<T, 2> c = {y[0] * y[0] * (beta / (2.0 * lambda[0] * lambda[0])),
                        y[1] * y[1] * (beta / (2.0 * lambda[1] * lambda[1]))};
  const T q = y[0] * y[0] * (1.0 / lambda[0]) + y[1] * y[1] * (1.0 / lambda[1]);

  std::vector<T> a;
  std::vector<T> d;
  a.reserve(static_cast<std::size_t>(terms));
  d.reserve(static_cast<std::size_t>(terms));
  a.push_back(exp(q * -0.5) * (std::sqrt(beta / lambda[0]) * std::sqrt(beta / lambda[1])));
  // d_m = sum_i [gamma_i^(m+1) / 2 + (m + 1) gamma_i^m c_i], with 0^0 = 1.
  for (int m = 0; m + 1 < terms; ++m) {
    const double g1 = std::pow(gamma[1], m);
    T dm = c[1] * ((m + 1) * g1) + 0.5 * g1 * gamma[1];
    if (m == 0) dm += c[0];
    d.push_back(std::move(dm));
  }
  for (int k = 0; k + 1 < terms; ++k) {
    T next = a[0] * d[static_cast<std::size_t>(k)];
    for (int r = 1; r <= k; ++r) next += a[static_cast<std::size_t>(r)] * d[static_cast<std::size_t>(k - r)];
    a.push_back(next * (1.0 / (k + 1)));
  }

  const double x = hbr * hbr / (2.0 * beta);
  T poc = a[0] * detail::regularized_gamma_p(1.0, x);
  for (int k = 1; k < terms; ++k) {
    poc += a[static_cast<std::size_t>(k)] * detail::regularized_gamma_p(k + 1.0, x);
  }
  if (!std::isfinite(dyn::constant_of(poc))) detail::numeric_failure("collision probability series overflowed");
  return poc;
}

/// Real-valued series; returns 0 far in the Gaussian tail.
double poc_chan(const Eigen::Vector2d& r_b, const Eigen::Matrix2d& p_b, double hbr, int terms = kDefaultChanTerms);

/// Chan's original equal-area series (exact only for isotropic p_b); kept
/// for comparison.
double poc_chan_equal_area(const Eigen::Vector2d& r_b, const Eigen::Matrix2d& p_b, double hbr,
                           int terms = kDefaultChanTerms);

/// Lower bound of the Mahalanobis distance between the mean and the disc.
double tail_distance(const Eigen::Vector2d& r_b, const Eigen::Matrix2d& p_b, double hbr);

/// PoC of the unmanoeuvred encounter.
double ballistic_poc(const ConjunctionEvent& event);

}  // namespace cam::conj
