#pragma once

#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cam/da/algebra.hpp"

namespace cam::da {

/// Coefficients with a smaller magnitude are flushed to zero on write.
inline constexpr double kTinyCoefficient = 1e-300;

/// Truncated multivariate Taylor polynomial.
///
/// Coefficients live in a dense array indexed by the algebra's graded-lex
/// monomial numbering. Polynomials are value types; the algebra tables are
/// shared. Mixing polynomials from different configurations throws a
/// configuration error.
class TaylorPoly {
 public:
  /// Zero polynomial. Needs a configuration before use in arithmetic.
  TaylorPoly() = default;
  explicit TaylorPoly(const AlgebraConfig& cfg, double constant = 0.0);
  explicit TaylorPoly(std::shared_ptr<const Algebra> algebra, double constant = 0.0);

  /// center + x_var
  static TaylorPoly variable(const AlgebraConfig& cfg, int var, double center = 0.0);

  bool valid() const noexcept { return static_cast<bool>(algebra_); }
  const Algebra& algebra() const noexcept { return *algebra_; }
  const std::shared_ptr<const Algebra>& algebra_ptr() const noexcept { return algebra_; }
  const AlgebraConfig& config() const noexcept { return algebra_->config(); }
  int n_vars() const noexcept { return algebra_->n_vars(); }
  int max_order() const noexcept { return algebra_->max_order(); }

  double constant_part() const noexcept { return coeffs_[0]; }
  double coefficient(std::span<const int> exponents) const;
  double coefficient(std::initializer_list<int> exponents) const {
    return coefficient(std::span<const int>(exponents.begin(), exponents.size()));
  }
  /// Throws a configuration error when the monomial exceeds max_order.
  void set_coefficient(std::span<const int> exponents, double value);
  void set_coefficient(std::initializer_list<int> exponents, double value) {
    set_coefficient(std::span<const int>(exponents.begin(), exponents.size()), value);
  }

  /// Dense coefficient array in graded-lex order.
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  /// Nonzero terms in graded-lex order.
  std::vector<std::pair<MultiIndex, double>> terms() const;
  std::size_t nonzero_count() const noexcept;
  /// Lowest degree with a nonzero coefficient, or max_order + 1 for zero.
  int min_degree() const noexcept;

  void require_compatible(const TaylorPoly& other) const;

  TaylorPoly& operator+=(const TaylorPoly& b);
  TaylorPoly& operator-=(const TaylorPoly& b);
  TaylorPoly& operator*=(const TaylorPoly& b);
  TaylorPoly& operator+=(double c);
  TaylorPoly& operator-=(double c);
  TaylorPoly& operator*=(double c);
  TaylorPoly& operator/=(double c);

  /// this += alpha * x
  TaylorPoly& axpy(double alpha, const TaylorPoly& x);

  friend TaylorPoly operator-(TaylorPoly a);

  friend bool operator==(const TaylorPoly& a, const TaylorPoly& b);

 private:
  friend TaylorPoly multiply(const TaylorPoly& a, const TaylorPoly& b);
  friend TaylorPoly homogeneous_part(const TaylorPoly& a, int k);
  friend TaylorPoly partial(const TaylorPoly& a, int var);
  friend TaylorPoly from_text(const AlgebraConfig& cfg, std::string_view text);

  void flush();

  std::shared_ptr<const Algebra> algebra_;
  std::vector<double> coeffs_;
};

TaylorPoly add(const TaylorPoly& a, const TaylorPoly& b);
TaylorPoly multiply(const TaylorPoly& a, const TaylorPoly& b);

inline TaylorPoly operator+(TaylorPoly a, const TaylorPoly& b) { return a += b; }
inline TaylorPoly operator-(TaylorPoly a, const TaylorPoly& b) { return a -= b; }
inline TaylorPoly operator*(const TaylorPoly& a, const TaylorPoly& b) { return multiply(a, b); }
inline TaylorPoly operator+(TaylorPoly a, double c) { return a += c; }
inline TaylorPoly operator+(double c, TaylorPoly a) { return a += c; }
inline TaylorPoly operator-(TaylorPoly a, double c) { return a -= c; }
inline TaylorPoly operator-(double c, TaylorPoly a) { return (-std::move(a)) += c; }
inline TaylorPoly operator*(TaylorPoly a, double c) { return a *= c; }
inline TaylorPoly operator*(double c, TaylorPoly a) { return a *= c; }
inline TaylorPoly operator/(TaylorPoly a, double c) { return a /= c; }

enum class Intrinsic { kSqrt, kReciprocal, kExp, kLog, kPower };

/// Outer function applied to `a` through its Taylor series about the
/// constant part. `exponent` is only read for kPower. Throws DomainError
/// when the constant part lies outside the function's domain.
TaylorPoly intrinsic(Intrinsic kind, const TaylorPoly& a, double exponent = 1.0);

inline TaylorPoly sqrt(const TaylorPoly& a) { return intrinsic(Intrinsic::kSqrt, a); }
inline TaylorPoly reciprocal(const TaylorPoly& a) { return intrinsic(Intrinsic::kReciprocal, a); }
inline TaylorPoly exp(const TaylorPoly& a) { return intrinsic(Intrinsic::kExp, a); }
inline TaylorPoly log(const TaylorPoly& a) { return intrinsic(Intrinsic::kLog, a); }
inline TaylorPoly pow(const TaylorPoly& a, double p) { return intrinsic(Intrinsic::kPower, a, p); }

double evaluate(const TaylorPoly& a, std::span<const double> point);

/// Formal derivative with respect to variable `var`.
TaylorPoly partial(const TaylorPoly& a, int var);

/// Degree-k terms of a only.
TaylorPoly homogeneous_part(const TaylorPoly& a, int k);

/// Row vector whose j-th entry is (1/k) * d h_k / d phi_j at phi, where h_k is
/// the degree-k part of a. This equals the symmetric order-k coefficient
/// tensor contracted with k-1 copies of phi, leaving one index free.
std::vector<double> contract_no_first_mode(const TaylorPoly& a, int k, std::span<const double> phi);

/// Sum of contract_no_first_mode(a, k, phi) for k = 1..j in a single pass.
std::vector<double> contract_no_first_mode_sum(const TaylorPoly& a, int j, std::span<const double> phi);

/// Debug text form: one "e0 e1 ... : coefficient" line per nonzero term in
/// graded-lex order, coefficients with 17 significant digits.
std::string to_text(const TaylorPoly& a);
TaylorPoly from_text(const AlgebraConfig& cfg, std::string_view text);

}  // namespace cam::da
