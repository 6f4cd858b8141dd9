#include "cam/da/taylor_poly.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "cam/error.hpp"
#include "cam/simd/kernels.hpp"

namespace cam::da {
namespace {

void require_same(const TaylorPoly& a, const TaylorPoly& b) {
  if (!a.valid() || !b.valid()) throw Error(ErrorKind::kConfiguration, "polynomial has no algebra");
  if (a.algebra_ptr() != b.algebra_ptr() && !(a.config() == b.config())) {
    throw Error(ErrorKind::kConfiguration,
                "polynomial algebra mismatch: (M=" + std::to_string(a.n_vars()) + ", n=" +
                    std::to_string(a.max_order()) + ") vs (M=" + std::to_string(b.n_vars()) +
                    ", n=" + std::to_string(b.max_order()) + ")");
  }
}

// Monomial values point^alpha for every monomial up to degree `max_degree`.
void monomial_values(const Algebra& alg, std::span<const double> point, int max_degree,
                     std::vector<double>& vals) {
  const auto& k = simd::active_kernels();
  vals.assign(alg.degree_begin(max_degree + 1), 0.0);
  vals[0] = 1.0;
  const auto parents = alg.parents();
  const auto vars = alg.parent_vars();
  for (int d = 1; d <= max_degree; ++d) {
    const std::size_t begin = alg.degree_begin(d);
    const std::size_t count = alg.degree_begin(d + 1) - begin;
    k.gather_mul(count, vals.data(), parents.data() + begin, point.data(), vars.data() + begin,
                 vals.data() + begin);
  }
}

void require_point(const TaylorPoly& a, std::span<const double> point) {
  if (static_cast<int>(point.size()) != a.n_vars()) {
    throw Error(ErrorKind::kConfiguration, "point has length " + std::to_string(point.size()) +
                                               ", polynomial has " + std::to_string(a.n_vars()) +
                                               " variables");
  }
}

// Coefficients f^(k)(a0)/k! of the outer function, k = 0..n.
std::vector<double> outer_series(Intrinsic kind, double a0, double p, int n) {
  if (!std::isfinite(a0)) throw DomainError("intrinsic argument is not finite", a0);
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  switch (kind) {
    case Intrinsic::kSqrt:
      if (!(a0 > 0.0)) throw DomainError("sqrt needs a positive constant part", a0);
      c[0] = std::sqrt(a0);
      for (int k = 1; k <= n; ++k) c[k] = c[k - 1] * (0.5 - (k - 1)) / (k * a0);
      break;
    case Intrinsic::kReciprocal:
      if (a0 == 0.0) throw DomainError("reciprocal of a zero constant part", a0);
      c[0] = 1.0 / a0;
      for (int k = 1; k <= n; ++k) c[k] = -c[k - 1] / a0;
      break;
    case Intrinsic::kExp:
      c[0] = std::exp(a0);
      for (int k = 1; k <= n; ++k) c[k] = c[k - 1] / k;
      break;
    case Intrinsic::kLog: {
      if (!(a0 > 0.0)) throw DomainError("log needs a positive constant part", a0);
      c[0] = std::log(a0);
      double inv_pow = 1.0;
      for (int k = 1; k <= n; ++k) {
        inv_pow /= a0;
        c[k] = ((k % 2 == 1) ? 1.0 : -1.0) * inv_pow / k;
      }
      break;
    }
    case Intrinsic::kPower: {
      const bool integer = std::floor(p) == p;
      if (!integer && !(a0 > 0.0)) throw DomainError("non-integer power needs a positive constant part", a0);
      if (integer && p < 0.0 && a0 == 0.0) throw DomainError("negative power of a zero constant part", a0);
      c[0] = std::pow(a0, p);
      if (a0 != 0.0) {
        for (int k = 1; k <= n; ++k) c[k] = c[k - 1] * (p - (k - 1)) / (k * a0);
      } else {
        // Non-negative integer power of a nilpotent: only the x^p term survives.
        const int ip = static_cast<int>(p);
        if (ip <= n) c[ip] = 1.0;
        if (ip > 0) c[0] = 0.0;
      }
      break;
    }
  }
  return c;
}

}  // namespace

TaylorPoly::TaylorPoly(const AlgebraConfig& cfg, double constant) : TaylorPoly(Algebra::get(cfg), constant) {}

TaylorPoly::TaylorPoly(std::shared_ptr<const Algebra> algebra, double constant)
    : algebra_(std::move(algebra)) {
  if (!algebra_) throw Error(ErrorKind::kConfiguration, "null algebra");
  coeffs_.assign(algebra_->size(), 0.0);
  coeffs_[0] = std::abs(constant) < kTinyCoefficient ? 0.0 : constant;
}

TaylorPoly TaylorPoly::variable(const AlgebraConfig& cfg, int var, double center) {
  TaylorPoly p(cfg, center);
  if (var < 0 || var >= cfg.n_vars) {
    throw Error(ErrorKind::kConfiguration, "variable index " + std::to_string(var) + " out of range");
  }
  p.coeffs_[static_cast<std::size_t>(1 + var)] = 1.0;
  return p;
}

double TaylorPoly::coefficient(std::span<const int> exponents) const {
  const auto idx = algebra_->index_of(exponents);
  return idx ? coeffs_[*idx] : 0.0;
}

void TaylorPoly::set_coefficient(std::span<const int> exponents, double value) {
  const auto idx = algebra_->index_of(exponents);
  if (!idx) throw Error(ErrorKind::kConfiguration, "monomial exceeds the truncation order");
  coeffs_[*idx] = std::abs(value) < kTinyCoefficient ? 0.0 : value;
}

std::vector<std::pair<MultiIndex, double>> TaylorPoly::terms() const {
  std::vector<std::pair<MultiIndex, double>> out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0.0) out.emplace_back(algebra_->multi_index(i), coeffs_[i]);
  }
  return out;
}

std::size_t TaylorPoly::nonzero_count() const noexcept {
  std::size_t n = 0;
  for (double c : coeffs_) n += (c != 0.0);
  return n;
}

int TaylorPoly::min_degree() const noexcept {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0.0) return algebra_->degree(i);
  }
  return algebra_->max_order() + 1;
}

void TaylorPoly::require_compatible(const TaylorPoly& other) const { require_same(*this, other); }

void TaylorPoly::flush() {
  simd::active_kernels().flush_tiny(coeffs_.size(), kTinyCoefficient, coeffs_.data());
}

TaylorPoly& TaylorPoly::axpy(double alpha, const TaylorPoly& x) {
  require_same(*this, x);
  simd::active_kernels().axpy(coeffs_.size(), alpha, x.coeffs_.data(), coeffs_.data());
  flush();
  return *this;
}

TaylorPoly& TaylorPoly::operator+=(const TaylorPoly& b) {
  require_same(*this, b);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += b.coeffs_[i];
  flush();
  return *this;
}

TaylorPoly& TaylorPoly::operator-=(const TaylorPoly& b) {
  require_same(*this, b);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= b.coeffs_[i];
  flush();
  return *this;
}

TaylorPoly& TaylorPoly::operator*=(const TaylorPoly& b) { return *this = multiply(*this, b); }

TaylorPoly& TaylorPoly::operator+=(double c) {
  coeffs_[0] += c;
  if (std::abs(coeffs_[0]) < kTinyCoefficient) coeffs_[0] = 0.0;
  return *this;
}

TaylorPoly& TaylorPoly::operator-=(double c) {
  coeffs_[0] -= c;
  if (std::abs(coeffs_[0]) < kTinyCoefficient) coeffs_[0] = 0.0;
  return *this;
}

TaylorPoly& TaylorPoly::operator*=(double c) {
  simd::active_kernels().scale(coeffs_.size(), c, coeffs_.data());
  flush();
  return *this;
}

TaylorPoly& TaylorPoly::operator/=(double c) {
  for (double& x : coeffs_) x /= c;
  flush();
  return *this;
}

TaylorPoly operator-(TaylorPoly a) {
  for (double& x : a.coeffs_) x = -x;
  return a;
}

bool operator==(const TaylorPoly& a, const TaylorPoly& b) {
  if (!a.valid() || !b.valid()) return a.valid() == b.valid();
  return a.config() == b.config() && a.coeffs_ == b.coeffs_;
}

TaylorPoly add(const TaylorPoly& a, const TaylorPoly& b) { return a + b; }

TaylorPoly multiply(const TaylorPoly& a, const TaylorPoly& b) {
  require_same(a, b);
  const Algebra& alg = a.algebra();
  TaylorPoly out(a.algebra_ptr());
  const int n = alg.max_order();
  const int da = a.min_degree();
  const int db = b.min_degree();
  if (da + db > n) return out;

  // Put the operand with less pair work on the outside.
  auto work = [&](const TaylorPoly& outer, int inner_min) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < outer.coeffs_.size(); ++i) {
      if (outer.coeffs_[i] != 0.0) w += alg.pairs(i, inner_min).count;
    }
    return w;
  };
  const bool a_outer = work(a, db) <= work(b, da);
  const TaylorPoly& outer = a_outer ? a : b;
  const TaylorPoly& inner = a_outer ? b : a;
  const int inner_min = a_outer ? db : da;

  const auto& k = simd::active_kernels();
  const std::size_t end = alg.degree_begin(n - inner_min + 1);
  for (std::size_t i = 0; i < end; ++i) {
    const double ai = outer.coeffs_[i];
    if (ai == 0.0) continue;
    const auto pr = alg.pairs(i, inner_min);
    k.scatter_mul_add(pr.count, ai, inner.coeffs_.data(), pr.partner, pr.product, out.coeffs_.data());
  }
  out.flush();
  return out;
}

TaylorPoly intrinsic(Intrinsic kind, const TaylorPoly& a, double exponent) {
  if (!a.valid()) throw Error(ErrorKind::kConfiguration, "polynomial has no algebra");
  const int n = a.max_order();
  const std::vector<double> c = outer_series(kind, a.constant_part(), exponent, n);

  TaylorPoly result(a.algebra_ptr(), c[0]);
  TaylorPoly bar = a;
  bar -= a.constant_part();
  if (bar.min_degree() > n) return result;
  result.axpy(c[1], bar);
  TaylorPoly power = bar;
  for (int k = 2; k <= n; ++k) {
    power = multiply(power, bar);
    if (power.min_degree() > n) break;
    result.axpy(c[static_cast<std::size_t>(k)], power);
  }
  return result;
}

double evaluate(const TaylorPoly& a, std::span<const double> point) {
  require_point(a, point);
  std::vector<double> vals;
  monomial_values(a.algebra(), point, a.max_order(), vals);
  const auto c = a.coefficients();
  return simd::active_kernels().dot(c.size(), c.data(), vals.data());
}

TaylorPoly partial(const TaylorPoly& a, int var) {
  if (var < 0 || var >= a.n_vars()) {
    throw Error(ErrorKind::kConfiguration, "variable index " + std::to_string(var) + " out of range");
  }
  const Algebra& alg = a.algebra();
  TaylorPoly out(a.algebra_ptr());
  for (std::size_t r = 1; r < a.coeffs_.size(); ++r) {
    const double c = a.coeffs_[r];
    if (c == 0.0) continue;
    for (const auto& t : alg.derivative_terms(r)) {
      if (t.var == var) out.coeffs_[static_cast<std::size_t>(t.lowered)] += c * t.exponent;
    }
  }
  out.flush();
  return out;
}

TaylorPoly homogeneous_part(const TaylorPoly& a, int k) {
  if (k < 0 || k > a.max_order()) {
    throw Error(ErrorKind::kConfiguration, "degree " + std::to_string(k) + " outside [0, max_order]");
  }
  const Algebra& alg = a.algebra();
  TaylorPoly out(a.algebra_ptr());
  for (std::size_t i = alg.degree_begin(k); i < alg.degree_begin(k + 1); ++i) out.coeffs_[i] = a.coeffs_[i];
  return out;
}

namespace {

void accumulate_contraction(const TaylorPoly& a, int k, const std::vector<double>& vals,
                            std::vector<double>& out) {
  const Algebra& alg = a.algebra();
  const auto c = a.coefficients();
  std::vector<double> row(static_cast<std::size_t>(a.n_vars()), 0.0);
  for (std::size_t r = alg.degree_begin(k); r < alg.degree_begin(k + 1); ++r) {
    if (c[r] == 0.0) continue;
    for (const auto& t : alg.derivative_terms(r)) {
      row[static_cast<std::size_t>(t.var)] += c[r] * t.exponent * vals[static_cast<std::size_t>(t.lowered)];
    }
  }
  for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j] / k;
}

}  // namespace

std::vector<double> contract_no_first_mode(const TaylorPoly& a, int k, std::span<const double> phi) {
  require_point(a, phi);
  if (k < 1 || k > a.max_order()) {
    throw Error(ErrorKind::kConfiguration, "contraction degree " + std::to_string(k) + " outside [1, max_order]");
  }
  std::vector<double> vals;
  monomial_values(a.algebra(), phi, k - 1, vals);
  std::vector<double> out(static_cast<std::size_t>(a.n_vars()), 0.0);
  accumulate_contraction(a, k, vals, out);
  return out;
}

std::vector<double> contract_no_first_mode_sum(const TaylorPoly& a, int j, std::span<const double> phi) {
  require_point(a, phi);
  if (j < 1 || j > a.max_order()) {
    throw Error(ErrorKind::kConfiguration, "contraction order " + std::to_string(j) + " outside [1, max_order]");
  }
  std::vector<double> vals;
  monomial_values(a.algebra(), phi, j - 1, vals);
  std::vector<double> out(static_cast<std::size_t>(a.n_vars()), 0.0);
  for (int k = 1; k <= j; ++k) accumulate_contraction(a, k, vals, out);
  return out;
}

std::string to_text(const TaylorPoly& a) {
  std::string out;
  const Algebra& alg = a.algebra();
  const auto c = a.coefficients();
  char buf[64];
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0.0) continue;
    const auto e = alg.exponents(i);
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (v) out += ' ';
      out += std::to_string(e[v]);
    }
    std::snprintf(buf, sizeof buf, " : %.17g\n", c[i]);
    out += buf;
  }
  return out;
}

TaylorPoly from_text(const AlgebraConfig& cfg, std::string_view text) {
  TaylorPoly p(cfg);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": missing ':'");
    }
    std::istringstream exps(line.substr(0, colon));
    MultiIndex e;
    int v = 0;
    while (exps >> v) e.push_back(v);
    if (!exps.eof()) throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": bad exponent");
    std::string coef = line.substr(colon + 1);
    const auto first = coef.find_first_not_of(" \t");
    const auto last = coef.find_last_not_of(" \t\r");
    if (first == std::string::npos) throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": missing coefficient");
    coef = coef.substr(first, last - first + 1);
    double value = 0.0;
    const auto res = std::from_chars(coef.data(), coef.data() + coef.size(), value);
    if (res.ec != std::errc() || res.ptr != coef.data() + coef.size()) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": bad coefficient '" + coef + "'");
    }
    p.set_coefficient(e, value);
  }
  return p;
}

}  // namespace cam::da
