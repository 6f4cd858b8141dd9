#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace cam::da {

/// Exponent vector of a monomial, one entry per variable.
using MultiIndex = std::vector<int>;

struct AlgebraConfig {
  int n_vars = 1;
  int max_order = 1;

  friend bool operator==(const AlgebraConfig&, const AlgebraConfig&) = default;
};

/// Throws a configuration error unless n_vars >= 1 and max_order >= 1.
void validate(const AlgebraConfig& cfg);

/// Immutable monomial tables for a truncated polynomial algebra in M
/// variables up to total degree n.
///
/// Monomials are numbered in graded-lexicographic order: by total degree,
/// then by descending exponent of the first variable, then the second, and so
/// on. For M = 3, degree 2 reads x0^2, x0 x1, x0 x2, x1^2, x1 x2, x2^2.
///
/// Besides the ordering, the algebra precomputes the tables the arithmetic
/// needs: for every monomial i the list of (j, i+j) pairs with
/// deg(i) + deg(j) <= n grouped by deg(j); the "parent" of every monomial
/// (one exponent removed) for evaluation; and the first-derivative table.
/// Instances are shared between all polynomials of the same configuration and
/// never change after construction, so concurrent use is safe.
class Algebra {
 public:
  /// Returns the cached algebra for `cfg`, building it on first use.
  static std::shared_ptr<const Algebra> get(const AlgebraConfig& cfg);

  explicit Algebra(const AlgebraConfig& cfg);

  const AlgebraConfig& config() const noexcept { return cfg_; }
  int n_vars() const noexcept { return cfg_.n_vars; }
  int max_order() const noexcept { return cfg_.max_order; }
  std::size_t size() const noexcept { return degree_.size(); }

  int degree(std::size_t idx) const noexcept { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(std::size_t idx) const noexcept {
    return {exponents_.data() + idx * static_cast<std::size_t>(cfg_.n_vars),
            static_cast<std::size_t>(cfg_.n_vars)};
  }
  MultiIndex multi_index(std::size_t idx) const;

  /// Position of a monomial, or nullopt when it exceeds the truncation order.
  std::optional<std::size_t> index_of(std::span<const int> exponents) const;

  /// First index of the degree-d block; degree_begin(n + 1) == size().
  std::size_t degree_begin(int d) const noexcept { return degree_begin_[static_cast<std::size_t>(d)]; }

  /// Product pairs of monomial i restricted to partners of degree in
  /// [min_degree, n - deg(i)].
  struct PairRange {
    const std::int32_t* partner;
    const std::int32_t* product;
    std::size_t count;
  };
  PairRange pairs(std::size_t i, int min_degree) const noexcept;

  /// parent(r) * x_{parent_var(r)} == monomial r, for r >= 1.
  std::span<const std::int32_t> parents() const noexcept { return parent_; }
  std::span<const std::int32_t> parent_vars() const noexcept { return parent_var_; }

  struct DerivativeTerm {
    std::int32_t var;
    std::int32_t lowered;  // index of the monomial with exponent `var` lowered by one
    std::int32_t exponent;
  };
  std::span<const DerivativeTerm> derivative_terms(std::size_t idx) const noexcept {
    return {derivative_.data() + derivative_begin_[idx], derivative_begin_[idx + 1] - derivative_begin_[idx]};
  }

 private:
  std::uint64_t key_of(std::span<const std::uint8_t> exps) const;

  AlgebraConfig cfg_;
  std::uint64_t base_ = 0;
  std::vector<std::uint8_t> exponents_;
  std::vector<int> degree_;
  std::vector<std::size_t> degree_begin_;
  std::unordered_map<std::uint64_t, std::int32_t> index_;

  std::vector<std::int32_t> pair_partner_;
  std::vector<std::int32_t> pair_product_;
  // For monomial i, pair_block_[i * (n + 2) + d] is the offset of its first
  // partner of degree d, for d in [0, n - deg(i) + 1].
  std::vector<std::size_t> pair_block_;

  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> parent_var_;

  std::vector<DerivativeTerm> derivative_;
  std::vector<std::size_t> derivative_begin_;
};

}  // namespace cam::da
