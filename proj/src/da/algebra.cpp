#include "cam/da/algebra.hpp"

#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "cam/error.hpp"

namespace cam::da {
namespace {

constexpr std::size_t kMaxMonomials = 4'000'000;
constexpr std::size_t kMaxPairs = 40'000'000;

// C(n + k, k) with overflow saturation.
std::size_t binomial_count(int n_vars, int order) {
  long double c = 1.0L;
  for (int i = 1; i <= order; ++i) c = c * static_cast<long double>(n_vars + i) / i;
  if (c > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2)) {
    return std::numeric_limits<std::size_t>::max() / 2;
  }
  return static_cast<std::size_t>(c + 0.5L);
}

void enumerate_degree(int var, int remaining, std::vector<std::uint8_t>& current,
                      std::vector<std::uint8_t>& out) {
  const int m = static_cast<int>(current.size());
  if (var == m - 1) {
    current[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(remaining);
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
    enumerate_degree(var + 1, remaining - e, current, out);
  }
  current[static_cast<std::size_t>(var)] = 0;
}

}  // namespace

void validate(const AlgebraConfig& cfg) {
  if (cfg.n_vars < 1 || cfg.max_order < 1) {
    throw Error(ErrorKind::kConfiguration, "algebra needs n_vars >= 1 and max_order >= 1, got M=" +
                                               std::to_string(cfg.n_vars) + " n=" +
                                               std::to_string(cfg.max_order));
  }
  if (cfg.max_order > 250) {
    throw Error(ErrorKind::kConfiguration, "max_order above 250 is not supported");
  }
  if (binomial_count(cfg.n_vars, cfg.max_order) > kMaxMonomials ||
      binomial_count(2 * cfg.n_vars, cfg.max_order) > kMaxPairs) {
    throw Error(ErrorKind::kConfiguration,
                "algebra too large: M=" + std::to_string(cfg.n_vars) + " n=" + std::to_string(cfg.max_order));
  }
  long double key_range = 1.0L;
  for (int i = 0; i < cfg.n_vars; ++i) key_range *= static_cast<long double>(cfg.max_order + 1);
  if (key_range > static_cast<long double>(std::numeric_limits<std::uint64_t>::max() / 2)) {
    throw Error(ErrorKind::kConfiguration, "monomial key overflow for M=" + std::to_string(cfg.n_vars) +
                                               " n=" + std::to_string(cfg.max_order));
  }
}

std::shared_ptr<const Algebra> Algebra::get(const AlgebraConfig& cfg) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const Algebra>> cache;
  validate(cfg);
  std::lock_guard lock(mutex);
  auto& slot = cache[{cfg.n_vars, cfg.max_order}];
  if (!slot) slot = std::make_shared<const Algebra>(cfg);
  return slot;
}

Algebra::Algebra(const AlgebraConfig& cfg) : cfg_(cfg) {
  validate(cfg);
  const int m = cfg.n_vars;
  const int n = cfg.max_order;
  base_ = static_cast<std::uint64_t>(n + 1);

  std::vector<std::uint8_t> current(static_cast<std::size_t>(m), 0);
  degree_begin_.assign(static_cast<std::size_t>(n + 2), 0);
  for (int d = 0; d <= n; ++d) {
    degree_begin_[static_cast<std::size_t>(d)] = exponents_.size() / static_cast<std::size_t>(m);
    enumerate_degree(0, d, current, exponents_);
  }
  const std::size_t count = exponents_.size() / static_cast<std::size_t>(m);
  degree_begin_[static_cast<std::size_t>(n + 1)] = count;
  degree_.resize(count);
  for (int d = 0; d <= n; ++d) {
    for (std::size_t i = degree_begin(d); i < degree_begin(d + 1); ++i) degree_[i] = d;
  }

  std::vector<std::uint64_t> keys(count);
  index_.reserve(count * 2);
  for (std::size_t i = 0; i < count; ++i) {
    keys[i] = key_of(exponents(i));
    index_.emplace(keys[i], static_cast<std::int32_t>(i));
  }

  // Product table, grouped by the first factor then by the partner's degree.
  const std::size_t stride = static_cast<std::size_t>(n + 2);
  pair_block_.assign(count * stride, 0);
  pair_partner_.reserve(binomial_count(2 * m, n));
  pair_product_.reserve(binomial_count(2 * m, n));
  for (std::size_t i = 0; i < count; ++i) {
    const int free = n - degree_[i];
    for (int d = 0; d <= free; ++d) {
      pair_block_[i * stride + static_cast<std::size_t>(d)] = pair_partner_.size();
      for (std::size_t j = degree_begin(d); j < degree_begin(d + 1); ++j) {
        pair_partner_.push_back(static_cast<std::int32_t>(j));
        pair_product_.push_back(index_.at(keys[i] + keys[j]));
      }
    }
    pair_block_[i * stride + static_cast<std::size_t>(free + 1)] = pair_partner_.size();
  }

  // Parent table: drop one power of the last variable present.
  parent_.assign(count, 0);
  parent_var_.assign(count, 0);
  std::uint64_t place = 1;
  std::vector<std::uint64_t> var_place(static_cast<std::size_t>(m));
  for (int v = m - 1; v >= 0; --v) {
    var_place[static_cast<std::size_t>(v)] = place;
    place *= base_;
  }
  for (std::size_t r = 1; r < count; ++r) {
    const auto e = exponents(r);
    int last = m - 1;
    while (e[static_cast<std::size_t>(last)] == 0) --last;
    parent_[r] = index_.at(keys[r] - var_place[static_cast<std::size_t>(last)]);
    parent_var_[r] = last;
  }

  derivative_begin_.assign(count + 1, 0);
  for (std::size_t r = 0; r < count; ++r) {
    derivative_begin_[r] = derivative_.size();
    const auto e = exponents(r);
    for (int v = 0; v < m; ++v) {
      if (e[static_cast<std::size_t>(v)] == 0) continue;
      derivative_.push_back({v, index_.at(keys[r] - var_place[static_cast<std::size_t>(v)]),
                             e[static_cast<std::size_t>(v)]});
    }
  }
  derivative_begin_[count] = derivative_.size();
}

std::uint64_t Algebra::key_of(std::span<const std::uint8_t> exps) const {
  std::uint64_t key = 0;
  for (std::uint8_t e : exps) key = key * base_ + e;
  return key;
}

MultiIndex Algebra::multi_index(std::size_t idx) const {
  const auto e = exponents(idx);
  return MultiIndex(e.begin(), e.end());
}

std::optional<std::size_t> Algebra::index_of(std::span<const int> exps) const {
  if (static_cast<int>(exps.size()) != cfg_.n_vars) {
    throw Error(ErrorKind::kConfiguration, "multi-index length " + std::to_string(exps.size()) +
                                               " does not match n_vars " + std::to_string(cfg_.n_vars));
  }
  std::uint64_t key = 0;
  int total = 0;
  for (int e : exps) {
    if (e < 0) throw Error(ErrorKind::kConfiguration, "negative exponent in multi-index");
    total += e;
    if (total > cfg_.max_order) return std::nullopt;
    key = key * base_ + static_cast<std::uint64_t>(e);
  }
  return static_cast<std::size_t>(index_.at(key));
}

Algebra::PairRange Algebra::pairs(std::size_t i, int min_degree) const noexcept {
  const std::size_t stride = static_cast<std::size_t>(cfg_.max_order + 2);
  const int free = cfg_.max_order - degree_[i];
  if (min_degree > free) return {nullptr, nullptr, 0};
  const std::size_t begin = pair_block_[i * stride + static_cast<std::size_t>(min_degree)];
  const std::size_t end = pair_block_[i * stride + static_cast<std::size_t>(free + 1)];
  return {pair_partner_.data() + begin, pair_product_.data() + begin, end - begin};
}

}  // namespace cam::da
