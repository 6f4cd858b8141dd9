#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "cam/da/taylor_poly.hpp"
#include "cam/simd/kernels.hpp"
#include "doctest.h"

using cam::simd::KernelTable;

namespace {

std::vector<const KernelTable*> variants() {
  std::vector<const KernelTable*> v;
  if (auto* k = cam::simd::avx2_kernels()) v.push_back(k);
  if (auto* k = cam::simd::neon_kernels()) v.push_back(k);
  return v;
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

struct KernelGuard {
  ~KernelGuard() { cam::simd::select_kernels("auto"); }
};

}  // namespace

TEST_CASE("scalar kernels always available") {
  CHECK(std::string(cam::simd::scalar_kernels().name) == "scalar");
  CHECK(cam::simd::select_kernels("scalar"));
  CHECK(std::string(cam::simd::active_kernels().name) == "scalar");
  CHECK_FALSE(cam::simd::select_kernels("bogus"));
  CHECK(cam::simd::select_kernels("auto"));
}

TEST_CASE("vector kernels match scalar reference") {
  const auto& ref = cam::simd::scalar_kernels();
  std::mt19937_64 rng(21);
  for (const KernelTable* k : variants()) {
    CAPTURE(k->name);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 1001u}) {
      auto x = random_vec(n, rng);
      auto y1 = random_vec(n, rng);
      auto y2 = y1;
      ref.axpy(n, 0.37, x.data(), y1.data());
      k->axpy(n, 0.37, x.data(), y2.data());
      CHECK(y1 == y2);

      ref.scale(n, -1.3, y1.data());
      k->scale(n, -1.3, y2.data());
      CHECK(y1 == y2);

      const double d1 = ref.dot(n, x.data(), y1.data());
      const double d2 = k->dot(n, x.data(), y1.data());
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y1[i]);
      CHECK(std::abs(d1 - d2) <= 1e-15 * mag + 1e-300);

      // Distinct scatter targets, arbitrary gather sources.
      std::vector<std::int32_t> j(n), r(n);
      std::iota(r.begin(), r.end(), 0);
      std::shuffle(r.begin(), r.end(), rng);
      for (std::size_t i = 0; i < n; ++i) j[i] = static_cast<std::int32_t>(rng() % (n ? n : 1));
      auto o1 = random_vec(n, rng);
      auto o2 = o1;
      ref.scatter_mul_add(n, 1.7, x.data(), j.data(), r.data(), o1.data());
      k->scatter_mul_add(n, 1.7, x.data(), j.data(), r.data(), o2.data());
      CHECK(o1 == o2);

      std::vector<std::int32_t> v(n);
      for (auto& e : v) e = static_cast<std::int32_t>(rng() % 3);
      std::vector<double> pt = {0.5, -1.25, 3.0};
      std::vector<double> g1(n), g2(n);
      ref.gather_mul(n, x.data(), j.data(), pt.data(), v.data(), g1.data());
      k->gather_mul(n, x.data(), j.data(), pt.data(), v.data(), g2.data());
      CHECK(g1 == g2);

      auto f1 = x, f2 = x;
      for (std::size_t i = 0; i < n; i += 3) f1[i] = f2[i] = 1e-310;
      ref.flush_tiny(n, 1e-300, f1.data());
      k->flush_tiny(n, 1e-300, f2.data());
      CHECK(f1 == f2);
    }
  }
}

TEST_CASE("polynomial products identical across kernels") {
  using namespace cam::da;
  KernelGuard guard;
  const AlgebraConfig cfg{6, 5};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TaylorPoly a(cfg, 1.5), b(cfg, -0.5);
  const auto alg = Algebra::get(cfg);
  for (std::size_t i = 1; i < alg->size(); ++i) {
    a.set_coefficient(alg->multi_index(i), u(rng));
    b.set_coefficient(alg->multi_index(i), u(rng));
  }
  REQUIRE(cam::simd::select_kernels("scalar"));
  const auto ref_prod = a * b;
  const auto ref_exp = exp(a * 0.1);
  for (const KernelTable* k : variants()) {
    REQUIRE(cam::simd::select_kernels(k->name));
    CHECK(a * b == ref_prod);
    CHECK(exp(a * 0.1) == ref_exp);
  }
}
