#include <doctest.h>

#include <algorithm>
#include <set>

#include "marginforge/parallel.hpp"
#include "marginforge/random.hpp"

using namespace marginforge;

TEST_CASE("derived seeds differ by tag and are stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(1, {a, b}));
  CHECK(seen.size() == 400);
  CHECK(derive_seed(5, {1, 2}) == derive_seed(5, {1, 2}));
  CHECK(derive_seed(5, {1, 2}) != derive_seed(5, {2, 1}));
  CHECK(derive_seed(5, {1}) != derive_seed(6, {1}));
}

TEST_CASE("generator streams are reproducible") {
  Rng a(11), b(11);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("bounded draws stay in range and cover it") {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.uniform_index(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(c > 800);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal deviates have unit scale") {
  Rng rng(4);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("sampling without replacement and permutations") {
  Rng rng(8);
  std::vector<std::size_t> pool{10, 20, 30, 40, 50, 60};
  for (int t = 0; t < 50; ++t) {
    const auto s = rng.sample_without_replacement(pool, 4);
    const std::set<std::size_t> u(s.begin(), s.end());
    CHECK(u.size() == 4);
    for (auto v : s) CHECK(std::find(pool.begin(), pool.end(), v) != pool.end());
  }
  auto p = rng.permutation(50);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < 50; ++i) CHECK(p[i] == i);
}

TEST_CASE("parallel_for visits every task and propagates errors") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 5) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
