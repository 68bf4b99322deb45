#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "marginforge/error.hpp"
#include "marginforge/kernel.hpp"
#include "marginforge/kernel_rows.hpp"
#include "marginforge/solver.hpp"

using namespace marginforge;

namespace {
SparseVector sv(std::vector<Feature> f) { return SparseVector(std::move(f)); }

SparseVector random_sparse(std::mt19937_64& gen, int max_index) {
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::bernoulli_distribution keep(0.4);
  std::vector<Feature> f;
  for (int i = 1; i <= max_index; ++i)
    if (keep(gen)) f.push_back({i, val(gen)});
  return SparseVector(std::move(f));
}
}  // namespace

TEST_CASE("kernel examples") {
  const auto x = sv({{1, 1}, {2, 2}});
  CHECK(kernel_eval(KernelSpec::linear(1), x, x) == 5.0);
  CHECK(kernel_eval(KernelSpec::rbf(3.7, 1), x, x) == 1.0);
  CHECK(kernel_eval(KernelSpec::polynomial(1, 2, 1), sv({{1, 1}}), sv({{1, 2}})) == 4.0);
}

TEST_CASE("effective diagonal under L2") {
  const auto x = sv({{1, 1}});
  CHECK(effective_diagonal(KernelSpec::rbf(0.5, 10, Formulation::L2), x) == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(effective_diagonal(KernelSpec::linear(1, Formulation::L2), x) == 1.5);
  CHECK_THROWS_AS(effective_diagonal(KernelSpec::linear(1), x), ContractError);
  const auto spec = KernelSpec::linear(1, Formulation::L2);
  CHECK(effective_kernel(spec, x, x, false) == 1.0);
  CHECK(effective_kernel(spec, x, x, true) == 1.5);
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(KernelSpec::rbf(0, 1).validate(), ConfigError);
  CHECK_THROWS_AS(KernelSpec::rbf(1, -1).validate(), ConfigError);
  CHECK_THROWS_AS(KernelSpec::polynomial(1, 0, 1).validate(), ConfigError);
  CHECK_NOTHROW(KernelSpec::linear(0.1).validate());
  CHECK(parse_kernel_family("radial") == KernelFamily::Rbf);
  CHECK(parse_kernel_family("poly") == KernelFamily::Polynomial);
  CHECK_THROWS_AS(parse_kernel_family("sigmoid"), ConfigError);
}

TEST_CASE("symmetry, rbf range and agreement with a dense oracle") {
  std::mt19937_64 gen(5);
  const KernelSpec specs[] = {KernelSpec::linear(1), KernelSpec::polynomial(0.7, 3, 1),
                              KernelSpec::rbf(0.3, 1)};
  for (int trial = 0; trial < 500; ++trial) {
    const auto x = random_sparse(gen, 12), z = random_sparse(gen, 12);
    oracle::Row dx(12, 0.0), dz(12, 0.0);
    for (const auto& f : x.entries()) dx[f.index - 1] = f.value;
    for (const auto& f : z.entries()) dz[f.index - 1] = f.value;
    for (const auto& s : specs) {
      const double a = kernel_eval(s, x, z), b = kernel_eval(s, z, x);
      CHECK(a == b);
      CHECK(a == doctest::Approx(oracle::dense_kernel(s, dx, dz)).epsilon(1e-12));
    }
    const double r = kernel_eval(specs[2], x, z);
    CHECK(r > 0.0);
    CHECK(r <= 1.0);
    if (!(x == z)) CHECK(squared_distance(x, z) > 0.0);
  }
}

TEST_CASE("row cache is transparent") {
  std::mt19937_64 gen(11);
  std::vector<SparseVector> rows;
  std::vector<Label> labels;
  for (int i = 0; i < 300; ++i) {
    rows.push_back(random_sparse(gen, 80));
    labels.push_back(i % 2 ? 1 : -1);
  }
  const Dataset d(rows, labels);
  const auto view = full_view(d.size());
  for (const auto& spec : {KernelSpec::rbf(0.05, 2, Formulation::L2), KernelSpec::polynomial(0.1, 2, 1)}) {
    KernelRows big(d, view, spec, 256), tiny(d, view, spec, 0);
    CHECK(tiny.capacity_rows() >= 2);
    CHECK(tiny.capacity_rows() < d.size());
    std::mt19937_64 order(3);
    for (int q = 0; q < 2000; ++q) {
      const std::size_t i = order() % d.size();
      const auto a = big.row(i);
      const std::vector<double> copy(a.begin(), a.end());
      const auto b = tiny.row(i);
      REQUIRE(b.size() == copy.size());
      for (std::size_t j = 0; j < copy.size(); ++j) {
        if (copy[j] != b[j]) FAIL("row " << i << " differs at " << j);
      }
    }
    CHECK(big.hits() > 0);
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(big.diagonal(i) == effective_kernel(spec, d.sample(i), d.sample(i), true));
      CHECK(big.entry(i, i + 1) == effective_kernel(spec, d.sample(i), d.sample(i + 1), false));
    }
  }
}

TEST_CASE("dense and sparse kernel paths agree bit for bit") {
  std::mt19937_64 gen(2);
  for (int dim : {10, 200}) {  // below and above the dense cut-off
    std::vector<SparseVector> rows;
    std::vector<Label> labels;
    for (int i = 0; i < 40; ++i) {
      rows.push_back(random_sparse(gen, dim));
      labels.push_back(1);
    }
    const Dataset d(rows, labels);
    const auto spec = KernelSpec::rbf(0.2, 1);
    KernelRows cache(d, full_view(d.size()), spec, 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto r = cache.row(i);
      for (std::size_t j = 0; j < d.size(); ++j)
        CHECK(r[j] == kernel_eval(spec, d.sample(i), d.sample(j)));
    }
  }
}
