#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "../oracles.hpp"
#include "marginforge/error.hpp"
#include "marginforge/local_sampling.hpp"
#include "marginforge/neighbors.hpp"
#include "marginforge/synthetic.hpp"

using namespace marginforge;

namespace {
LocalSamplingConfig config(double delta, std::size_t bags, std::uint64_t seed = 5) {
  LocalSamplingConfig c;
  c.delta = delta;
  c.bags = bags;
  c.seed = seed;
  c.kernel = KernelSpec::rbf(0.5, 1);
  return c;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& sorted) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::binary_search(sorted.begin(), sorted.end(), i)) out.push_back(i);
  return out;
}
}  // namespace

TEST_CASE("sampling weight examples") {
  auto w = sampling_weights(std::vector<double>{1, 1});
  CHECK(w == std::vector<double>{0.5, 0.5});
  w = sampling_weights(std::vector<double>{1, 2, 2});
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(0.25).epsilon(1e-15));
  w = sampling_weights(std::vector<double>{0, 1});
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(w[1] < 1e-11);
  w = sampling_weights(std::vector<double>{0, 0, 0, 0});
  CHECK(w == std::vector<double>(4, 0.25));
  CHECK_THROWS_AS(sampling_weights(std::vector<double>{}), ConfigError);
  CHECK_THROWS_AS(sampling_weights(std::vector<double>{-1, 1}), ConfigError);
}

TEST_CASE("neighbor order and rounding") {
  CHECK(neighbor_order(442) == 6);
  CHECK(neighbor_order(2) == 1);
  CHECK(neighbor_order(3) == 1);
  CHECK(neighbor_order(21) == 3);
  CHECK_THROWS_AS(neighbor_order(1), PipelineError);
  CHECK(round_half_up(0.3 * 10) == 3);
  CHECK(round_half_up(0.04 * 10) == 0);
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(0.0) == 0);
}

TEST_CASE("config validation") {
  auto c = config(0.05, 5);
  c.beta = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(1.0, 5);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(0.05, 0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("plan arithmetic: n=1000, delta=0.05, L=5") {
  const Dataset d = make_two_gaussians(1000, 1);
  const auto r = initial_bagging(d, config(0.05, 5));
  CHECK(r.plan.subsamples.size() == 5);
  for (const auto& s : r.plan.subsamples) CHECK(s.size() == 10);
  CHECK(r.plan.pooled.size() == 50);
  for (auto v : r.support_union)
    CHECK(std::binary_search(r.plan.pooled.begin(), r.plan.pooled.end(), v));
}

TEST_CASE("single bag reduces to a solve on that bag") {
  const Dataset d = make_two_gaussians(300, 2);
  const auto cfg = config(0.9, 1);
  const auto r = initial_bagging(d, cfg);
  const auto direct = solve(d, r.plan.subsamples[0], cfg.kernel, cfg.solver).model;
  std::vector<std::size_t> expected = direct.sv_indices;
  std::sort(expected.begin(), expected.end());
  CHECK(r.support_union == expected);
}

TEST_CASE("separated clusters: support union equals per-bag oracle supports") {
  // Two 1-D clusters, negatives in [0, 1], positives in [3, 4].
  std::vector<oracle::Row> pts;
  std::vector<int> y;
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 400; ++i) {
    const bool pos = i % 2 == 0;
    pts.push_back({(pos ? 3.0 : 0.0) + u(gen)});
    y.push_back(pos ? 1 : -1);
  }
  const Dataset d = oracle::to_dataset(pts, y);
  auto cfg = config(0.1, 2);
  cfg.kernel = KernelSpec::linear(10);
  cfg.solver.kkt_tol = 1e-6;
  const auto r = initial_bagging(d, cfg);
  std::set<std::size_t> expected;
  for (const auto& bag : r.plan.subsamples) {
    std::vector<oracle::Row> bp;
    std::vector<int> by;
    for (auto i : bag) {
      bp.push_back(pts[i]);
      by.push_back(y[i]);
    }
    const auto o = oracle::solve_dual(bp, by, cfg.kernel);
    for (std::size_t t = 0; t < bag.size(); ++t)
      if (o.alphas[t] > 1e-6) expected.insert(bag[t]);
  }
  CHECK(r.support_union == std::vector<std::size_t>(expected.begin(), expected.end()));
  // Boundary-adjacent: every support vector is the extreme point of its class in its bag.
  for (auto i : r.support_union) CHECK((y[i] > 0 ? pts[i][0] < 3.2 : pts[i][0] > 0.8));
}

TEST_CASE("degenerate bags contribute nothing") {
  // Labels are +1 except for a small block, so most 3-point bags are one-class.
  const Dataset base = make_two_gaussians(600, 3);
  std::vector<SparseVector> rows(base.samples().begin(), base.samples().end());
  std::vector<Label> labels(rows.size(), 1);
  for (std::size_t i = 0; i < rows.size(); i += 15) labels[i] = -1;
  const Dataset d(rows, labels);
  auto cfg = config(0.1, 20);
  const auto r = initial_bagging(d, cfg);
  std::size_t one_class = 0;
  std::set<std::size_t> allowed;
  for (const auto& bag : r.plan.subsamples) {
    const auto [pos, neg] = d.class_counts(bag);
    if (pos == 0 || neg == 0) ++one_class;
    else allowed.insert(bag.begin(), bag.end());
  }
  CHECK(one_class > 0);
  CHECK(r.degenerate_bags == one_class);
  for (auto v : r.support_union) CHECK(allowed.count(v) == 1);
}

TEST_CASE("every subsample degenerate is a pipeline error") {
  const Dataset base = make_two_gaussians(200, 3);
  std::vector<SparseVector> rows(base.samples().begin(), base.samples().end());
  const Dataset d(rows, std::vector<Label>(rows.size(), 1));
  CHECK_THROWS_AS(initial_bagging(d, config(0.1, 2)), PipelineError);
}

TEST_CASE("enrichment invariants") {
  const Dataset d = make_two_gaussians(3000, 4);
  auto cfg = config(0.05, 10);
  const auto bag = initial_bagging(d, cfg);
  for (double beta : {0.1, 0.5, 1.5}) {
    const auto t = enrich(d, bag.plan.pooled, bag.support_union, beta, 77, 1);
    CHECK(t.k == neighbor_order(bag.support_union.size()));
    CHECK(t.radius == beta * t.median_radius);
    const double sum = std::accumulate(t.weights.begin(), t.weights.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    std::set<std::size_t> expected(bag.support_union.begin(), bag.support_union.end());
    for (std::size_t j = 0; j < t.draws.size(); ++j) {
      const auto cand = points_in_ball(d, bag.plan.pooled, d.sample(bag.support_union[j]), t.radius);
      CHECK(t.candidate_counts[j] == cand.size());
      CHECK(t.draws[j].size() == std::min(cand.size(), round_half_up(t.weights[j] * cand.size())));
      for (auto i : t.draws[j]) {
        CHECK(std::binary_search(cand.begin(), cand.end(), i));
        CHECK_FALSE(std::binary_search(bag.plan.pooled.begin(), bag.plan.pooled.end(), i));
        expected.insert(i);
      }
    }
    CHECK(t.training_set == std::vector<std::size_t>(expected.begin(), expected.end()));
  }
}

TEST_CASE("huge radius with unit weights covers V and all of X outside T") {
  const Dataset d = make_two_gaussians(800, 5);
  const auto bag = initial_bagging(d, config(0.1, 4));
  const auto outside_rows = complement(d.size(), bag.plan.pooled);
  const NeighborIndex outside(d, outside_rows);
  const std::vector<double> ones(bag.support_union.size(), 1.0);
  const auto draws = draw_ball_samples(d, outside, bag.support_union, ones, 1e6, 3, 1);
  std::set<std::size_t> all(bag.support_union.begin(), bag.support_union.end());
  for (const auto& dj : draws) {
    CHECK(dj.size() == outside_rows.size());
    all.insert(dj.begin(), dj.end());
  }
  std::set<std::size_t> want(outside_rows.begin(), outside_rows.end());
  want.insert(bag.support_union.begin(), bag.support_union.end());
  CHECK(all == want);
}

TEST_CASE("local sampling is deterministic across thread counts") {
  const Dataset d = make_two_gaussians(4000, 6);
  auto a_cfg = config(0.05, 10, 99);
  auto b_cfg = a_cfg;
  b_cfg.threads = 4;
  const auto a = local_sampling_svm(d, a_cfg);
  const auto b = local_sampling_svm(d, b_cfg);
  CHECK(a.trace.training_set == b.trace.training_set);
  CHECK(a.trace.draws == b.trace.draws);
  CHECK(a.trace.weights == b.trace.weights);
  CHECK(a.model.sv_indices == b.model.sv_indices);
  CHECK(a.model.alphas == b.model.alphas);
  CHECK(a.model.bias == b.model.bias);
  CHECK(a.sv_initial == a.trace.support_union.size());
  // The shared-stage sampler gives the same answer as a fresh run.
  const LocalSampler sampler(d, a_cfg);
  const auto c = sampler.run(a_cfg.beta);
  CHECK(c.trace.training_set == a.trace.training_set);
  CHECK(c.model.alphas == a.model.alphas);
}

TEST_CASE("local sampling stays close to the full solve on easy data") {
  const Dataset train = make_two_gaussians(6000, 7);
  const Dataset test = make_two_gaussians(2000, 8);
  auto cfg = config(0.05, 10, 1);
  cfg.beta = 0.5;
  const auto local = local_sampling_svm(train, cfg);
  const auto full = solve(train, cfg.kernel).model;
  const auto err = [&](const SvmModel& m) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) wrong += classify(m, test.sample(i)) != test.label(i);
    return static_cast<double>(wrong) / static_cast<double>(test.size());
  };
  CHECK(err(local.model) <= 1.25 * err(full));
  CHECK(local.trace.training_set.size() < train.size() / 2);
}
