#include <doctest.h>

#include <set>

#include <random>

#include "../oracles.hpp"
#include "marginforge/error.hpp"
#include "marginforge/model_io.hpp"
#include "marginforge/solver.hpp"
#include "marginforge/synthetic.hpp"

using namespace marginforge;

namespace {
Dataset line(std::vector<double> xs, std::vector<int> ys) {
  std::vector<oracle::Row> pts;
  for (double x : xs) pts.push_back({x});
  return oracle::to_dataset(pts, ys);
}
}  // namespace

TEST_CASE("two-point analytic problem") {
  const Dataset d = line({0, 1}, {1, -1});
  const auto r = solve(d, KernelSpec::linear(10));
  REQUIRE(r.alphas.size() == 2);
  CHECK(r.alphas[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.alphas[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.model.bias == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(decision_value(r.model, SparseVector({{1, 0.25}})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dual_objective(d, full_view(2), KernelSpec::linear(10), r.alphas) == doctest::Approx(2.0));
  CHECK_FALSE(r.model.degenerate);
  CHECK_FALSE(r.model.unconverged);
}

TEST_CASE("two-point problem with an active box") {
  const Dataset d = line({0, 2}, {1, -1});
  const auto r = solve(d, KernelSpec::linear(0.1));
  CHECK(r.alphas[0] == doctest::Approx(0.1));
  CHECK(r.alphas[1] == doctest::Approx(0.1));
  // The one-parameter oracle: maximize 2a - 2a^2 over [0, C].
  const auto o = oracle::solve_dual({{0.0}, {2.0}}, {1, -1}, KernelSpec::linear(0.1));
  CHECK(o.alphas[0] == doctest::Approx(0.1));
}

TEST_CASE("single-class view gives a degenerate constant model") {
  const Dataset d = line({0, 1, 2}, {1, 1, 1});
  const auto r = solve(d, KernelSpec::rbf(1, 1));
  CHECK(r.model.degenerate);
  CHECK(r.model.num_sv() == 0);
  CHECK(classify(r.model, SparseVector({{1, 100.0}})) == 1);
  const auto neg = solve(line({0, 1}, {-1, -1}), KernelSpec::linear(1));
  CHECK(classify(neg.model, SparseVector()) == -1);
}

TEST_CASE("classification tie-break and dual objective examples") {
  CHECK(classify_value(0.5) == 1);
  CHECK(classify_value(-3.0) == -1);
  CHECK(classify_value(0.0) == 1);
  const Dataset d = line({0, 1}, {1, -1});
  CHECK(dual_objective(d, full_view(2), KernelSpec::linear(10), std::vector<double>{0.0, 0.0}) == 0.0);
  CHECK_NOTHROW(dual_objective(d, full_view(2), KernelSpec::linear(10), std::vector<double>{50.0, -3.0}));
}

TEST_CASE("solver matches the pairwise coordinate-ascent oracle") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> size(3, 12), dim(1, 3), pick(0, 2);
  const double costs[] = {0.1, 1.0, 10.0};
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = oracle::random_cloud(gen, size(gen), dim(gen));
    std::vector<int> y(pts.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (gen() % 2) ? 1 : -1;
    y[0] = 1;
    y[1] = -1;
    const double c = costs[pick(gen)];
    const Formulation f = trial % 2 ? Formulation::L2 : Formulation::L1;
    const KernelSpec specs[] = {KernelSpec::linear(c, f), KernelSpec::polynomial(0.5, 2, c, f),
                                KernelSpec::rbf(0.8, c, f)};
    const KernelSpec& spec = specs[pick(gen)];
    const Dataset d = oracle::to_dataset(pts, y);
    SolverConfig cfg;
    cfg.record_objective = true;
    const auto r = solve(d, spec, cfg);
    const auto o = oracle::solve_dual(pts, y, spec);
    CAPTURE(trial);
    CHECK(r.stats.dual_objective == doctest::Approx(o.objective).epsilon(1e-3).scale(1.0));
    CHECK(r.stats.max_violation <= 1e-3);
    SolverConfig tight;
    tight.kkt_tol = 1e-8;
    const auto t = solve(d, spec, tight);
    CHECK(std::abs(t.stats.dual_objective - o.objective) <= 1e-6);
    CHECK(t.stats.max_violation <= 1e-8);
    double balance = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      balance += y[i] * r.alphas[i];
      CHECK(r.alphas[i] >= 0.0);
      if (f == Formulation::L1) CHECK(r.alphas[i] <= c + 1e-12);
    }
    CHECK(std::abs(balance) <= 1e-9 + 1e-3);
    // Dual objective never decreases across pair updates.
    for (std::size_t t = 1; t < r.stats.objective_trace.size(); ++t)
      CHECK(r.stats.objective_trace[t] >= r.stats.objective_trace[t - 1] - 1e-12);
  }
}

TEST_CASE("support vectors belong to the training view and carry positive multipliers") {
  const Dataset d = make_two_gaussians(400, 3);
  std::vector<std::size_t> view;
  for (std::size_t i = 0; i < d.size(); i += 3) view.push_back(i);
  const auto r = solve(d, view, KernelSpec::rbf(0.5, 1), {});
  const std::set<std::size_t> members(view.begin(), view.end());
  for (std::size_t k = 0; k < r.model.num_sv(); ++k) {
    CHECK(members.count(r.model.sv_indices[k]) == 1);
    CHECK(r.model.alphas[k] > 0.0);
    CHECK(r.model.sv_labels[k] == d.label(r.model.sv_indices[k]));
  }
  const auto [pos, neg] = r.model.sv_class_split();
  CHECK(pos + neg == r.model.num_sv());
  CHECK(r.model.training_view_id == d.fingerprint());
}

TEST_CASE("model JSON round trip preserves predictions exactly") {
  const Dataset d = make_two_gaussians(300, 8);
  for (const auto& spec : {KernelSpec::linear(1), KernelSpec::polynomial(0.5, 3, 1),
                           KernelSpec::rbf(1, 5, Formulation::L2)}) {
    const auto m = solve(d, spec).model;
    const auto back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
    CHECK(back.spec == m.spec);
    CHECK(back.sv_indices == m.sv_indices);
    for (std::size_t i = 0; i < d.size(); ++i)
      CHECK(decision_value(back, d.sample(i)) == decision_value(m, d.sample(i)));
  }
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse("{\"format\":\"other\"}")), ConfigError);
}

TEST_CASE("solver rejects bad input") {
  const Dataset d = line({0, 1}, {1, -1});
  CHECK_THROWS_AS(solve(d, std::vector<std::size_t>{}, KernelSpec::linear(1), {}), ConfigError);
  CHECK_THROWS_AS(solve(d, std::vector<std::size_t>{5}, KernelSpec::linear(1), {}), ContractError);
  SolverConfig bad;
  bad.kkt_tol = 0;
  CHECK_THROWS_AS(solve(d, KernelSpec::linear(1), bad), ConfigError);
}

TEST_CASE("iteration cap flags the model as unconverged") {
  const Dataset d = make_two_gaussians(200, 4);
  SolverConfig cfg;
  cfg.max_iterations = 3;
  const auto r = solve(d, KernelSpec::rbf(1, 1), cfg);
  CHECK(r.model.unconverged);
  CHECK(r.stats.iterations == 3);
}
