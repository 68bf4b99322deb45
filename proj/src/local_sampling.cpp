#include "marginforge/local_sampling.hpp"

#include <algorithm>
#include <cmath>

#include "marginforge/error.hpp"
#include "marginforge/parallel.hpp"
#include "marginforge/random.hpp"

namespace marginforge {
namespace {

constexpr double kRadiusFloor = 1e-12;

std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

std::vector<std::size_t> complement(std::size_t n,
                                    std::span<const std::size_t> sorted) {
  std::vector<std::size_t> out;
  out.reserve(n - std::min(n, sorted.size()));
  std::size_t e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (e < sorted.size() && sorted[e] < i) ++e;
    if (e < sorted.size() && sorted[e] == i) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<double> radii_within(const Dataset& train,
                                 std::span<const std::size_t> support,
                                 std::size_t k) {
  NeighborIndex index(train, {support.begin(), support.end()});
  std::vector<double> radii(support.size());
  for (std::size_t j = 0; j < support.size(); ++j)
    radii[j] = index.kth_nn_distance(j, k);
  return radii;
}

std::vector<std::size_t> merge_training_set(
    std::span<const std::size_t> support,
    const std::vector<std::vector<std::size_t>>& draws) {
  std::vector<std::size_t> out(support.begin(), support.end());
  for (const auto& d : draws) out.insert(out.end(), d.begin(), d.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

void LocalSamplingConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (bags < 1) throw ConfigError("number of subsamples L must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be positive");
  kernel.validate();
  solver.validate();
}

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

std::size_t neighbor_order(std::size_t m) {
  if (m < 2) throw PipelineError("need at least two support vectors, got " +
                                 std::to_string(m));
  const auto k = static_cast<std::size_t>(std::floor(std::log(static_cast<double>(m))));
  return std::clamp<std::size_t>(k, 1, m - 1);
}

std::vector<double> sampling_weights(std::span<const double> radii) {
  if (radii.empty()) throw ConfigError("sampling_weights: empty radius list");
  double max_r = 0.0;
  for (double r : radii) {
    if (!(r >= 0.0) || !std::isfinite(r))
      throw ConfigError("sampling_weights: radii must be finite and >= 0");
    max_r = std::max(max_r, r);
  }
  const std::size_t m = radii.size();
  std::vector<double> w(m);
  if (max_r == 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(m));
    return w;
  }
  // Work with rho / max(rho) so the floor and the reciprocals stay finite.
  double sum = 0.0, carry = 0.0;  // Neumaier summation
  for (std::size_t j = 0; j < m; ++j) {
    const double scaled = std::max(radii[j] / max_r, kRadiusFloor);
    w[j] = 1.0 / scaled;
    const double t = sum + w[j];
    carry += std::abs(sum) >= std::abs(w[j]) ? (sum - t) + w[j] : (w[j] - t) + sum;
    sum = t;
  }
  const double total = sum + carry;
  for (double& x : w) x /= total;
  return w;
}

BaggingResult initial_bagging(const Dataset& train,
                              const LocalSamplingConfig& cfg) {
  cfg.validate();
  BaggingResult out;
  out.plan = draw_disjoint_subsamples(train.size(), cfg.delta, cfg.bags,
                                      derive_seed(cfg.seed, {tag(StreamTag::Plan)}));
  std::vector<SvmModel> models(cfg.bags);
  parallel_for(cfg.bags, cfg.threads, [&](std::size_t b) {
    models[b] = solve(train, out.plan.subsamples[b], cfg.kernel, cfg.solver).model;
  });
  out.bag_sv_counts.resize(cfg.bags);
  for (std::size_t b = 0; b < cfg.bags; ++b) {
    out.bag_sv_counts[b] = models[b].num_sv();
    if (models[b].degenerate) ++out.degenerate_bags;
    out.support_union.insert(out.support_union.end(),
                             models[b].sv_indices.begin(),
                             models[b].sv_indices.end());
  }
  std::sort(out.support_union.begin(), out.support_union.end());
  out.support_union.erase(
      std::unique(out.support_union.begin(), out.support_union.end()),
      out.support_union.end());
  if (out.support_union.empty())
    throw PipelineError("no initial support vectors: every subsample was degenerate");
  return out;
}

std::vector<std::vector<std::size_t>> draw_ball_samples(
    const Dataset& train, const NeighborIndex& outside,
    std::span<const std::size_t> centers, std::span<const double> weights,
    double radius, std::uint64_t seed, std::size_t threads,
    std::vector<std::size_t>* candidate_counts) {
  if (centers.size() != weights.size())
    throw ContractError("draw_ball_samples: centers and weights differ in size");
  std::vector<std::vector<std::size_t>> draws(centers.size());
  std::vector<std::size_t> counts(centers.size(), 0);
  parallel_for(centers.size(), threads, [&](std::size_t j) {
    const auto candidates = outside.rows_within(train.sample(centers[j]), radius);
    counts[j] = candidates.size();
    const std::size_t take = std::min(
        candidates.size(),
        round_half_up(weights[j] * static_cast<double>(candidates.size())));
    if (take == 0) return;
    Rng rng(derive_seed(seed, {tag(StreamTag::Ball), j}));
    draws[j] = rng.sample_without_replacement(candidates, take);
    std::sort(draws[j].begin(), draws[j].end());
  });
  if (candidate_counts) *candidate_counts = std::move(counts);
  return draws;
}

EnrichmentTrace enrich(const Dataset& train, std::span<const std::size_t> bags,
                       std::span<const std::size_t> support_union, double beta,
                       std::uint64_t seed, std::size_t threads) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  EnrichmentTrace trace;
  trace.support_union.assign(support_union.begin(), support_union.end());
  trace.k = neighbor_order(support_union.size());
  trace.radii = radii_within(train, support_union, trace.k);
  trace.median_radius = median_radius(trace.radii);
  trace.beta = beta;
  trace.radius = beta * trace.median_radius;
  trace.weights = sampling_weights(trace.radii);
  const NeighborIndex outside(train, complement(train.size(), bags));
  trace.draws = draw_ball_samples(train, outside, support_union, trace.weights,
                                  trace.radius, seed, threads,
                                  &trace.candidate_counts);
  trace.training_set = merge_training_set(support_union, trace.draws);
  return trace;
}

LocalSampler::LocalSampler(const Dataset& train, LocalSamplingConfig cfg)
    : train_(train), cfg_(std::move(cfg)) {
  cfg_.validate();
  Stopwatch bag_clock;
  bagging_ = initial_bagging(train_, cfg_);
  timing_.bagging = bag_clock.seconds();

  Stopwatch nn_clock;
  const auto& support = bagging_.support_union;
  k_ = neighbor_order(support.size());
  radii_ = radii_within(train_, support, k_);
  median_ = median_radius(radii_);
  weights_ = sampling_weights(radii_);
  outside_ = std::make_unique<NeighborIndex>(
      train_, complement(train_.size(), bagging_.plan.pooled));
  timing_.neighbors = nn_clock.seconds();
}

LocalSamplingResult LocalSampler::run(double beta) const {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ConfigError("beta must be positive");
  LocalSamplingResult out;
  out.timing = timing_;
  out.sv_initial = bagging_.support_union.size();

  Stopwatch sample_clock;
  EnrichmentTrace& trace = out.trace;
  trace.support_union = bagging_.support_union;
  trace.k = k_;
  trace.radii = radii_;
  trace.median_radius = median_;
  trace.beta = beta;
  trace.radius = beta * median_;
  trace.weights = weights_;
  trace.draws = draw_ball_samples(train_, *outside_, trace.support_union,
                                  trace.weights, trace.radius, cfg_.seed,
                                  cfg_.threads, &trace.candidate_counts);
  trace.training_set = merge_training_set(trace.support_union, trace.draws);
  out.timing.sampling = sample_clock.seconds();

  Stopwatch solve_clock;
  out.model = solve(train_, trace.training_set, cfg_.kernel, cfg_.solver).model;
  out.timing.final_solve = solve_clock.seconds();
  return out;
}

LocalSamplingResult local_sampling_svm(const Dataset& train,
                                       const LocalSamplingConfig& cfg) {
  LocalSampler sampler(train, cfg);
  return sampler.run(cfg.beta);
}

}  // namespace marginforge
