#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "marginforge/dataset.hpp"
#include "marginforge/kernel.hpp"
#include "marginforge/neighbors.hpp"
#include "marginforge/solver.hpp"

namespace marginforge {

/// Local sampling SVM: solve on L disjoint bags, pool their support vectors
/// V, estimate the support-vector intensity around each v_j from the
/// distance to its k-th neighbor in V, then add points drawn from balls
/// around each v_j (outside the bags) in proportion to that intensity and
/// solve once more.
struct LocalSamplingConfig {
  double delta = 0.05;
  std::size_t bags = 10;
  double beta = 0.1;
  std::uint64_t seed = 0;
  KernelSpec kernel;
  SolverConfig solver;
  std::size_t threads = 1;

  void validate() const;
};

struct BaggingResult {
  SubsamplePlan plan;
  std::vector<std::size_t> support_union;  // V, ascending train rows
  std::vector<std::size_t> bag_sv_counts;
  std::size_t degenerate_bags = 0;
};

struct EnrichmentTrace {
  std::vector<std::size_t> support_union;  // V
  std::size_t k = 0;
  std::vector<double> radii;  // rho_j, aligned with support_union
  double median_radius = 0.0;
  double beta = 0.0;
  double radius = 0.0;  // r = beta * median
  std::vector<double> weights;                  // eta_j
  std::vector<std::size_t> candidate_counts;    // |ball_j \ T|
  std::vector<std::vector<std::size_t>> draws;  // D_j, ascending
  std::vector<std::size_t> training_set;        // V u (u_j D_j), ascending
};

struct PhaseTiming {
  double bagging = 0.0;
  double neighbors = 0.0;
  double sampling = 0.0;
  double final_solve = 0.0;
  double total() const { return bagging + neighbors + sampling + final_solve; }
};

struct LocalSamplingResult {
  SvmModel model;
  EnrichmentTrace trace;
  PhaseTiming timing;
  std::size_t sv_initial = 0;  // |V|
};

/// floor(x + 0.5).
std::size_t round_half_up(double x);

/// clamp(floor(ln m), 1, m - 1). Requires m >= 2.
std::size_t neighbor_order(std::size_t m);

/// eta_j = rho_j^-1 / sum_i rho_i^-1, with radii below 1e-12 * max(rho)
/// raised to that floor; all-zero radii give uniform weights.
std::vector<double> sampling_weights(std::span<const double> radii);

/// Solves every bag independently and unions the support vectors.
/// Throws PipelineError when no bag yields a support vector.
BaggingResult initial_bagging(const Dataset& train,
                              const LocalSamplingConfig& cfg);

/// For each center, draws round_half_up(weight_j * |candidates_j|) rows
/// without replacement from the rows of `outside` within distance r.
/// Draw j uses the child seed (seed, j).
std::vector<std::vector<std::size_t>> draw_ball_samples(
    const Dataset& train, const NeighborIndex& outside,
    std::span<const std::size_t> centers, std::span<const double> weights,
    double radius, std::uint64_t seed, std::size_t threads,
    std::vector<std::size_t>* candidate_counts = nullptr);

/// Radii, weights and ball draws around the support vectors V, excluding
/// the bag rows T (both ascending). Requires |V| >= 2.
EnrichmentTrace enrich(const Dataset& train, std::span<const std::size_t> bags,
                       std::span<const std::size_t> support_union, double beta,
                       std::uint64_t seed, std::size_t threads = 1);

/// Runs the stages that do not depend on beta once, then serves any number
/// of beta values. run(beta) is equivalent to local_sampling_svm with that
/// beta and the same seed.
class LocalSampler {
 public:
  LocalSampler(const Dataset& train, LocalSamplingConfig cfg);

  LocalSamplingResult run(double beta) const;

  const BaggingResult& bagging() const noexcept { return bagging_; }
  const LocalSamplingConfig& config() const noexcept { return cfg_; }
  /// Wall time of the shared stages (bagging, neighbor radii, ball index).
  double setup_seconds() const noexcept {
    return timing_.bagging + timing_.neighbors;
  }

 private:
  const Dataset& train_;
  LocalSamplingConfig cfg_;
  BaggingResult bagging_;
  std::size_t k_ = 0;
  std::vector<double> radii_;
  std::vector<double> weights_;
  double median_ = 0.0;
  std::unique_ptr<NeighborIndex> outside_;
  PhaseTiming timing_;
};

LocalSamplingResult local_sampling_svm(const Dataset& train,
                                       const LocalSamplingConfig& cfg);

}  // namespace marginforge
