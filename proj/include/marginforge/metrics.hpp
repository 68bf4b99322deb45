#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "marginforge/dataset.hpp"
#include "marginforge/solver.hpp"

namespace marginforge {

/// Fraction of `test` misclassified. Throws ConfigError on an empty set.
double error_rate(const SvmModel& model, const Dataset& test);

struct SvOverlap {
  std::size_t sv_real = 0;   // |SV(sub) n SV(full)|
  double pct_full_sv = 0.0;  // sv_real / |SV(full)| * 100
};

/// Both models must come from the same training dataset (matching
/// training_view_id), else ContractError.
SvOverlap sv_overlap(const SvmModel& sub, const SvmModel& full);

/// err_sub / err_full; nullopt ("n/a") when err_full is zero.
std::optional<double> error_ratio(double err_sub, double err_full);

/// Fraction of points with |decision value| < eps (strict). eps < 0 is
/// rejected with ConfigError.
double indecision_probability(const SvmModel& model, const Dataset& points,
                              double eps);

/// Same model with every multiplier and the bias divided by M >= 1.
SvmModel scale_model(const SvmModel& model, double M);

/// One row of a results table for one run.
struct RunMetrics {
  std::size_t sv_initial = 0;
  std::size_t sv_final = 0;
  std::size_t sv_real = 0;
  double pct_full_sv = 0.0;
  double error_rate = 0.0;
  std::optional<double> error_ratio;
  double time_s = 0.0;
  double pct_full_time = 0.0;
  double beta_final = 0.0;  // local sampling
  std::size_t rounds = 0;   // CGLQ enrichment rounds
};

struct MeanMetrics {
  double sv_initial = 0.0;
  double sv_final = 0.0;
  double sv_real = 0.0;
  double pct_full_sv = 0.0;
  double error_rate = 0.0;
  std::optional<double> error_ratio;  // nullopt if any run lacks one
  double time_s = 0.0;
  double pct_full_time = 0.0;
  double beta_final = 0.0;
  double rounds = 0.0;
};

struct AggregateReport {
  std::vector<RunMetrics> runs;
  MeanMetrics mean;
  double error_sd = 0.0;      // sample (n - 1) standard deviation
  bool sd_undefined = false;  // single run: sd reported as 0
  double error_min = 0.0;
  double error_max = 0.0;
};

/// Means, spread and extremes recomputed from the ordered run list.
AggregateReport aggregate(std::vector<RunMetrics> runs);

/// Runs `experiment(rep, child_seed)` for rep = 0..reps-1, child seeds
/// derived from (seed, rep), possibly concurrently, and aggregates in rep
/// order.
AggregateReport run_replications(
    const std::function<RunMetrics(std::size_t, std::uint64_t)>& experiment,
    std::size_t reps, std::uint64_t seed, std::size_t threads = 1);

}  // namespace marginforge
