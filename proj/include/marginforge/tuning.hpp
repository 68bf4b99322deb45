#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marginforge/dataset.hpp"
#include "marginforge/kernel.hpp"
#include "marginforge/local_sampling.hpp"
#include "marginforge/solver.hpp"

namespace marginforge {

struct ParamGrid {
  std::vector<double> costs{0.1, 1.0, 5.0, 10.0};
  std::vector<double> gammas{0.1, 0.5, 1.0, 2.0, 5.0};
  std::vector<int> degrees{2, 3};

  /// Every combination relevant to `family`, ordered by (C, gamma, degree).
  std::vector<KernelSpec> candidates(KernelFamily family,
                                     Formulation formulation) const;
};

struct CvCandidate {
  KernelSpec spec;
  double mean_error = 0.0;
  std::size_t folds_used = 0;
  bool disqualified = false;
};

struct CvResult {
  KernelSpec best;
  double best_error = 0.0;
  std::size_t sample_size = 0;
  std::vector<CvCandidate> candidates;
  std::vector<std::string> warnings;
};

/// Stratified k-fold cross-validation over a stratified random sample of
/// `sample_fraction` of the training data. The lowest mean error wins;
/// ties go to the smaller C, then gamma, then degree.
CvResult grid_search_cv(const Dataset& train, double sample_fraction,
                        const ParamGrid& grid, KernelFamily family,
                        Formulation formulation = Formulation::L1,
                        std::size_t folds = 10, std::uint64_t seed = 0,
                        const SolverConfig& solver = {},
                        std::size_t threads = 1);

/// beta = start, start + step, ... while beta <= max.
struct BetaSchedule {
  double start = 0.1;
  double step = 0.1;
  double max = 2.0;

  void validate() const;
  std::vector<double> values() const;
};

/// The sweep stops at the first beta whose error is not below the previous.
bool beta_stalled(double previous_error, double error);

struct BetaSweepResult {
  LocalSamplingResult best;
  double beta_final = 0.0;
  std::vector<double> betas;   // evaluated
  std::vector<double> errors;  // validation error per beta
  bool capped = false;
  double total_seconds = 0.0;  // every stage of every iteration
};

/// Runs local sampling at increasing beta until the validation error stops
/// decreasing, and keeps the beta with the lowest error.
BetaSweepResult beta_sweep(const Dataset& train, const Dataset& validation,
                           const LocalSamplingConfig& cfg,
                           const BetaSchedule& schedule = {});

}  // namespace marginforge
