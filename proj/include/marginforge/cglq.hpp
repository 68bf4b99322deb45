#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marginforge/dataset.hpp"
#include "marginforge/kernel.hpp"
#include "marginforge/solver.hpp"

namespace marginforge {

/// Subsample + nearest-neighbor enrichment baseline: solve on a random
/// delta-fraction, then repeatedly add the K nearest neighbors (in the whole
/// training set) of every current support vector plus a fresh random
/// delta-fraction, and re-solve, until the validation error stops improving
/// by at least eps_stop.
struct CglqConfig {
  double delta = 0.05;
  std::size_t neighbors = 5;  // K
  double eps_stop = 0.001;
  std::size_t max_rounds = 20;
  std::uint64_t seed = 0;
  KernelSpec kernel;
  SolverConfig solver;

  void validate() const;
};

struct CglqRound {
  std::size_t training_size = 0;
  std::size_t num_sv = 0;
  double validation_error = 0.0;
  double seconds = 0.0;
};

struct CglqResult {
  SvmModel model;              // the lowest validation error round
  std::size_t best_round = 0;  // 0 = initial solve
  std::vector<CglqRound> rounds;
  std::size_t sv_initial = 0;
  double total_seconds = 0.0;
  std::vector<std::string> warnings;

  std::size_t enrichment_rounds() const {
    return rounds.empty() ? 0 : rounds.size() - 1;
  }
};

/// True when the error did not improve by at least eps (prev - cur < eps).
bool cglq_stalled(double previous_error, double error, double eps_stop);

CglqResult cglq(const Dataset& train, const CglqConfig& cfg,
                const Dataset& validation);

}  // namespace marginforge
