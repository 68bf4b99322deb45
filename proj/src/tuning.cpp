#include "marginforge/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "marginforge/error.hpp"
#include "marginforge/metrics.hpp"
#include "marginforge/parallel.hpp"
#include "marginforge/random.hpp"
#include "marginforge/sweep.hpp"

namespace marginforge {

std::vector<KernelSpec> ParamGrid::candidates(KernelFamily family,
                                              Formulation formulation) const {
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto cs = sorted(costs);
  const auto gs = sorted(gammas);
  const auto ds = sorted(degrees);
  if (cs.empty()) throw ConfigError("parameter grid: no costs");
  if (family != KernelFamily::Linear && gs.empty())
    throw ConfigError("parameter grid: no gammas");
  if (family == KernelFamily::Polynomial && ds.empty())
    throw ConfigError("parameter grid: no degrees");

  std::vector<KernelSpec> out;
  for (double c : cs) {
    if (family == KernelFamily::Linear) {
      out.push_back(KernelSpec::linear(c, formulation));
      continue;
    }
    for (double g : gs) {
      if (family == KernelFamily::Rbf) {
        out.push_back(KernelSpec::rbf(g, c, formulation));
      } else {
        for (int d : ds) out.push_back(KernelSpec::polynomial(g, d, c, formulation));
      }
    }
  }
  for (const auto& s : out) s.validate();
  return out;
}

CvResult grid_search_cv(const Dataset& train, double sample_fraction,
                        const ParamGrid& grid, KernelFamily family,
                        Formulation formulation, std::size_t folds,
                        std::uint64_t seed, const SolverConfig& solver,
                        std::size_t threads) {
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
    throw ConfigError("grid_search_cv: sample fraction must lie in (0, 1]");
  if (folds < 2) throw ConfigError("grid_search_cv: need at least 2 folds");
  const auto specs = grid.candidates(family, formulation);

  // Stratified sample, then stratified fold assignment.
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < train.size(); ++i)
    by_class[train.label(i) > 0 ? 0 : 1].push_back(i);
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::Fold)}));
  std::vector<std::vector<std::size_t>> fold_rows(folds);
  std::size_t counter = 0, sample_size = 0;
  for (auto& rows : by_class) {
    const std::size_t take = std::min(
        rows.size(),
        round_half_up(sample_fraction * static_cast<double>(rows.size())));
    if (take < folds)
      throw ConfigError("grid_search_cv: the sample holds " + std::to_string(take) +
                        " rows of one class, fewer than the " +
                        std::to_string(folds) + " folds");
    auto picked = rng.sample_without_replacement(rows, take);
    for (std::size_t r : picked) fold_rows[counter++ % folds].push_back(r);
    sample_size += take;
  }
  for (auto& f : fold_rows) std::sort(f.begin(), f.end());

  CvResult result;
  result.sample_size = sample_size;
  result.candidates.resize(specs.size());
  std::vector<std::vector<std::string>> warnings(specs.size());
  parallel_for(specs.size(), threads, [&](std::size_t c) {
    CvCandidate& cand = result.candidates[c];
    cand.spec = specs[c];
    double err_sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> view;
      for (std::size_t g = 0; g < folds; ++g)
        if (g != f) view.insert(view.end(), fold_rows[g].begin(), fold_rows[g].end());
      std::sort(view.begin(), view.end());
      const auto [pos, neg] = train.class_counts(view);
      if (pos == 0 || neg == 0) {
        warnings[c].push_back("fold " + std::to_string(f) +
                              " skipped: single-class training part");
        continue;
      }
      const SvmModel model = solve(train, view, specs[c], solver).model;
      std::size_t wrong = 0;
      for (std::size_t r : fold_rows[f])
        wrong += classify(model, train.sample(r)) != train.label(r);
      err_sum += static_cast<double>(wrong) /
                 static_cast<double>(fold_rows[f].size());
      ++cand.folds_used;
    }
    if (cand.folds_used == 0) {
      cand.disqualified = true;
    } else {
      cand.mean_error = err_sum / static_cast<double>(cand.folds_used);
    }
  });
  for (auto& w : warnings)
    result.warnings.insert(result.warnings.end(), w.begin(), w.end());

  // Candidates are already ordered by (C, gamma, degree): first strict
  // minimum wins ties.
  bool found = false;
  for (const CvCandidate& cand : result.candidates) {
    if (cand.disqualified) continue;
    if (!found || cand.mean_error < result.best_error) {
      result.best = cand.spec;
      result.best_error = cand.mean_error;
      found = true;
    }
  }
  if (!found) throw PipelineError("grid_search_cv: every candidate was disqualified");
  return result;
}

void BetaSchedule::validate() const {
  if (!(start > 0.0)) throw ConfigError("beta schedule: start must be positive");
  if (!(step > 0.0)) throw ConfigError("beta schedule: step must be positive");
  if (!(max >= start)) throw ConfigError("beta schedule: max must be >= start");
}

std::vector<double> BetaSchedule::values() const {
  validate();
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double b = start + static_cast<double>(i) * step;
    if (b > max + 1e-9) break;
    out.push_back(b);
  }
  return out;
}

bool beta_stalled(double previous_error, double error) {
  return error >= previous_error;
}

BetaSweepResult beta_sweep(const Dataset& train, const Dataset& validation,
                           const LocalSamplingConfig& cfg,
                           const BetaSchedule& schedule) {
  if (validation.empty()) throw ConfigError("beta_sweep: validation set is empty");
  Stopwatch clock;
  BetaSweepResult out;
  const auto betas = schedule.values();
  LocalSamplingConfig base = cfg;
  base.beta = betas.front();
  const LocalSampler sampler(train, base);

  auto evaluate = [&](std::size_t step) {
    LocalSamplingResult run = sampler.run(betas[step]);
    const double err = error_rate(run.model, validation);
    out.betas.push_back(betas[step]);
    // Only a strict improvement over every earlier beta replaces the best.
    if (out.errors.empty() ||
        err < *std::min_element(out.errors.begin(), out.errors.end())) {
      out.best = std::move(run);
      out.beta_final = betas[step];
    }
    out.errors.push_back(err);
    return err;
  };
  const SweepOutcome outcome = sweep_until_stall(
      betas.size(), evaluate, beta_stalled);
  out.capped = outcome.capped;
  out.total_seconds = clock.seconds();
  return out;
}

}  // namespace marginforge
