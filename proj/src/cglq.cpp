#include "marginforge/cglq.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "marginforge/error.hpp"
#include "marginforge/metrics.hpp"
#include "marginforge/neighbors.hpp"
#include "marginforge/parallel.hpp"
#include "marginforge/random.hpp"
#include "marginforge/sweep.hpp"

namespace marginforge {
namespace {

std::vector<std::size_t> random_fraction(std::size_t n, std::size_t count,
                                         std::uint64_t seed) {
  Rng rng(seed);
  auto perm = rng.permutation(n);
  perm.resize(count);
  std::sort(perm.begin(), perm.end());
  return perm;
}

}  // namespace

void CglqConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (neighbors < 1) throw ConfigError("CGLQ neighbor count K must be >= 1");
  if (!(eps_stop >= 0.0)) throw ConfigError("eps_stop must be >= 0");
  kernel.validate();
  solver.validate();
}

bool cglq_stalled(double previous_error, double error, double eps_stop) {
  return previous_error - error < eps_stop;
}

CglqResult cglq(const Dataset& train, const CglqConfig& cfg,
                const Dataset& validation) {
  cfg.validate();
  if (validation.empty()) throw ConfigError("cglq: validation set is empty");
  const std::size_t n = train.size();
  const auto fraction = static_cast<std::size_t>(
      std::floor(cfg.delta * static_cast<double>(n)));
  if (fraction < 2)
    throw ConfigError("cglq: floor(delta * n) must be at least 2");

  CglqResult out;
  Stopwatch total;
  std::size_t k = cfg.neighbors;
  if (k > n - 1) {
    k = n - 1;
    out.warnings.push_back("K=" + std::to_string(cfg.neighbors) +
                           " exceeds the sample size; clamped to " +
                           std::to_string(k));
  }
  std::unique_ptr<NeighborIndex> index;
  SvmModel previous;

  auto evaluate = [&](std::size_t round) {
    Stopwatch clock;
    std::vector<std::size_t> training;
    SvmModel model;
    if (round == 0) {
      for (std::uint64_t attempt = 0;; ++attempt) {
        training = random_fraction(
            n, fraction,
            derive_seed(cfg.seed,
                        {static_cast<std::uint64_t>(StreamTag::CglqInitial), attempt}));
        model = solve(train, training, cfg.kernel, cfg.solver).model;
        if (!model.degenerate) break;
        if (attempt == 1)
          throw PipelineError("cglq: initial subsample is single-class after redraw");
        out.warnings.push_back("initial subsample was single-class; redrawn");
      }
      out.sv_initial = model.num_sv();
    } else {
      if (!index) index = std::make_unique<NeighborIndex>(train, full_view(n));
      training = previous.sv_indices;
      for (std::size_t sv : previous.sv_indices) {
        const auto near = index->k_nearest(train.sample(sv), k, sv);
        training.insert(training.end(), near.begin(), near.end());
      }
      const auto fresh = random_fraction(
          n, fraction,
          derive_seed(cfg.seed, {static_cast<std::uint64_t>(StreamTag::CglqRound),
                                 static_cast<std::uint64_t>(round)}));
      training.insert(training.end(), fresh.begin(), fresh.end());
      std::sort(training.begin(), training.end());
      training.erase(std::unique(training.begin(), training.end()), training.end());
      model = solve(train, training, cfg.kernel, cfg.solver).model;
    }
    const double err = error_rate(model, validation);
    out.rounds.push_back({training.size(), model.num_sv(), err, clock.seconds()});
    if (round == 0 || err < out.rounds[out.best_round].validation_error) {
      out.best_round = round;
      out.model = model;
    }
    previous = std::move(model);
    return err;
  };

  sweep_until_stall(1 + cfg.max_rounds, evaluate, [&](double prev, double cur) {
    return cglq_stalled(prev, cur, cfg.eps_stop);
  });
  out.total_seconds = total.seconds();
  return out;
}

}  // namespace marginforge
