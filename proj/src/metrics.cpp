#include "marginforge/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "marginforge/error.hpp"
#include "marginforge/parallel.hpp"
#include "marginforge/random.hpp"

namespace marginforge {

double error_rate(const SvmModel& model, const Dataset& test) {
  if (test.empty()) throw ConfigError("error_rate: empty test set");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < test.size(); ++i)
    wrong += classify(model, test.sample(i)) != test.label(i);
  return static_cast<double>(wrong) / static_cast<double>(test.size());
}

SvOverlap sv_overlap(const SvmModel& sub, const SvmModel& full) {
  if (sub.training_view_id != full.training_view_id)
    throw ContractError("sv_overlap: models were trained on different datasets");
  std::vector<std::size_t> a(sub.sv_indices), b(full.sv_indices);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::size_t> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(both));
  SvOverlap out;
  out.sv_real = both.size();
  out.pct_full_sv = b.empty() ? 0.0
                              : static_cast<double>(both.size()) /
                                    static_cast<double>(b.size()) * 100.0;
  return out;
}

std::optional<double> error_ratio(double err_sub, double err_full) {
  if (err_full == 0.0) return std::nullopt;
  return err_sub / err_full;
}

double indecision_probability(const SvmModel& model, const Dataset& points,
                              double eps) {
  if (points.empty()) throw ConfigError("indecision_probability: no points");
  if (eps < 0.0 || std::isnan(eps))
    throw ConfigError("indecision_probability: eps must be >= 0");
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    count += std::abs(decision_value(model, points.sample(i))) < eps;
  return static_cast<double>(count) / static_cast<double>(points.size());
}

SvmModel scale_model(const SvmModel& model, double M) {
  if (!(M >= 1.0) || !std::isfinite(M))
    throw ConfigError("scale_model: M must be >= 1");
  SvmModel out = model;
  for (double& a : out.alphas) a /= M;
  out.bias /= M;
  return out;
}

AggregateReport aggregate(std::vector<RunMetrics> runs) {
  AggregateReport rep;
  rep.runs = std::move(runs);
  const std::size_t n = rep.runs.size();
  if (n == 0) return rep;
  MeanMetrics& m = rep.mean;
  bool ratio_ok = true;
  double ratio_sum = 0.0;
  rep.error_min = rep.error_max = rep.runs.front().error_rate;
  for (const RunMetrics& r : rep.runs) {
    m.sv_initial += static_cast<double>(r.sv_initial);
    m.sv_final += static_cast<double>(r.sv_final);
    m.sv_real += static_cast<double>(r.sv_real);
    m.pct_full_sv += r.pct_full_sv;
    m.error_rate += r.error_rate;
    m.time_s += r.time_s;
    m.pct_full_time += r.pct_full_time;
    m.beta_final += r.beta_final;
    m.rounds += static_cast<double>(r.rounds);
    if (r.error_ratio) ratio_sum += *r.error_ratio;
    else ratio_ok = false;
    rep.error_min = std::min(rep.error_min, r.error_rate);
    rep.error_max = std::max(rep.error_max, r.error_rate);
  }
  const double dn = static_cast<double>(n);
  m.sv_initial /= dn;
  m.sv_final /= dn;
  m.sv_real /= dn;
  m.pct_full_sv /= dn;
  m.error_rate /= dn;
  m.time_s /= dn;
  m.pct_full_time /= dn;
  m.beta_final /= dn;
  m.rounds /= dn;
  if (ratio_ok) m.error_ratio = ratio_sum / dn;

  if (n == 1) {
    rep.sd_undefined = true;
    rep.error_sd = 0.0;
  } else {
    double ss = 0.0;
    for (const RunMetrics& r : rep.runs) {
      const double d = r.error_rate - m.error_rate;
      ss += d * d;
    }
    rep.error_sd = std::sqrt(ss / (dn - 1.0));
  }
  return rep;
}

AggregateReport run_replications(
    const std::function<RunMetrics(std::size_t, std::uint64_t)>& experiment,
    std::size_t reps, std::uint64_t seed, std::size_t threads) {
  if (reps == 0) throw ConfigError("run_replications: reps must be >= 1");
  std::vector<RunMetrics> runs(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    runs[r] = experiment(
        r, derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::Replication), r}));
  });
  return aggregate(std::move(runs));
}

}  // namespace marginforge
