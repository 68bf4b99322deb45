#include "marginforge/solver.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "marginforge/error.hpp"
#include "marginforge/kernel_rows.hpp"

namespace marginforge {
namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

SvmModel constant_model(const KernelSpec& spec, const Dataset& data,
                        Label label) {
  SvmModel m;
  m.spec = spec;
  m.bias = label > 0 ? 1.0 : -1.0;
  m.training_view_id = data.fingerprint();
  m.degenerate = true;
  return m;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(kkt_tol > 0.0)) throw ConfigError("kkt_tol must be positive");
  if (max_iterations == 0) throw ConfigError("max_iterations must be >= 1");
}

std::pair<std::size_t, std::size_t> SvmModel::sv_class_split() const noexcept {
  std::size_t pos = 0;
  for (Label y : sv_labels) pos += y > 0;
  return {pos, sv_labels.size() - pos};
}

std::vector<std::size_t> full_view(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

SolveResult solve(const Dataset& data, const KernelSpec& spec,
                  const SolverConfig& cfg) {
  const auto view = full_view(data.size());
  return solve(data, view, spec, cfg);
}

SolveResult solve(const Dataset& data, std::span<const std::size_t> view,
                  const KernelSpec& spec, const SolverConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (view.empty()) throw ConfigError("solve: empty training view");
  for (std::size_t idx : view)
    if (idx >= data.size()) throw ContractError("solve: view index out of range");

  const std::size_t n = view.size();
  SolveResult result;
  result.alphas.assign(n, 0.0);

  const auto [pos, neg] = data.class_counts(view);
  if (pos == 0 || neg == 0) {
    result.model = constant_model(spec, data, pos > 0 ? Label{1} : Label{-1});
    return result;
  }

  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) y[t] = data.label(view[t]);

  const double upper = spec.formulation == Formulation::L1 ? spec.cost : kInf;
  KernelRows rows(data, view, spec, cfg.cache_mb);
  std::vector<double>& alpha = result.alphas;
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a

  auto in_up = [&](std::size_t t) {
    return y[t] > 0 ? alpha[t] < upper : alpha[t] > 0.0;
  };
  auto in_low = [&](std::size_t t) {
    return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < upper;
  };
  auto objective = [&] {
    // f = 1/2 a'(G + e) - e'a = 1/2 sum a_t (G_t - 1); dual value is -f.
    double f = 0.0;
    for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (grad[t] - 1.0);
    return -0.5 * f;
  };

  SolveStats& stats = result.stats;
  bool converged = false;
  while (true) {
    double gmax = -kInf, gmin = kInf;
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    stats.max_violation = (i == n || j == n) ? 0.0 : gmax - gmin;
    if (i == n || j == n || gmax - gmin <= cfg.kkt_tol) {
      converged = true;
      break;
    }
    if (stats.iterations >= cfg.max_iterations) break;
    ++stats.iterations;

    const std::span<const double> ki = rows.row(i);
    const std::span<const double> kj = rows.row(j);
    const double qij = y[i] * y[j] * ki[j];
    const double old_i = alpha[i], old_j = alpha[j];

    if (y[i] != y[j]) {
      double quad = rows.diagonal(i) + rows.diagonal(j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (upper < kInf) {
        if (diff > 0.0) {
          if (alpha[i] > upper) {
            alpha[i] = upper;
            alpha[j] = upper - diff;
          }
        } else if (alpha[j] > upper) {
          alpha[j] = upper;
          alpha[i] = upper + diff;
        }
      }
    } else {
      double quad = rows.diagonal(i) + rows.diagonal(j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (upper < kInf && sum > upper) {
        if (alpha[i] > upper) {
          alpha[i] = upper;
          alpha[j] = sum - upper;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (upper < kInf && sum > upper) {
        if (alpha[j] > upper) {
          alpha[j] = upper;
          alpha[i] = sum - upper;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double di = (alpha[i] - old_i) * y[i];
    const double dj = (alpha[j] - old_j) * y[j];
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += y[t] * (ki[t] * di + kj[t] * dj);

    if (cfg.record_objective) stats.objective_trace.push_back(objective());
  }

  stats.dual_objective = objective();
  stats.cache_hits = rows.hits();
  stats.cache_misses = rows.misses();

  // Bias: average over free multipliers of y_t - sum_s y_s a_s K_st, which
  // equals -y_t G_t; otherwise the midpoint of the feasible interval.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double lb = -kInf, ub = kInf;
  for (std::size_t t = 0; t < n; ++t) {
    const double v = -y[t] * grad[t];
    if (alpha[t] > 0.0 && alpha[t] < upper) {
      free_sum += v;
      ++free_count;
    } else if ((alpha[t] <= 0.0) == (y[t] > 0)) {
      lb = std::max(lb, v);  // y=+1 at 0, or y=-1 at C
    } else {
      ub = std::min(ub, v);
    }
  }
  double bias;
  if (free_count > 0) {
    bias = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(lb) && std::isfinite(ub)) {
    bias = 0.5 * (lb + ub);
  } else {
    bias = std::isfinite(lb) ? lb : (std::isfinite(ub) ? ub : 0.0);
  }

  SvmModel& model = result.model;
  model.spec = spec;
  model.bias = bias;
  model.training_view_id = data.fingerprint();
  model.unconverged = !converged;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    model.sv_indices.push_back(view[t]);
    model.alphas.push_back(alpha[t]);
    model.sv_labels.push_back(data.label(view[t]));
    model.support_vectors.push_back(data.sample(view[t]));
  }
  return result;
}

double decision_value(const SvmModel& model, const SparseVector& x) noexcept {
  double sum = 0.0;
  for (std::size_t s = 0; s < model.sv_indices.size(); ++s)
    sum += model.sv_labels[s] * model.alphas[s] *
           kernel_eval(model.spec, model.support_vectors[s], x);
  return sum + model.bias;
}

Label classify_value(double decision) noexcept {
  return decision >= 0.0 ? Label{1} : Label{-1};
}

Label classify(const SvmModel& model, const SparseVector& x) noexcept {
  return classify_value(decision_value(model, x));
}

double dual_objective(const Dataset& data, std::span<const std::size_t> view,
                      const KernelSpec& spec, std::span<const double> alphas) {
  if (alphas.size() != view.size())
    throw ContractError("dual_objective: alphas and view sizes differ");
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    linear += alphas[i];
    if (alphas[i] == 0.0) continue;
    const double ai = alphas[i] * data.label(view[i]);
    for (std::size_t j = 0; j < view.size(); ++j) {
      if (alphas[j] == 0.0) continue;
      quad += ai * alphas[j] * data.label(view[j]) *
              effective_kernel(spec, data.sample(view[i]),
                               data.sample(view[j]), i == j);
    }
  }
  return linear - 0.5 * quad;
}

}  // namespace marginforge
