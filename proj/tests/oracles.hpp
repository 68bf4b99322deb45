#pragma once

// Reference implementations used only by the tests. They work on dense
// std::vector rows and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "marginforge/dataset.hpp"
#include "marginforge/kernel.hpp"

namespace oracle {

using Row = std::vector<double>;

inline double dense_dot(const Row& a, const Row& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dense_sqdist(const Row& a, const Row& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

inline double dense_kernel(const marginforge::KernelSpec& spec, const Row& a,
                           const Row& b) {
  using marginforge::KernelFamily;
  switch (spec.family) {
    case KernelFamily::Linear:
      return dense_dot(a, b);
    case KernelFamily::Polynomial:
      return std::pow(spec.gamma * dense_dot(a, b), spec.degree);
    case KernelFamily::Rbf:
      return std::exp(-spec.gamma * dense_sqdist(a, b));
  }
  return 0.0;
}

struct DualSolution {
  std::vector<double> alphas;
  double objective = 0.0;
};

// Maximizes sum(a) - 1/2 a'Qa subject to y'a = 0 and the box, by cyclic
// exact maximization over every pair (i, j) until no pair moves by more
// than `tol`. Under L2 the diagonal gains 1/(2C) and the box is [0, inf).
inline DualSolution solve_dual(const std::vector<Row>& x, const std::vector<int>& y,
                               const marginforge::KernelSpec& spec,
                               double tol = 1e-10, std::size_t max_sweeps = 2'000'000) {
  const std::size_t n = x.size();
  const bool l2 = spec.formulation == marginforge::Formulation::L2;
  const double upper = l2 ? INFINITY : spec.cost;
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double k = dense_kernel(spec, x[i], x[j]);
      if (l2 && i == j) k += 1.0 / (2.0 * spec.cost);
      q[i][j] = y[i] * y[j] * k;
    }
  std::vector<double> a(n, 0.0);
  std::vector<double> grad(n, 1.0);  // 1 - (Qa)_i
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        // Direction keeping y'a fixed: a_i += y_i t, a_j -= y_j t.
        const double curv = q[i][i] + q[j][j] - 2.0 * y[i] * y[j] * q[i][j];
        const double slope = y[i] * grad[i] - y[j] * grad[j];
        if (curv <= 1e-15 && std::abs(slope) < 1e-15) continue;
        double t = curv > 1e-15 ? slope / curv : (slope > 0 ? INFINITY : -INFINITY);
        // Box: 0 <= a_i + y_i t <= U and 0 <= a_j - y_j t <= U.
        double lo = -INFINITY, hi = INFINITY;
        auto clip = [&](double ai, double dir) {
          // ai + dir t in [0, upper], dir = +-1
          const double t0 = (0.0 - ai) / dir, t1 = (upper - ai) / dir;
          lo = std::max(lo, std::min(t0, t1));
          hi = std::min(hi, std::max(t0, t1));
        };
        clip(a[i], y[i]);
        clip(a[j], -y[j]);
        t = std::clamp(t, lo, hi);
        if (!std::isfinite(t) || t == 0.0) continue;
        const double di = y[i] * t, dj = -y[j] * t;
        a[i] += di;
        a[j] += dj;
        for (std::size_t r = 0; r < n; ++r) grad[r] -= q[r][i] * di + q[r][j] * dj;
        moved = std::max(moved, std::abs(t));
      }
    if (moved < tol) break;
  }
  DualSolution out;
  out.alphas = a;
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lin += a[i];
    for (std::size_t j = 0; j < n; ++j) quad += a[i] * a[j] * q[i][j];
  }
  out.objective = lin - 0.5 * quad;
  return out;
}

// Distance from point j to its k-th nearest other point, ties by id.
inline double kth_nn(const std::vector<Row>& pts, std::size_t j, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (i != j) d.emplace_back(dense_sqdist(pts[i], pts[j]), i);
  std::sort(d.begin(), d.end());
  return std::sqrt(d[k - 1].first);
}

inline std::vector<std::size_t> ball(const std::vector<Row>& pts,
                                     const std::vector<bool>& excluded,
                                     const Row& center, double r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!excluded[i] && std::sqrt(dense_sqdist(pts[i], center)) <= r) out.push_back(i);
  return out;
}

inline std::vector<Row> random_cloud(std::mt19937_64& gen, std::size_t n, std::size_t d,
                                     bool with_duplicates = false) {
  std::normal_distribution<double> normal;
  std::vector<Row> pts(n, Row(d));
  for (auto& p : pts)
    for (auto& v : p) v = normal(gen);
  if (with_duplicates && n > 4)
    for (std::size_t i = 0; i < n / 10; ++i) pts[n - 1 - i] = pts[i];
  return pts;
}

inline marginforge::Dataset to_dataset(const std::vector<Row>& pts,
                                       const std::vector<int>& y) {
  std::vector<marginforge::SparseVector> samples;
  std::vector<marginforge::Label> labels;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    samples.push_back(marginforge::SparseVector::from_dense(pts[i]));
    labels.push_back(static_cast<marginforge::Label>(y.empty() ? 1 : y[i]));
  }
  return marginforge::Dataset(std::move(samples), std::move(labels));
}

}  // namespace oracle
