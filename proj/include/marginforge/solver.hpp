#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "marginforge/dataset.hpp"
#include "marginforge/kernel.hpp"

namespace marginforge {

struct SolverConfig {
  double kkt_tol = 1e-3;
  std::uint64_t max_iterations = 10'000'000;  // pair updates
  std::size_t cache_mb = 256;
  // Working-pair ties are broken by index order, so the seed does not
  // affect the result; it is carried for provenance.
  std::uint64_t seed = 0;
  // Record the dual objective after every pair update (O(n) each).
  bool record_objective = false;

  void validate() const;
};

/// Trained classifier sign(sum_i y_i alpha_i K(x_i, x) + b).
///
/// sv_indices are row indices of the dataset the model was trained on,
/// identified by training_view_id (the dataset fingerprint). The support
/// vectors themselves are stored so the model can predict on its own.
struct SvmModel {
  KernelSpec spec;
  std::vector<std::size_t> sv_indices;
  std::vector<double> alphas;
  std::vector<Label> sv_labels;
  std::vector<SparseVector> support_vectors;
  double bias = 0.0;
  std::uint64_t training_view_id = 0;
  bool degenerate = false;   // single-class training view: constant classifier
  bool unconverged = false;  // iteration cap hit before the KKT tolerance

  std::size_t num_sv() const noexcept { return sv_indices.size(); }
  /// Support-vector counts split by label (+1, -1).
  std::pair<std::size_t, std::size_t> sv_class_split() const noexcept;
};

struct SolveStats {
  std::uint64_t iterations = 0;
  double max_violation = 0.0;  // m(alpha) - M(alpha) at exit
  double dual_objective = 0.0;
  std::vector<double> objective_trace;  // filled when record_objective
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
};

struct SolveResult {
  SvmModel model;
  std::vector<double> alphas;  // one per view position, including zeros
  SolveStats stats;
};

/// Sequential minimal optimization on the dual
///   max sum a_i - 1/2 sum y_i y_j a_i a_j K(x_i, x_j)
///   s.t. sum y_i a_i = 0, 0 <= a_i <= C   (no upper bound under L2).
/// Working pair: maximal violating pair, ties to the lower index.
SolveResult solve(const Dataset& data, std::span<const std::size_t> view,
                  const KernelSpec& spec, const SolverConfig& cfg = {});
SolveResult solve(const Dataset& data, const KernelSpec& spec,
                  const SolverConfig& cfg = {});

double decision_value(const SvmModel& model, const SparseVector& x) noexcept;

/// sign(decision_value), with 0 mapped to +1.
Label classify(const SvmModel& model, const SparseVector& x) noexcept;
Label classify_value(double decision) noexcept;

/// Dual objective of `alphas` (one per view position) using the effective
/// kernel. Defined for any alphas, feasible or not.
double dual_objective(const Dataset& data, std::span<const std::size_t> view,
                      const KernelSpec& spec, std::span<const double> alphas);

/// Identity view 0..n-1.
std::vector<std::size_t> full_view(std::size_t n);

}  // namespace marginforge
