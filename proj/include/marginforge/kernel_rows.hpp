#pragma once

#include <cstddef>
#include <list>
#include <span>
#include <vector>

#include "marginforge/dataset.hpp"
#include "marginforge/kernel.hpp"

namespace marginforge {

/// Rows of the effective kernel matrix over a view of a dataset, with a
/// least-recently-used cache of whole rows.
///
/// At least two rows are always retained, so the span returned by one
/// row() call stays valid across the next call. Values are identical with
/// and without caching. One instance belongs to one solver; not thread-safe.
class KernelRows {
 public:
  static constexpr std::size_t kDenseMaxDim = 64;

  KernelRows(const Dataset& data, std::span<const std::size_t> view,
             const KernelSpec& spec, std::size_t cache_mb);

  std::size_t size() const noexcept { return n_; }

  /// K_eff(view[i], view[j]) for j = 0..size()-1.
  std::span<const double> row(std::size_t i);

  /// K_eff(view[i], view[i]).
  double diagonal(std::size_t i) const noexcept { return diag_[i]; }

  double entry(std::size_t i, std::size_t j) const noexcept;

  std::size_t capacity_rows() const noexcept { return capacity_; }
  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  void compute_row(std::size_t i, std::vector<double>& out) const;

  const Dataset& data_;
  std::vector<std::size_t> view_;
  KernelSpec spec_;
  std::size_t n_;
  std::size_t dim_ = 0;          // nonzero when the dense path is active
  std::vector<double> dense_;    // n_ x dim_ row-major
  std::vector<double> diag_;
  double shift_ = 0.0;

  std::size_t capacity_;
  std::vector<std::vector<double>> rows_;
  std::list<std::size_t> lru_;  // front = most recent
  std::vector<std::list<std::size_t>::iterator> where_;
  std::vector<bool> cached_;
  std::size_t hits_ = 0, misses_ = 0;
};

}  // namespace marginforge
