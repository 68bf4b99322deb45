#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace marginforge {

struct Feature {
  std::int32_t index;  // 1-based
  double value;

  friend bool operator==(const Feature&, const Feature&) = default;
};

/// One observation: (index, value) pairs with strictly ascending indices
/// >= 1 and finite values. Missing indices read as 0.
class SparseVector {
 public:
  SparseVector() = default;

  /// Validates the invariants; throws ContractError on violation.
  explicit SparseVector(std::vector<Feature> entries);

  /// Convenience for dense input: index i+1 gets values[i]; zeros are kept
  /// out of the representation.
  static SparseVector from_dense(std::span<const double> values);

  std::span<const Feature> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::int32_t max_index() const noexcept {
    return entries_.empty() ? 0 : entries_.back().index;
  }

  /// Value at a 1-based index, 0 when absent.
  double at(std::int32_t index) const noexcept;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Feature> entries_;
};

/// Sum of x_i z_i over the merged index sequence, ascending.
double dot(const SparseVector& x, const SparseVector& z) noexcept;

/// ||x - z||^2 by merged traversal in ascending index order. Symmetric
/// bit-for-bit, and equal to the dense loop over all dimensions.
double squared_distance(const SparseVector& x, const SparseVector& z) noexcept;

}  // namespace marginforge
