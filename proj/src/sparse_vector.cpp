#include "marginforge/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "marginforge/error.hpp"

namespace marginforge {

SparseVector::SparseVector(std::vector<Feature> entries)
    : entries_(std::move(entries)) {
  std::int32_t prev = 0;
  for (const Feature& f : entries_) {
    if (f.index < 1)
      throw ContractError("feature index must be >= 1, got " +
                          std::to_string(f.index));
    if (f.index <= prev)
      throw ContractError("feature indices must be strictly ascending");
    if (!std::isfinite(f.value))
      throw ContractError("feature value at index " + std::to_string(f.index) +
                          " is not finite");
    prev = f.index;
  }
}

SparseVector SparseVector::from_dense(std::span<const double> values) {
  std::vector<Feature> entries;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0.0)
      entries.push_back({static_cast<std::int32_t>(i + 1), values[i]});
  return SparseVector(std::move(entries));
}

double SparseVector::at(std::int32_t index) const noexcept {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const Feature& f, std::int32_t i) { return f.index < i; });
  return (it != entries_.end() && it->index == index) ? it->value : 0.0;
}

double dot(const SparseVector& x, const SparseVector& z) noexcept {
  auto a = x.entries();
  auto b = z.entries();
  std::size_t i = 0, j = 0;
  double sum = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index == b[j].index) {
      sum += a[i].value * b[j].value;
      ++i;
      ++j;
    } else if (a[i].index < b[j].index) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

double squared_distance(const SparseVector& x, const SparseVector& z) noexcept {
  auto a = x.entries();
  auto b = z.entries();
  std::size_t i = 0, j = 0;
  double sum = 0.0;
  while (i < a.size() || j < b.size()) {
    double d;
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      d = a[i++].value;
    } else if (i == a.size() || b[j].index < a[i].index) {
      d = b[j++].value;
    } else {
      d = a[i++].value - b[j++].value;
    }
    sum += d * d;
  }
  return sum;
}

}  // namespace marginforge
