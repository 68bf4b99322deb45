#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "marginforge/sparse_vector.hpp"

namespace marginforge {

using Label = std::int8_t;  // +1 or -1

/// Immutable labelled sample set. Safe to share between threads.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<SparseVector> samples, std::vector<Label> labels);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  std::int32_t dim() const noexcept { return dim_; }

  const SparseVector& sample(std::size_t i) const { return samples_[i]; }
  Label label(std::size_t i) const { return labels_[i]; }
  std::span<const SparseVector> samples() const noexcept { return samples_; }
  std::span<const Label> labels() const noexcept { return labels_; }

  /// Content hash (labels and features). Models trained on a dataset carry
  /// it so that index-space mismatches can be detected.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  /// Counts of (+1, -1) labels, optionally restricted to a view.
  std::pair<std::size_t, std::size_t> class_counts() const noexcept;
  std::pair<std::size_t, std::size_t> class_counts(
      std::span<const std::size_t> view) const noexcept;

  /// New dataset holding the given rows in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<SparseVector> samples_;
  std::vector<Label> labels_;
  std::int32_t dim_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Parses LibSVM sparse text. Labels > 0 map to +1, everything else to -1.
/// Throws ParseError naming the offending line.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm(std::string_view text);
Dataset load_libsvm(const std::string& path);

/// Writes `+1 1:0.5 3:1` lines with shortest round-trip value formatting.
void write_libsvm(std::ostream& out, const Dataset& data);
std::string to_libsvm(const Dataset& data);
void save_libsvm(const std::string& path, const Dataset& data);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Random partition with ceil((1 - f) n) training rows.
TrainTestSplit split(const Dataset& data, double test_fraction,
                     std::uint64_t seed);

/// L disjoint index sets of n_S = floor(delta n / L) rows each.
struct SubsamplePlan {
  std::vector<std::vector<std::size_t>> subsamples;  // each sorted ascending
  std::vector<std::size_t> pooled;                    // sorted union
  std::size_t subsample_size = 0;
  std::uint64_t seed = 0;
};

std::size_t subsample_size(std::size_t n, double delta, std::size_t bags);

SubsamplePlan draw_disjoint_subsamples(std::size_t n, double delta,
                                       std::size_t bags, std::uint64_t seed);

/// Per-feature min-max scaling to [0, 1], fit on one dataset and applied to
/// others. Constant features map to 0.
class MinMaxScaler {
 public:
  static MinMaxScaler fit(const Dataset& data);
  Dataset transform(const Dataset& data) const;

 private:
  std::vector<double> lo_, hi_;  // indexed by feature index - 1
};

}  // namespace marginforge
