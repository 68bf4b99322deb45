#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "marginforge/dataset.hpp"

namespace marginforge {

/// Exact Euclidean neighbor queries over a fixed set of dataset rows.
///
/// Points are addressed by point id p = 0..size()-1, which maps to dataset
/// row ids[p]. Rows are materialized densely when dim <= kDenseMaxDim; a
/// k-d tree is used when dim <= kTreeMaxDim, a linear scan otherwise.
/// Every distance is sqrt of the squared difference summed in ascending
/// feature order, so all query paths return identical values. Distance ties
/// are broken by the smaller point id. Immutable after construction.
class NeighborIndex {
 public:
  static constexpr std::size_t kDenseMaxDim = 4096;
  static constexpr std::size_t kTreeMaxDim = 16;

  NeighborIndex(const Dataset& data, std::vector<std::size_t> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dataset_index(std::size_t point) const { return ids_[point]; }
  bool uses_tree() const noexcept { return !nodes_.empty(); }

  /// Distance from point p to its k-th nearest other point (self excluded).
  /// Requires 1 <= k <= size() - 1; throws ContractError otherwise.
  double kth_nn_distance(std::size_t point, std::size_t k) const;

  /// The k nearest points to `query` ordered by (distance, id), optionally
  /// skipping one point id. Returns fewer when the set is smaller.
  std::vector<std::size_t> k_nearest(
      const SparseVector& query, std::size_t k,
      std::optional<std::size_t> skip_point = std::nullopt) const;

  /// Dataset rows (not point ids) within distance r of `center`, ascending.
  std::vector<std::size_t> rows_within(const SparseVector& center,
                                       double r) const;

 private:
  struct Node {
    std::size_t begin, end;        // range in order_
    std::size_t left = 0, right = 0;  // child node ids; 0 = leaf
    std::size_t dim = 0;
    double split = 0.0;
  };
  struct Candidate {
    double d2;
    std::size_t point;
    bool operator<(const Candidate& o) const {
      return d2 < o.d2 || (d2 == o.d2 && point < o.point);
    }
  };

  std::vector<double> densify(const SparseVector& q) const;
  double point_d2(std::size_t point, std::span<const double> dense_q,
                  const SparseVector& q) const;
  std::size_t build(std::size_t begin, std::size_t end);
  void knn_tree(std::size_t node, std::span<const double> q,
                const SparseVector& qs, std::size_t k,
                std::optional<std::size_t> skip,
                std::vector<Candidate>& heap) const;
  void ball_tree(std::size_t node, std::span<const double> q,
                 const SparseVector& qs, double r,
                 std::vector<std::size_t>& out) const;

  const Dataset& data_;
  std::vector<std::size_t> ids_;
  std::size_t dim_ = 0;
  bool dense_ = false;
  std::vector<double> coords_;  // size() x dim_ when dense_
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;  // nodes_[0] is the root when the tree is used
};

/// Middle order statistic; mean of the two middle values for even counts.
/// Throws ConfigError on an empty list.
double median_radius(std::span<const double> radii);

/// Linear scan: rows i not in `exclude` (sorted ascending) with
/// ||x_i - center|| <= r, in ascending order.
std::vector<std::size_t> points_in_ball(const Dataset& data,
                                        std::span<const std::size_t> exclude,
                                        const SparseVector& center, double r);

}  // namespace marginforge
