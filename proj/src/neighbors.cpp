#include "marginforge/neighbors.hpp"

#include <algorithm>
#include <cmath>

#include "marginforge/error.hpp"

namespace marginforge {
namespace {

constexpr std::size_t kLeafSize = 8;

}  // namespace

NeighborIndex::NeighborIndex(const Dataset& data, std::vector<std::size_t> ids)
    : data_(data), ids_(std::move(ids)) {
  for (std::size_t i : ids_)
    if (i >= data.size()) throw ContractError("NeighborIndex: row out of range");
  dim_ = static_cast<std::size_t>(data.dim());
  dense_ = dim_ <= kDenseMaxDim;
  if (dense_) {
    coords_.assign(ids_.size() * dim_, 0.0);
    for (std::size_t p = 0; p < ids_.size(); ++p)
      for (const Feature& f : data.sample(ids_[p]).entries())
        coords_[p * dim_ + static_cast<std::size_t>(f.index - 1)] = f.value;
  }
  if (dense_ && dim_ > 0 && dim_ <= kTreeMaxDim && !ids_.empty()) {
    order_.resize(ids_.size());
    for (std::size_t p = 0; p < order_.size(); ++p) order_[p] = p;
    nodes_.reserve(2 * (ids_.size() / kLeafSize + 1));
    build(0, ids_.size());
  }
}

std::size_t NeighborIndex::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  std::size_t best_dim = 0;
  double best_spread = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double lo = coords_[order_[begin] * dim_ + d], hi = lo;
    for (std::size_t t = begin + 1; t < end; ++t) {
      const double v = coords_[order_[t] * dim_ + d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = d;
    }
  }
  if (best_spread <= 0.0) return id;  // all points identical: keep as leaf

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     return coords_[a * dim_ + best_dim] <
                            coords_[b * dim_ + best_dim];
                   });
  const double split = coords_[order_[mid] * dim_ + best_dim];
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  Node& node = nodes_[id];
  node.dim = best_dim;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

std::vector<double> NeighborIndex::densify(const SparseVector& q) const {
  std::vector<double> out(dense_ ? dim_ : 0, 0.0);
  if (dense_)
    for (const Feature& f : q.entries())
      if (static_cast<std::size_t>(f.index) <= dim_)
        out[static_cast<std::size_t>(f.index - 1)] = f.value;
  return out;
}

double NeighborIndex::point_d2(std::size_t point, std::span<const double> q,
                               const SparseVector& qs) const {
  if (!dense_) return squared_distance(data_.sample(ids_[point]), qs);
  const double* x = coords_.data() + point * dim_;
  double s = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double diff = x[d] - q[d];
    s += diff * diff;
  }
  // Query features beyond the indexed dimensionality, ascending.
  for (const Feature& f : qs.entries())
    if (static_cast<std::size_t>(f.index) > dim_) s += f.value * f.value;
  return s;
}

void NeighborIndex::knn_tree(std::size_t node_id, std::span<const double> q,
                             const SparseVector& qs, std::size_t k,
                             std::optional<std::size_t> skip,
                             std::vector<Candidate>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.left == 0) {
    for (std::size_t t = node.begin; t < node.end; ++t) {
      const std::size_t p = order_[t];
      if (skip && *skip == p) continue;
      Candidate c{point_d2(p, q, qs), p};
      if (heap.size() < k) {
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end());
      } else if (c < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = c;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const double diff = q[node.dim] - node.split;
  const std::size_t near = diff < 0.0 ? node.left : node.right;
  const std::size_t far = diff < 0.0 ? node.right : node.left;
  knn_tree(near, q, qs, k, skip, heap);
  if (heap.size() < k || diff * diff <= heap.front().d2)
    knn_tree(far, q, qs, k, skip, heap);
}

void NeighborIndex::ball_tree(std::size_t node_id, std::span<const double> q,
                              const SparseVector& qs, double r,
                              std::vector<std::size_t>& out) const {
  const Node& node = nodes_[node_id];
  if (node.left == 0) {
    for (std::size_t t = node.begin; t < node.end; ++t) {
      const std::size_t p = order_[t];
      if (std::sqrt(point_d2(p, q, qs)) <= r) out.push_back(ids_[p]);
    }
    return;
  }
  const double diff = q[node.dim] - node.split;
  // Any point across the split is at least this far away.
  const double bound = std::sqrt(diff * diff);
  if (diff < 0.0 || bound <= r) ball_tree(node.left, q, qs, r, out);
  if (diff >= 0.0 || bound <= r) ball_tree(node.right, q, qs, r, out);
}

std::vector<std::size_t> NeighborIndex::k_nearest(
    const SparseVector& query, std::size_t k,
    std::optional<std::size_t> skip_point) const {
  std::vector<Candidate> heap;
  if (k == 0 || ids_.empty()) return {};
  heap.reserve(k + 1);
  const auto q = densify(query);
  if (uses_tree()) {
    knn_tree(0, q, query, k, skip_point, heap);
  } else {
    for (std::size_t p = 0; p < ids_.size(); ++p) {
      if (skip_point && *skip_point == p) continue;
      Candidate c{point_d2(p, q, query), p};
      if (heap.size() < k) {
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end());
      } else if (c < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = c;
        std::push_heap(heap.begin(), heap.end());
      }
    }
  }
  std::sort_heap(heap.begin(), heap.end());
  std::vector<std::size_t> out;
  out.reserve(heap.size());
  for (const Candidate& c : heap) out.push_back(c.point);
  return out;
}

double NeighborIndex::kth_nn_distance(std::size_t point, std::size_t k) const {
  if (point >= ids_.size()) throw ContractError("kth_nn_distance: bad point id");
  if (k < 1 || k + 1 > ids_.size())
    throw ContractError("kth_nn_distance: k must lie in [1, size-1]");
  const SparseVector& x = data_.sample(ids_[point]);
  const auto nearest = k_nearest(x, k, point);
  const auto q = densify(x);
  return std::sqrt(point_d2(nearest.back(), q, x));
}

std::vector<std::size_t> NeighborIndex::rows_within(const SparseVector& center,
                                                    double r) const {
  std::vector<std::size_t> out;
  if (ids_.empty() || r < 0.0) return out;
  const auto q = densify(center);
  if (uses_tree()) {
    ball_tree(0, q, center, r, out);
  } else {
    for (std::size_t p = 0; p < ids_.size(); ++p)
      if (std::sqrt(point_d2(p, q, center)) <= r) out.push_back(ids_[p]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double median_radius(std::span<const double> radii) {
  if (radii.empty()) throw ConfigError("median_radius: empty list");
  std::vector<double> v(radii.begin(), radii.end());
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  if (m % 2 == 1) return v[m / 2];
  return 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

std::vector<std::size_t> points_in_ball(const Dataset& data,
                                        std::span<const std::size_t> exclude,
                                        const SparseVector& center, double r) {
  if (!(r > 0.0)) throw ConfigError("points_in_ball: radius must be positive");
  std::vector<std::size_t> out;
  std::size_t e = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    while (e < exclude.size() && exclude[e] < i) ++e;
    if (e < exclude.size() && exclude[e] == i) continue;
    if (std::sqrt(squared_distance(data.sample(i), center)) <= r)
      out.push_back(i);
  }
  return out;
}

}  // namespace marginforge
