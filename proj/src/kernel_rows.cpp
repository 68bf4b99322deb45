#include "marginforge/kernel_rows.hpp"

#include <algorithm>

namespace marginforge {

KernelRows::KernelRows(const Dataset& data, std::span<const std::size_t> view,
                       const KernelSpec& spec, std::size_t cache_mb)
    : data_(data),
      view_(view.begin(), view.end()),
      spec_(spec),
      n_(view.size()) {
  if (spec_.formulation == Formulation::L2) shift_ = 1.0 / (2.0 * spec_.cost);

  // The dense loop adds the same terms in the same order as the sparse
  // merge (absent entries contribute exact zeros), so both paths agree
  // bit-for-bit.
  const auto d = static_cast<std::size_t>(data.dim());
  if (d > 0 && d <= kDenseMaxDim) {
    dim_ = d;
    dense_.assign(n_ * dim_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (const Feature& f : data.sample(view_[i]).entries())
        dense_[i * dim_ + static_cast<std::size_t>(f.index - 1)] = f.value;
  }

  diag_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const SparseVector& x = data.sample(view_[i]);
    diag_[i] = kernel_eval(spec_, x, x) + shift_;
  }

  const std::size_t row_bytes = std::max<std::size_t>(n_, 1) * sizeof(double);
  capacity_ = std::max<std::size_t>(2, (cache_mb << 20) / row_bytes);
  capacity_ = std::min(capacity_, std::max<std::size_t>(n_, 2));
  rows_.resize(n_);
  where_.resize(n_);
  cached_.assign(n_, false);
}

double KernelRows::entry(std::size_t i, std::size_t j) const noexcept {
  if (i == j) return diag_[i];
  return kernel_eval(spec_, data_.sample(view_[i]), data_.sample(view_[j]));
}

void KernelRows::compute_row(std::size_t i, std::vector<double>& out) const {
  out.resize(n_);
  if (dim_ > 0) {
    const double* xi = dense_.data() + i * dim_;
    if (spec_.family == KernelFamily::Rbf) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double* xj = dense_.data() + j * dim_;
        double s = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
          const double d = xi[k] - xj[k];
          s += d * d;
        }
        out[j] = kernel_from_sqdist(spec_, s);
      }
    } else {
      for (std::size_t j = 0; j < n_; ++j) {
        const double* xj = dense_.data() + j * dim_;
        double s = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) s += xi[k] * xj[k];
        out[j] = kernel_from_dot(spec_, s);
      }
    }
  } else {
    const SparseVector& xi = data_.sample(view_[i]);
    for (std::size_t j = 0; j < n_; ++j)
      out[j] = kernel_eval(spec_, xi, data_.sample(view_[j]));
  }
  out[i] = diag_[i];
}

std::span<const double> KernelRows::row(std::size_t i) {
  if (cached_[i]) {
    ++hits_;
    lru_.splice(lru_.begin(), lru_, where_[i]);
    return rows_[i];
  }
  ++misses_;
  std::vector<double> storage;
  if (lru_.size() >= capacity_) {
    const std::size_t victim = lru_.back();
    lru_.pop_back();
    cached_[victim] = false;
    storage = std::move(rows_[victim]);
    rows_[victim] = {};
  }
  compute_row(i, storage);
  rows_[i] = std::move(storage);
  lru_.push_front(i);
  where_[i] = lru_.begin();
  cached_[i] = true;
  return rows_[i];
}

}  // namespace marginforge
