#include "marginforge/synthetic.hpp"

#include <cmath>

#include "marginforge/error.hpp"
#include "marginforge/random.hpp"

namespace marginforge {

Dataset make_two_gaussians(std::size_t n, std::uint64_t seed, double separation,
                           std::size_t dim) {
  if (dim == 0) throw ConfigError("make_two_gaussians: dim must be >= 1");
  Rng rng(seed);
  const double offset = 0.5 * separation / std::sqrt(static_cast<double>(dim));
  std::vector<SparseVector> samples;
  std::vector<Label> labels;
  samples.reserve(n);
  labels.reserve(n);
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const Label y = (i % 2 == 0) ? Label{1} : Label{-1};
    for (double& v : x) v = rng.normal() + y * offset;
    samples.push_back(SparseVector::from_dense(x));
    labels.push_back(y);
  }
  return Dataset(std::move(samples), std::move(labels));
}

Dataset make_uniform_cloud(std::size_t n, std::size_t dim, std::uint64_t seed,
                           double scale) {
  Rng rng(seed);
  std::vector<SparseVector> samples;
  std::vector<Label> labels;
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x) v = scale * (2.0 * rng.uniform() - 1.0);
    samples.push_back(SparseVector::from_dense(x));
    labels.push_back(rng.uniform() < 0.5 ? Label{1} : Label{-1});
  }
  return Dataset(std::move(samples), std::move(labels));
}

}  // namespace marginforge
