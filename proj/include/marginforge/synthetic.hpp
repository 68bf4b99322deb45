#pragma once

#include <cstdint>

#include "marginforge/dataset.hpp"

namespace marginforge {

/// Two isotropic unit-variance Gaussians in `dim` dimensions with means
/// -/+ separation/2 along the diagonal direction, balanced labels (+1 for
/// the positive-side cloud). The Bayes error is Phi(-separation / 2).
Dataset make_two_gaussians(std::size_t n, std::uint64_t seed,
                           double separation = 3.0, std::size_t dim = 2);

/// Points drawn uniformly from [-scale, scale]^dim with random labels.
Dataset make_uniform_cloud(std::size_t n, std::size_t dim, std::uint64_t seed,
                           double scale = 1.0);

}  // namespace marginforge
