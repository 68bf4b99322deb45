#include "marginforge/kernel.hpp"

#include <cmath>

#include "marginforge/error.hpp"

namespace marginforge {
namespace {

double int_pow(double base, int exp) noexcept {
  double result = 1.0;
  while (exp > 0) {
    if (exp & 1) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

}  // namespace

std::string_view to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Linear: return "linear";
    case KernelFamily::Polynomial: return "poly";
    case KernelFamily::Rbf: return "rbf";
  }
  return "?";
}

std::string_view to_string(Formulation f) {
  return f == Formulation::L1 ? "l1" : "l2";
}

KernelFamily parse_kernel_family(std::string_view s) {
  if (s == "linear") return KernelFamily::Linear;
  if (s == "poly" || s == "polynomial") return KernelFamily::Polynomial;
  if (s == "rbf" || s == "radial") return KernelFamily::Rbf;
  throw ConfigError("unknown kernel '" + std::string(s) + "'");
}

Formulation parse_formulation(std::string_view s) {
  if (s == "l1" || s == "L1") return Formulation::L1;
  if (s == "l2" || s == "L2") return Formulation::L2;
  throw ConfigError("unknown formulation '" + std::string(s) + "'");
}

void KernelSpec::validate() const {
  if (!(cost > 0.0) || !std::isfinite(cost))
    throw ConfigError("cost C must be positive");
  if (family != KernelFamily::Linear && (!(gamma > 0.0) || !std::isfinite(gamma)))
    throw ConfigError("gamma must be positive");
  if (family == KernelFamily::Polynomial && degree < 1)
    throw ConfigError("polynomial degree must be >= 1");
}

double kernel_from_dot(const KernelSpec& spec, double dot_value) noexcept {
  if (spec.family == KernelFamily::Polynomial)
    return int_pow(spec.gamma * dot_value, spec.degree);
  return dot_value;
}

double kernel_from_sqdist(const KernelSpec& spec, double sqdist) noexcept {
  return std::exp(-spec.gamma * sqdist);
}

double kernel_eval(const KernelSpec& spec, const SparseVector& x,
                   const SparseVector& z) noexcept {
  if (spec.family == KernelFamily::Rbf)
    return kernel_from_sqdist(spec, squared_distance(x, z));
  return kernel_from_dot(spec, dot(x, z));
}

double effective_diagonal(const KernelSpec& spec, const SparseVector& x) {
  if (spec.formulation != Formulation::L2)
    throw ContractError("effective_diagonal requires the L2 formulation");
  return kernel_eval(spec, x, x) + 1.0 / (2.0 * spec.cost);
}

double effective_kernel(const KernelSpec& spec, const SparseVector& xi,
                        const SparseVector& xj, bool same_index) noexcept {
  double k = kernel_eval(spec, xi, xj);
  if (same_index && spec.formulation == Formulation::L2)
    k += 1.0 / (2.0 * spec.cost);
  return k;
}

}  // namespace marginforge
