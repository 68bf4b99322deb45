#pragma once

#include <string>
#include <string_view>

#include "marginforge/sparse_vector.hpp"

namespace marginforge {

enum class KernelFamily { Linear, Polynomial, Rbf };

/// L1 penalizes slack linearly (box 0 <= alpha <= C); L2 penalizes squared
/// slack, realized as a 1/(2C) diagonal shift with no upper bound on alpha.
enum class Formulation { L1, L2 };

std::string_view to_string(KernelFamily f);
std::string_view to_string(Formulation f);
KernelFamily parse_kernel_family(std::string_view s);  // linear|poly|rbf
Formulation parse_formulation(std::string_view s);     // l1|l2

struct KernelSpec {
  KernelFamily family = KernelFamily::Rbf;
  double gamma = 1.0;  // ignored for Linear
  int degree = 3;      // Polynomial only
  Formulation formulation = Formulation::L1;
  double cost = 1.0;

  /// Throws ConfigError if gamma, degree or cost is out of range.
  void validate() const;

  static KernelSpec linear(double cost, Formulation f = Formulation::L1) {
    return {KernelFamily::Linear, 1.0, 1, f, cost};
  }
  static KernelSpec polynomial(double gamma, int degree, double cost,
                               Formulation f = Formulation::L1) {
    return {KernelFamily::Polynomial, gamma, degree, f, cost};
  }
  static KernelSpec rbf(double gamma, double cost,
                        Formulation f = Formulation::L1) {
    return {KernelFamily::Rbf, gamma, 1, f, cost};
  }

  /// Compares only the fields the family uses.
  friend bool operator==(const KernelSpec& a, const KernelSpec& b) {
    if (a.family != b.family || a.formulation != b.formulation || a.cost != b.cost) return false;
    if (a.family != KernelFamily::Linear && a.gamma != b.gamma) return false;
    return a.family != KernelFamily::Polynomial || a.degree == b.degree;
  }
};

/// Linear: x.z; Polynomial: (gamma x.z)^p with no additive constant;
/// Rbf: exp(-gamma ||x - z||^2). Symmetric in its arguments bit-for-bit.
double kernel_eval(const KernelSpec& spec, const SparseVector& x,
                   const SparseVector& z) noexcept;

/// Kernel applied to precomputed x.z (Linear, Polynomial) or ||x - z||^2
/// (Rbf). Shared by the sparse and dense evaluation paths.
double kernel_from_dot(const KernelSpec& spec, double dot_value) noexcept;
double kernel_from_sqdist(const KernelSpec& spec, double sqdist) noexcept;

/// K(x_i, x_i) + 1/(2C) for the L2 formulation. Throws ContractError under L1.
double effective_diagonal(const KernelSpec& spec, const SparseVector& x);

/// Kernel entry seen by the dual solver for training indices i and j: the
/// diagonal shift applies only when i == j under L2.
double effective_kernel(const KernelSpec& spec, const SparseVector& xi,
                        const SparseVector& xj, bool same_index) noexcept;

}  // namespace marginforge
