#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "sdrkit/linalg.hpp"

namespace sdrkit {

enum class KernelFamily { Gaussian, Laplace, RationalQuadratic };

/// Translation-invariant kernel K(δ) with bandwidth gamma:
///   Gaussian           exp(-‖δ‖²/γ)
///   Laplace            exp(-‖δ‖/γ)
///   RationalQuadratic  1 - ‖δ‖²/(‖δ‖² + γ)
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double gamma = 1.0;

  void validate() const;
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Kernel value from the squared norm of the difference vector.
inline double kernel_from_sqnorm(const KernelSpec& spec, double sq);

enum class PairWeightKind { KernelGram, AngleAggregate };

struct PairWeightMatrix {
  Matrix entries;
  PairWeightKind kind = PairWeightKind::KernelGram;

  Eigen::Index n() const noexcept { return entries.rows(); }
};

/// Angle between u and v in [0, π]. Returns 0 when either vector has norm at
/// or below 1e-12·max(‖u‖, ‖v‖, 1).
double ang(const Vector& u, const Vector& v);

double kernel_eval(const KernelSpec& spec, const Vector& delta);

/// n×n gram of K(Y_i − Y_j) over the rows of y.
PairWeightMatrix kernel_gram(const KernelSpec& spec, const Matrix& y);

/// W_ij = (1/n) Σ_k ang(Y_i − Y_k, Y_j − Y_k). Θ(n³q).
PairWeightMatrix angle_aggregate(const Matrix& y);

/// D_ij = ‖Y_i − Y_j‖.
Matrix distance_matrix(const Matrix& y);

/// Rows [row_begin, row_end) of the kernel gram, for blocked products.
Matrix kernel_gram_rows(const KernelSpec& spec, const Matrix& y, Eigen::Index row_begin, Eigen::Index row_end);

// ---------------------------------------------------------------------------

inline double kernel_from_sqnorm(const KernelSpec& spec, double sq) {
  switch (spec.family) {
    case KernelFamily::Gaussian: return std::exp(-sq / spec.gamma);
    case KernelFamily::Laplace: return std::exp(-std::sqrt(sq) / spec.gamma);
    case KernelFamily::RationalQuadratic: return 1.0 - sq / (sq + spec.gamma);
  }
  return 0.0;
}

}  // namespace sdrkit
