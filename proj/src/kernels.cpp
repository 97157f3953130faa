#include "sdrkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sdrkit/error.hpp"

namespace sdrkit {

namespace {

void require_finite_rows(const Matrix& y) {
  if (!y.allFinite()) throw Error(ErrorCode::InvalidVector, "response matrix has non-finite entries");
}

inline bool degenerate_pair(double nu, double nv) {
  const double eps = 1e-12 * std::max({nu, nv, 1.0});
  return nu <= eps || nv <= eps;
}

// Unit-vector dot product; shared by ang() and angle_aggregate() so both give
// bitwise-identical angles.
inline double angle_of_units(const double* a, const double* b, Eigen::Index q) {
  double dot = 0.0;
  for (Eigen::Index l = 0; l < q; ++l) dot += a[l] * b[l];
  return std::acos(std::clamp(dot, -1.0, 1.0));
}

double norm_of(const double* u, Eigen::Index q) {
  double s = 0.0;
  for (Eigen::Index l = 0; l < q; ++l) s += u[l] * u[l];
  return std::sqrt(s);
}

Matrix angle_aggregate_scalar(const Matrix& y) {
  const Eigen::Index n = y.rows();
  // diff(i, k) = Y_i − Y_k, column-major so a fixed i walks k contiguously.
  Matrix diff(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) diff(k, i) = y(i, 0) - y(k, 0);

  Matrix w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* di = diff.col(i).data();
    for (Eigen::Index j = i; j < n; ++j) {
      const double* dj = diff.col(j).data();
      long opposite = 0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double a = di[k];
        const double b = dj[k];
        if (a * b < 0.0 && !degenerate_pair(std::abs(a), std::abs(b))) ++opposite;
      }
      w(i, j) = w(j, i) = static_cast<double>(opposite) * std::numbers::pi / static_cast<double>(n);
    }
  }
  return w;
}

Matrix angle_aggregate_general(const Matrix& y) {
  const Eigen::Index n = y.rows();
  const Eigen::Index q = y.cols();
  const auto nn = static_cast<std::size_t>(n);
  const auto qq = static_cast<std::size_t>(q);

  // units[(i*n + k)*q + l] = (Y_i − Y_k)_l / ‖Y_i − Y_k‖; norms[i*n + k].
  std::vector<double> units(nn * nn * qq, 0.0);
  std::vector<double> norms(nn * nn, 0.0);
  std::vector<double> delta(qq);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = 0; l < q; ++l) delta[l] = y(i, l) - y(k, l);
      const double nrm = norm_of(delta.data(), q);
      const std::size_t slot = static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(k);
      norms[slot] = nrm;
      if (nrm > 0.0) {
        for (Eigen::Index l = 0; l < q; ++l) units[slot * qq + l] = delta[l] / nrm;
      }
    }
  }

  // Diagonal entries compare a vector with itself: exactly zero.
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* ui = units.data() + static_cast<std::size_t>(i) * nn * qq;
    const double* ni = norms.data() + static_cast<std::size_t>(i) * nn;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double* uj = units.data() + static_cast<std::size_t>(j) * nn * qq;
      const double* nj = norms.data() + static_cast<std::size_t>(j) * nn;
      double sum = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (degenerate_pair(ni[k], nj[k])) continue;
        sum += angle_of_units(ui + k * q, uj + k * q, q);
      }
      w(i, j) = w(j, i) = sum / static_cast<double>(n);
    }
  }
  return w;
}

}  // namespace

void KernelSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidSpec, "kernel bandwidth gamma must be a positive number");
  }
}

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return "gauss";
    case KernelFamily::Laplace: return "lap";
    case KernelFamily::RationalQuadratic: return "rq";
  }
  return "?";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gauss" || name == "gaussian") return KernelFamily::Gaussian;
  if (name == "lap" || name == "laplace") return KernelFamily::Laplace;
  if (name == "rq" || name == "rational_quadratic") return KernelFamily::RationalQuadratic;
  throw Error(ErrorCode::InvalidSpec, "unknown kernel family '" + std::string(name) + "'");
}

double ang(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "ang arguments differ in length");
  if (!u.allFinite() || !v.allFinite()) throw Error(ErrorCode::InvalidVector, "ang arguments must be finite");
  const Eigen::Index q = u.size();
  const double nu = norm_of(u.data(), q);
  const double nv = norm_of(v.data(), q);
  if (degenerate_pair(nu, nv) || u == v) return 0.0;
  std::vector<double> a(static_cast<std::size_t>(q)), b(static_cast<std::size_t>(q));
  for (Eigen::Index l = 0; l < q; ++l) {
    a[l] = u(l) / nu;
    b[l] = v(l) / nv;
  }
  return angle_of_units(a.data(), b.data(), q);
}

double kernel_eval(const KernelSpec& spec, const Vector& delta) {
  spec.validate();
  if (!delta.allFinite()) throw Error(ErrorCode::InvalidVector, "kernel argument must be finite");
  return kernel_from_sqnorm(spec, delta.squaredNorm());
}

Matrix kernel_gram_rows(const KernelSpec& spec, const Matrix& y, Eigen::Index row_begin, Eigen::Index row_end) {
  const Eigen::Index n = y.rows();
  const Eigen::Index q = y.cols();
  Matrix g(row_end - row_begin, n);
  for (Eigen::Index i = row_begin; i < row_end; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double sq = 0.0;
      for (Eigen::Index l = 0; l < q; ++l) {
        const double t = y(i, l) - y(j, l);
        sq += t * t;
      }
      g(i - row_begin, j) = kernel_from_sqnorm(spec, sq);
    }
  }
  return g;
}

PairWeightMatrix kernel_gram(const KernelSpec& spec, const Matrix& y) {
  spec.validate();
  require_finite_rows(y);
  const Eigen::Index n = y.rows();
  const Eigen::Index q = y.cols();
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (Eigen::Index l = 0; l < q; ++l) {
        const double t = y(i, l) - y(j, l);
        sq += t * t;
      }
      g(i, j) = g(j, i) = kernel_from_sqnorm(spec, sq);
    }
  }
  return {std::move(g), PairWeightKind::KernelGram};
}

PairWeightMatrix angle_aggregate(const Matrix& y) {
  require_finite_rows(y);
  if (y.rows() == 0) return {Matrix(0, 0), PairWeightKind::AngleAggregate};
  Matrix w = y.cols() == 1 ? angle_aggregate_scalar(y) : angle_aggregate_general(y);
  return {std::move(w), PairWeightKind::AngleAggregate};
}

Matrix distance_matrix(const Matrix& y) {
  require_finite_rows(y);
  const Eigen::Index n = y.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (y.row(i) - y.row(j)).norm();
  }
  return d;
}

}  // namespace sdrkit
