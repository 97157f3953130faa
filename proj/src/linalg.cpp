#include "sdrkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdrkit/error.hpp"

namespace sdrkit {

namespace {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorCode::InvalidMatrix, std::string(what) + " has non-finite entries");
}

void require_full_column_rank(const Matrix& g, const Eigen::JacobiSVD<Matrix>& svd) {
  const Vector& s = svd.singularValues();
  if (g.cols() == 0 || g.cols() > g.rows() || s.size() < g.cols() || !(s(0) > 0.0) ||
      s(g.cols() - 1) <= 1e-10 * s(0)) {
    throw Error(ErrorCode::RankDeficient, "basis of " + std::to_string(g.cols()) +
                                              " columns is not of full column rank");
  }
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "symmetric matrix must be square, got " +
                                                  std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  require_finite(a, "symmetric matrix");
  m_ = 0.5 * (a + a.transpose());
}

SymmetricMatrix SymmetricMatrix::zero(Eigen::Index p) { return SymmetricMatrix(Matrix::Zero(p, p)); }

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index p) { return SymmetricMatrix(Matrix::Identity(p, p)); }

void canonicalize_signs(Matrix& columns) {
  for (Eigen::Index k = 0; k < columns.cols(); ++k) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      const double v = std::abs(columns(i, k));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (columns.rows() > 0 && columns(best, k) < 0.0) columns.col(k) = -columns.col(k);
  }
}

EigenDecomposition sym_eig(const SymmetricMatrix& a) {
  const Eigen::Index p = a.dim();
  EigenDecomposition out;
  if (p == 0) return out;
  require_finite(a.matrix(), "eigen input");

  // Tridiagonal QL; ascending output is reversed below.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::InvalidMatrix, "eigen solver did not converge");

  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  canonicalize_signs(out.vectors);
  return out;
}

SymmetricMatrix spd_inv_sqrt(const SymmetricMatrix& a, double ridge) {
  if (ridge < 0.0 || !std::isfinite(ridge)) throw Error(ErrorCode::InvalidSpec, "ridge must be a nonnegative number");
  const Eigen::Index p = a.dim();
  const Matrix shifted = a.matrix() + ridge * Matrix::Identity(p, p);
  const EigenDecomposition eig = sym_eig(SymmetricMatrix(shifted));

  const double floor = 1e-14 * a.trace() / static_cast<double>(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!(eig.values(k) > floor) || !(eig.values(k) > 0.0)) {
      throw Error(ErrorCode::SingularCovariance,
                  "covariance is not positive definite (eigenvalue " + std::to_string(eig.values(k)) + ")");
    }
  }
  const Vector inv_root = eig.values.array().rsqrt();
  return SymmetricMatrix(eig.vectors * inv_root.asDiagonal() * eig.vectors.transpose());
}

SymmetricMatrix projection_matrix(const Matrix& g) {
  require_finite(g, "basis");
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU);
  require_full_column_rank(g, svd);
  const Matrix u = svd.matrixU().leftCols(g.cols());
  return SymmetricMatrix(u * u.transpose());
}

double subspace_distance(const Matrix& g1, const Matrix& g2) {
  if (g1.rows() != g2.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "bases live in different ambient dimensions");
  }
  return (projection_matrix(g1).matrix() - projection_matrix(g2).matrix()).norm();
}

double trace_correlation(const Matrix& g1, const Matrix& g2) {
  if (g1.rows() != g2.rows() || g1.cols() != g2.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "trace correlation needs two spans of equal dimension");
  }
  const double d = static_cast<double>(g1.cols());
  const double t = (projection_matrix(g1).matrix() * projection_matrix(g2).matrix()).trace();
  return std::sqrt(std::clamp(t / d, 0.0, 1.0));
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

}  // namespace sdrkit
