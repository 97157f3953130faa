#pragma once

#include <Eigen/Dense>

namespace sdrkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense p×p symmetric matrix. Construction symmetrizes the input as
/// (A + Aᵀ)/2, so entries(i,j) == entries(j,i) holds bitwise afterwards.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Matrix& a);

  static SymmetricMatrix zero(Eigen::Index p);
  static SymmetricMatrix identity(Eigen::Index p);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }

 private:
  Matrix m_;
};

struct EigenDecomposition {
  Vector values;   // descending by signed value
  Matrix vectors;  // column k pairs with values[k]
};

/// Output of subspace extraction: orthonormal p×d basis plus the d leading
/// eigenvalues ordered by descending magnitude.
struct SubspaceEstimate {
  Matrix basis;
  Vector eigenvalues;

  Eigen::Index d() const noexcept { return basis.cols(); }
  Eigen::Index p() const noexcept { return basis.rows(); }
};

/// Full spectral decomposition. Eigenvalues descend; each eigenvector has its
/// largest-magnitude component positive (first such index on ties).
EigenDecomposition sym_eig(const SymmetricMatrix& a);

/// B with B·(A + ridge·I)·B = I. Throws SingularCovariance when any eigenvalue
/// of A + ridge·I is at or below 1e-14·trace(A)/p.
SymmetricMatrix spd_inv_sqrt(const SymmetricMatrix& a, double ridge = 0.0);

/// Orthogonal projector onto the column span of g. Throws RankDeficient.
SymmetricMatrix projection_matrix(const Matrix& g);

/// ‖P_{g1} − P_{g2}‖_F.
double subspace_distance(const Matrix& g1, const Matrix& g2);

/// √(tr(P_{g1}·P_{g2}) / d) for two d-dimensional spans.
double trace_correlation(const Matrix& g1, const Matrix& g2);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// Flips each column so its largest-magnitude entry is positive.
void canonicalize_signs(Matrix& columns);

}  // namespace sdrkit
