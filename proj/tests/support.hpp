#pragma once
// Hand-rolled generators and comparison helpers shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "sdrkit/error.hpp"
#include "sdrkit/estimators.hpp"

namespace testgen {

using sdrkit::Matrix;
using sdrkit::Vector;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

  Matrix normal_matrix(Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }

  Vector normal_vector(Eigen::Index r) { return normal_matrix(r, 1).col(0); }

  Matrix symmetric(Eigen::Index p) {
    const Matrix a = normal_matrix(p, p);
    return (a + a.transpose()) / 2.0;
  }

  Matrix spd(Eigen::Index p) {
    const Matrix a = normal_matrix(p, p);
    return a * a.transpose() + 0.5 * Matrix::Identity(p, p);
  }

  // Orthogonal matrix from the QR of a Gaussian matrix.
  Matrix orthogonal(Eigen::Index p) {
    Eigen::HouseholderQR<Matrix> qr(normal_matrix(p, p));
    return qr.householderQ() * Matrix::Identity(p, p);
  }

  // Well-conditioned invertible matrix: orthogonal · diag(0.5..2) · orthogonal.
  Matrix invertible(Eigen::Index p) {
    Vector s(p);
    for (Eigen::Index i = 0; i < p; ++i) s(i) = uniform(0.5, 2.0);
    return orthogonal(p) * s.asDiagonal() * orthogonal(p);
  }

  Matrix full_rank(Eigen::Index p, Eigen::Index d) {
    for (;;) {
      Matrix g = normal_matrix(p, d);
      Eigen::JacobiSVD<Matrix> svd(g);
      if (svd.singularValues().minCoeff() > 1e-3 * svd.singularValues().maxCoeff()) return g;
    }
  }

  sdrkit::DataSet dataset(Eigen::Index n, Eigen::Index p, Eigen::Index q) {
    return {normal_matrix(n, p), normal_matrix(n, q)};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

template <class F>
sdrkit::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const sdrkit::Error& e) {
    return e.code();
  }
  throw std::logic_error("expected sdrkit::Error");
}

}  // namespace testgen
