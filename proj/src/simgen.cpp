#include "sdrkit/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdrkit/error.hpp"

namespace sdrkit {

namespace {

bool law_allowed(Example ex, ErrorLaw law) {
  switch (ex) {
    case Example::Ex1i:
    case Example::Ex1ii:
      return law == ErrorLaw::Normal || law == ErrorLaw::Cauchy || law == ErrorLaw::MixNormal;
    case Example::Ex2:
    case Example::Ex5:
      return law == ErrorLaw::Normal || law == ErrorLaw::Mvt1 || law == ErrorLaw::MixNormal;
    case Example::Ex3i:
    case Example::Ex3ii:
      return law == ErrorLaw::Normal;
    case Example::Ex4:
      return law == ErrorLaw::Normal || law == ErrorLaw::Cauchy;
  }
  return false;
}

// Smallest p that holds every nonzero coefficient of the example's β vectors.
Eigen::Index minimum_dimension(Example ex) {
  switch (ex) {
    case Example::Ex1i: return 4;
    case Example::Ex1ii: return 2;
    case Example::Ex4: return 6;
    default: return 6;
  }
}

bool diverging_dimension(Example ex) {
  return ex == Example::Ex1i || ex == Example::Ex1ii || ex == Example::Ex4;
}

Vector basis_vector(Eigen::Index p, std::initializer_list<double> head) {
  Vector v = Vector::Zero(p);
  Eigen::Index i = 0;
  for (double h : head) v(i++) = h;
  return v;
}

Matrix normalized_columns(std::initializer_list<Vector> cols) {
  Matrix m(cols.begin()->size(), static_cast<Eigen::Index>(cols.size()));
  Eigen::Index k = 0;
  for (const Vector& c : cols) m.col(k++) = c.normalized();
  return m;
}

// Cholesky factor of Δ = diag([[1, −0.5], [−0.5, 1]], I₂).
Matrix delta_cholesky() {
  Matrix delta = Matrix::Identity(4, 4);
  delta(0, 1) = delta(1, 0) = -0.5;
  return Eigen::LLT<Matrix>(delta).matrixL();
}

}  // namespace

std::string_view to_string(Example example) {
  switch (example) {
    case Example::Ex1i: return "ex1i";
    case Example::Ex1ii: return "ex1ii";
    case Example::Ex2: return "ex2";
    case Example::Ex3i: return "ex3i";
    case Example::Ex3ii: return "ex3ii";
    case Example::Ex4: return "ex4";
    case Example::Ex5: return "ex5";
  }
  return "?";
}

std::string_view to_string(ErrorLaw law) {
  switch (law) {
    case ErrorLaw::Normal: return "normal";
    case ErrorLaw::Cauchy: return "cauchy";
    case ErrorLaw::MixNormal: return "mixnormal";
    case ErrorLaw::Mvt1: return "mvt1";
  }
  return "?";
}

Example parse_example(std::string_view token) {
  for (auto ex : {Example::Ex1i, Example::Ex1ii, Example::Ex2, Example::Ex3i, Example::Ex3ii, Example::Ex4,
                  Example::Ex5}) {
    if (token == to_string(ex)) return ex;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown example '" + std::string(token) + "'");
}

ErrorLaw parse_error_law(std::string_view token) {
  for (auto law : {ErrorLaw::Normal, ErrorLaw::Cauchy, ErrorLaw::MixNormal, ErrorLaw::Mvt1}) {
    if (token == to_string(law)) return law;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown error law '" + std::string(token) + "'");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ splitmix64(index); }

void SimSpec::validate() const {
  if (!law_allowed(example, error)) {
    throw Error(ErrorCode::InvalidSpec, std::string("error law ") + std::string(to_string(error)) +
                                            " is not defined for " + std::string(to_string(example)));
  }
  if (n < 2) throw Error(ErrorCode::InvalidSpec, "sample size must be at least 2");
  if (p() < minimum_dimension(example)) {
    throw Error(ErrorCode::InvalidSpec, "n = " + std::to_string(n) + " gives p = " + std::to_string(p()) + " but " +
                                            std::string(to_string(example)) + " needs p >= " +
                                            std::to_string(minimum_dimension(example)));
  }
}

Eigen::Index SimSpec::p() const {
  if (diverging_dimension(example)) {
    auto r = static_cast<Eigen::Index>(std::sqrt(static_cast<double>(n)));
    while ((r + 1) * (r + 1) <= n) ++r;
    while (r * r > n) --r;
    return r - 5;
  }
  return 6;
}

Eigen::Index SimSpec::q() const {
  switch (example) {
    case Example::Ex1i:
    case Example::Ex1ii:
    case Example::Ex4:
      return 1;
    default:
      return 4;
  }
}

int SimSpec::d() const {
  switch (example) {
    case Example::Ex1i:
    case Example::Ex3i:
    case Example::Ex3ii:
      return 1;
    default:
      return 2;
  }
}

Matrix sample_error(ErrorLaw law, Eigen::Index count, Eigen::Index dims, Rng& rng,
                    const std::optional<Matrix>& cov_cholesky, MixtureReading mixture) {
  if (count < 1 || dims < 1) throw Error(ErrorCode::InvalidSpec, "error sample needs positive shape");
  if (cov_cholesky && (cov_cholesky->rows() != dims || cov_cholesky->cols() != dims)) {
    throw Error(ErrorCode::DimensionMismatch, "error covariance factor has the wrong shape");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double second_sd = mixture == MixtureReading::Variance ? std::sqrt(10.0) : 10.0;

  Matrix e(count, dims);
  switch (law) {
    case ErrorLaw::Normal:
    case ErrorLaw::Mvt1:
      for (Eigen::Index i = 0; i < count; ++i) {
        for (Eigen::Index l = 0; l < dims; ++l) e(i, l) = normal(rng);
        if (law == ErrorLaw::Mvt1) {
          // One χ²₁ divisor per row: √(w²) = |w|.
          e.row(i) /= std::abs(normal(rng));
        }
      }
      if (cov_cholesky) e = e * cov_cholesky->transpose();
      break;
    case ErrorLaw::Cauchy:
      for (Eigen::Index i = 0; i < count; ++i)
        for (Eigen::Index l = 0; l < dims; ++l) {
          const double num = normal(rng);
          e(i, l) = num / normal(rng);
        }
      break;
    case ErrorLaw::MixNormal:
      for (Eigen::Index i = 0; i < count; ++i)
        for (Eigen::Index l = 0; l < dims; ++l) {
          const double scale = uniform(rng) < 0.7 ? 1.0 : second_sd;
          e(i, l) = scale * normal(rng);
        }
      break;
  }
  return e;
}

GeneratedSample generate(const SimSpec& spec) {
  spec.validate();
  const Eigen::Index n = spec.n;
  const Eigen::Index p = spec.p();
  Rng rng = make_rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  GeneratedSample out;
  out.d = spec.d();
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = normal(rng);

  Matrix y(n, spec.q());
  switch (spec.example) {
    case Example::Ex1i: {
      const Vector b1 = basis_vector(p, {0.5, 0.5, 0.5, 0.5});
      const Matrix e = sample_error(spec.error, n, 1, rng, std::nullopt, spec.mixture);
      y.col(0) = x * b1 + e.col(0);
      out.truth = normalized_columns({b1});
      break;
    }
    case Example::Ex1ii: {
      const Vector b2 = basis_vector(p, {1.0});
      const Vector b3 = basis_vector(p, {0.0, 1.0});
      const Matrix e = sample_error(spec.error, n, 1, rng, std::nullopt, spec.mixture);
      const Vector u = x * b2;
      const Vector v = x * b3;
      for (Eigen::Index i = 0; i < n; ++i) y(i, 0) = std::sin(u(i)) + std::exp(v(i)) * e(i, 0);
      out.truth = normalized_columns({b2, b3});
      break;
    }
    case Example::Ex2:
    case Example::Ex5: {
      const Vector b1 = basis_vector(p, {1.0});
      const Vector b2 = basis_vector(p, {0.0, 2.0, 1.0});
      std::optional<Matrix> chol;
      if (spec.error != ErrorLaw::MixNormal) chol = delta_cholesky();
      const Matrix e = sample_error(spec.error, n, 4, rng, chol, spec.mixture);
      const Vector u = x * b1;
      const Vector v = x * b2;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (spec.example == Example::Ex2) {
          y(i, 0) = u(i) + e(i, 0);
          y(i, 1) = v(i) + e(i, 1);
        } else {
          y(i, 0) = u(i) * u(i) + e(i, 0);
          y(i, 1) = std::abs(v(i)) + e(i, 1);
        }
        y(i, 2) = e(i, 2);
        y(i, 3) = e(i, 3);
      }
      out.truth = normalized_columns({b1, b2});
      break;
    }
    case Example::Ex3i:
    case Example::Ex3ii: {
      const Vector beta = basis_vector(p, {0.8, 0.6});
      const Vector index = x * beta;
      for (Eigen::Index i = 0; i < n; ++i) {
        double z[4];
        for (double& zl : z) zl = normal(rng);
        const double rho = std::sin(index(i));
        const double e1 = z[0];
        const double e2 = rho * z[0] + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * z[1];
        y(i, 0) = spec.example == Example::Ex3i ? 2.0 * std::exp(e1) : e1;
        y(i, 1) = e2;
        y(i, 2) = z[2];
        y(i, 3) = z[3];
      }
      out.truth = normalized_columns({beta});
      break;
    }
    case Example::Ex4: {
      const Vector b1 = basis_vector(p, {1.0, 1.0, 1.0});
      const Vector b2 = basis_vector(p, {1.0, 0.0, 0.0, 0.0, 1.0, 3.0});
      const Matrix e = sample_error(spec.error, n, 1, rng, std::nullopt, spec.mixture);
      const Vector u = x * b1;
      const Vector v = x * b2;
      for (Eigen::Index i = 0; i < n; ++i)
        y(i, 0) = 0.4 * u(i) * u(i) + std::sqrt(std::abs(v(i))) + 0.4 * e(i, 0);
      out.truth = normalized_columns({b1, b2});
      break;
    }
  }
  out.data = DataSet{std::move(x), std::move(y)};
  return out;
}

}  // namespace sdrkit
