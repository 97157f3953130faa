#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "sdrkit/error.hpp"
#include "sdrkit/estimators.hpp"
#include "support.hpp"

using namespace sdrkit;
using testgen::Gen;
using testgen::rel_diff;

namespace {

DataSet make(std::initializer_list<std::initializer_list<double>> x, std::initializer_list<double> y) {
  DataSet d{Matrix(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(x.begin()->size())),
            Matrix(static_cast<Eigen::Index>(y.size()), 1)};
  Eigen::Index i = 0;
  for (const auto& row : x) {
    Eigen::Index j = 0;
    for (double v : row) d.x(i, j++) = v;
    ++i;
  }
  i = 0;
  for (double v : y) d.y(i++, 0) = v;
  return d;
}

const KernelSpec kGauss4{KernelFamily::Gaussian, 4.0};

}  // namespace

TEST(Center, ClosedFormAndConstantColumn) {
  const auto c = center(make({{1.0}, {-1.0}}, {0, 0}).x);
  EXPECT_EQ(c.mean(0), 0.0);
  EXPECT_EQ(c.z(0, 0), 1.0);
  EXPECT_EQ(c.cov(0, 0), 1.0);

  Matrix x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto k = center(x);
  EXPECT_EQ(k.cov(1, 1), 0.0);
  EXPECT_EQ(k.cov(0, 1), 0.0);
  EXPECT_EQ(testgen::error_code_of([] { center(Matrix::Ones(1, 3)); }), ErrorCode::TooFewSamples);
}

TEST(Center, MatchesDirectSumProperty) {
  Gen g(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = g.normal_matrix(10, 3) * 5.0;
    const auto c = center(x);
    EXPECT_LE((c.cov.matrix() - oracle::covariance(x)).norm(), 1e-12);
    EXPECT_LE(c.z.colwise().sum().cwiseAbs().maxCoeff(), 1e-10 * 10);
    EXPECT_LE((c.cov.matrix() - c.z.transpose() * c.z / 10.0).norm(), 1e-10);
  }
}

TEST(MethodSpec, ValidationAndTokens) {
  EXPECT_EQ(parse_method("im_gauss", 40.0).label(), "IM_Gauss");
  EXPECT_EQ(parse_method("iv_lap", 2.0).label(), "IV_Lap");
  EXPECT_EQ(parse_method("iv_pr", std::nullopt).token(), "iv_pr");
  EXPECT_EQ(parse_method("sir", std::nullopt, 7).slices.value(), 7);
  EXPECT_EQ(testgen::error_code_of([] { parse_method("im_rq", std::nullopt); }), ErrorCode::MissingKernelSpec);
  EXPECT_EQ(testgen::error_code_of([] { parse_method("bogus", 1.0); }), ErrorCode::InvalidSpec);
  MethodSpec bad = MethodSpec::im_pr();
  bad.kernel = kGauss4;
  EXPECT_EQ(testgen::error_code_of([&] { bad.validate(); }), ErrorCode::InvalidSpec);
  MethodSpec no_kernel{Method::ImK, std::nullopt, std::nullopt};
  EXPECT_EQ(testgen::error_code_of([&] { no_kernel.validate(); }), ErrorCode::MissingKernelSpec);
  EXPECT_TRUE(MethodSpec::save().is_second_order());
  EXPECT_FALSE(MethodSpec::sir().is_second_order());
}

TEST(IcmiPr, ZeroCases) {
  Gen g(2);
  DataSet flat{Matrix::Constant(6, 2, 3.0), g.normal_matrix(6, 2)};
  EXPECT_EQ(icmi_pr(flat).matrix(), Matrix::Zero(2, 2));
  const DataSet two = g.dataset(2, 3, 2);
  EXPECT_EQ(icmi_pr(two).matrix(), Matrix::Zero(3, 3));
}

TEST(IcmiPr, MatchesTripleSumScalar) {
  Gen g(3);
  const DataSet d = g.dataset(4, 1, 1);
  EXPECT_LE(rel_diff(icmi_pr(d).matrix(), oracle::icmi_pr(d.x, d.y)), 1e-10);
}

TEST(IcmiKernel, ClosedFormPair) {
  const DataSet d = make({{1.0, 0.0}, {-1.0, 0.0}}, {0.0, 2.0});
  const Matrix lam = icmi_kernel(d, kGauss4).matrix();
  EXPECT_NEAR(lam(0, 0), (1.0 - std::exp(-1.0)) / 2.0, 1e-15);
  EXPECT_NEAR(lam(0, 0), 0.316060, 1e-6);
  EXPECT_EQ(lam(1, 1), 0.0);
  EXPECT_EQ(lam(0, 1), 0.0);
}

TEST(IcmiKernel, ConstantResponseGivesZero) {
  Gen g(4);
  DataSet d{g.normal_matrix(7, 3), Matrix::Constant(7, 2, 1.25)};
  EXPECT_LE(icmi_kernel(d, kGauss4).matrix().cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(testgen::error_code_of([&] { icmi_kernel(d, std::nullopt); }), ErrorCode::MissingKernelSpec);
}

TEST(IcvPr, ZeroCases) {
  Gen g(5);
  EXPECT_EQ(icvi_pr(g.dataset(2, 2, 1)).matrix(), Matrix::Zero(2, 2));
  const DataSet alt = make({{1}, {-1}, {1}, {-1}}, {0.1, 0.7, -2.0, 3.0});
  EXPECT_LE(icvi_pr(alt).matrix().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(IcviKernel, ZeroCases) {
  Gen g(6);
  DataSet flat_y{g.normal_matrix(6, 3), Matrix::Constant(6, 1, -4.0)};
  EXPECT_LE(icvi_kernel(flat_y, kGauss4).matrix().cwiseAbs().maxCoeff(), 1e-12);
  DataSet flat_x{Matrix::Constant(6, 3, 2.0), g.normal_matrix(6, 1)};
  EXPECT_EQ(icvi_kernel(flat_x, kGauss4).matrix(), Matrix::Zero(3, 3));
}

TEST(IcmiId, SmallOracleAndZeroCases) {
  const DataSet d = make({{1.0}, {0.0}, {-1.0}}, {1.0, 2.0, 3.0});
  // m(1) = 1/3, m(2) = 1/3, m(3) = 0 → (1/3)(1/9 + 1/9) = 2/27.
  EXPECT_NEAR(icmi_id(d)(0, 0), 2.0 / 27.0, 1e-15);
  EXPECT_LE(rel_diff(icmi_id(d).matrix(), oracle::icmi_id(d.x, d.y)), 1e-12);
  Gen g(7);
  DataSet flat_y{g.normal_matrix(5, 2), Matrix::Constant(5, 2, 0.5)};
  EXPECT_LE(icmi_id(flat_y).matrix().cwiseAbs().maxCoeff(), 1e-14);
  DataSet flat_x{Matrix::Constant(5, 2, 0.5), g.normal_matrix(5, 2)};
  EXPECT_EQ(icmi_id(flat_x).matrix(), Matrix::Zero(2, 2));
}

TEST(Cume, MultivariateRejected) {
  Gen g(8);
  EXPECT_EQ(testgen::error_code_of([&] { cume(g.dataset(5, 2, 2)); }), ErrorCode::UnivariateOnly);
  const DataSet d = g.dataset(9, 3, 1);
  EXPECT_EQ(cume(d).matrix(), icmi_id(d).matrix());
}

TEST(Mddm, ClosedFormPairAndConstantResponse) {
  const DataSet d = make({{1.0, 0.0}, {-1.0, 0.0}}, {0.0, 2.0});
  const Matrix lam = mddm(d).matrix();
  EXPECT_NEAR(lam(0, 0), 1.0, 1e-15);
  EXPECT_EQ(lam(1, 1), 0.0);
  Gen g(9);
  DataSet flat{g.normal_matrix(6, 2), Matrix::Constant(6, 3, 1.0)};
  EXPECT_EQ(mddm(flat).matrix(), Matrix::Zero(2, 2));
}

TEST(Slicing, TiesStayInLowerSliceAndEmptySlicesDrop) {
  Vector y(6);
  y << 3, 1, 2, 2, 2, 5;
  // Sorted 1,2,2,2,3,5. The first cut (after two rows) would split the run of
  // 2s, so it moves to four rows and the second cut collapses onto it.
  const auto s3 = make_slices(y, 3);
  ASSERT_EQ(s3.size(), 2u);
  EXPECT_EQ(s3[0].size(), 4u);
  EXPECT_EQ(s3[1].size(), 2u);
  Vector flat = Vector::Constant(5, 1.0);
  EXPECT_EQ(make_slices(flat, 5).size(), 1u);
}

TEST(Sir, HandSlicingAndZeroCases) {
  // Two slices of three: slice means of x are 2 and 5, grand mean 3.5.
  const DataSet d = make({{1}, {2}, {3}, {4}, {5}, {6}}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  EXPECT_NEAR(sir(d, 2)(0, 0), 0.5 * 1.5 * 1.5 + 0.5 * 1.5 * 1.5, 1e-14);
  Gen g(10);
  const DataSet r = g.dataset(12, 3, 1);
  EXPECT_LE(sir(r, 1).matrix().cwiseAbs().maxCoeff(), 1e-14);
  DataSet flat{Matrix::Constant(8, 2, 1.0), g.normal_matrix(8, 1)};
  EXPECT_EQ(sir(flat, 4).matrix(), Matrix::Zero(2, 2));
  EXPECT_EQ(testgen::error_code_of([&] { sir(g.dataset(8, 2, 2), 2); }), ErrorCode::UnivariateOnly);
  EXPECT_EQ(testgen::error_code_of([&] { sir(g.dataset(3, 2, 1), 4); }), ErrorCode::TooManySlices);
}

TEST(Save, HandSlicingAndZeroCases) {
  // Slices {1,3,1,3} and {4,6,4,6}: each within-slice variance 1, total variance 4.
  const DataSet d = make({{1}, {3}, {1}, {3}, {4}, {6}, {4}, {6}}, {1, 2, 3, 4, 5, 6, 7, 8});
  const double total = oracle::covariance(d.x)(0, 0);
  EXPECT_NEAR(total, 3.25, 1e-14);
  EXPECT_NEAR(save(d, 2)(0, 0), (total - 1.0) * (total - 1.0), 1e-13);
  EXPECT_LE(rel_diff(save(d, 2).matrix(), oracle::save(d.x, d.y.col(0), 2)), 1e-12);
  Gen g(11);
  EXPECT_LE(save(g.dataset(9, 3, 1), 1).matrix().cwiseAbs().maxCoeff(), 1e-13);
  DataSet flat{Matrix::Constant(8, 2, 1.0), g.normal_matrix(8, 1)};
  EXPECT_EQ(save(flat, 2).matrix(), Matrix::Zero(2, 2));
  EXPECT_EQ(testgen::error_code_of([&] { save(g.dataset(5, 2, 1), 5); }), ErrorCode::SliceTooSmall);
}

// Every factorized estimator against its literal sum on random small instances.
TEST(Oracle, FactorizedEqualsLiteralSumProperty) {
  Gen g(12);
  const oracle::Kern fams[] = {oracle::Kern::Gauss, oracle::Kern::Lap, oracle::Kern::Rq};
  const KernelFamily lib[] = {KernelFamily::Gaussian, KernelFamily::Laplace, KernelFamily::RationalQuadratic};
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = g.integer(2, 8), p = g.integer(1, 3), q = g.integer(1, 2);
    const DataSet d = g.dataset(n, p, q);
    const int f = g.integer(0, 2);
    const double gamma = g.uniform(0.3, 5.0);
    EXPECT_LE(rel_diff(icmi_pr(d).matrix(), oracle::icmi_pr(d.x, d.y)), 1e-8);
    EXPECT_LE(rel_diff(icvi_pr(d).matrix(), oracle::icvi_pr(d.x, d.y)), 1e-8);
    EXPECT_LE(rel_diff(icmi_kernel(d, KernelSpec{lib[f], gamma}).matrix(), oracle::icmi_k(d.x, d.y, fams[f], gamma)),
              1e-8);
    EXPECT_LE(rel_diff(icvi_kernel(d, KernelSpec{lib[f], gamma}).matrix(), oracle::icvi_k(d.x, d.y, fams[f], gamma)),
              1e-8);
    EXPECT_LE(rel_diff(icmi_id(d).matrix(), oracle::icmi_id(d.x, d.y)), 1e-8);
    EXPECT_LE(rel_diff(mddm(d).matrix(), oracle::mddm(d.x, d.y)), 1e-8);
    if (q == 1) {
      EXPECT_LE(rel_diff(sir(d, 2).matrix(), oracle::sir(d.x, d.y.col(0), 2)), 1e-8);
      if (n >= 4) EXPECT_LE(rel_diff(save(d, 2).matrix(), oracle::save(d.x, d.y.col(0), 2)), 1e-8);
    }
  }
}

TEST(Properties, PsdForKernelAndIndicatorEstimators) {
  Gen g(13);
  for (int trial = 0; trial < 30; ++trial) {
    const DataSet d = g.dataset(g.integer(3, 30), g.integer(1, 5), g.integer(1, 3));
    for (const Matrix& m : {icmi_kernel(d, kGauss4).matrix(), icvi_kernel(d, KernelSpec{KernelFamily::Laplace, 1.0}).matrix(),
                            icmi_id(d).matrix()}) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(m);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * std::abs(m.trace()));
    }
  }
}

TEST(Properties, PermutationInvariance) {
  Gen g(14);
  const DataSet d = g.dataset(15, 3, 2);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(15);
  perm.setIdentity();
  std::shuffle(perm.indices().data(), perm.indices().data() + 15, g.engine());
  const DataSet s{perm * d.x, perm * d.y};
  for (const auto& spec : {MethodSpec::im_pr(), MethodSpec::iv_pr(), MethodSpec::im_kernel(kGauss4),
                           MethodSpec::iv_kernel(kGauss4), MethodSpec::icmi_id(), MethodSpec::mddm()}) {
    EXPECT_LE(rel_diff(candidate_matrix(s, spec).matrix(), candidate_matrix(d, spec).matrix()), 1e-10)
        << spec.label();
  }
}

TEST(Subspace, WhiteDesignUsesTopAbsoluteEigenvector) {
  Matrix lam = Eigen::Vector3d(2, 1, 0).asDiagonal();
  const auto est = subspace_from_candidate(SymmetricMatrix(lam), SymmetricMatrix::identity(3), 1);
  EXPECT_NEAR(subspace_distance(est.basis, Eigen::Vector3d(1, 0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(est.eigenvalues(0), 2.0, 1e-12);

  lam = Eigen::Vector3d(0.5, -3.0, 0.1).asDiagonal();
  const auto neg = subspace_from_candidate(SymmetricMatrix(lam), SymmetricMatrix::identity(3), 2);
  EXPECT_NEAR(subspace_distance(neg.basis, Matrix::Identity(3, 2)), 0.0, 1e-12);
  EXPECT_NEAR(neg.eigenvalues(0), -3.0, 1e-12);
}

TEST(Subspace, OrthonormalBasisAndDimensionChecks) {
  Gen g(15);
  const DataSet d = g.dataset(40, 5, 1);
  const auto est = estimate_subspace(d, MethodSpec::im_kernel(kGauss4), 3);
  EXPECT_EQ(est.d(), 3);
  EXPECT_EQ(est.p(), 5);
  EXPECT_LE((est.basis.transpose() * est.basis - Matrix::Identity(3, 3)).norm(), 1e-10);
  for (Eigen::Index k = 0; k + 1 < est.eigenvalues.size(); ++k)
    EXPECT_GE(std::abs(est.eigenvalues(k)), std::abs(est.eigenvalues(k + 1)));
  EXPECT_EQ(testgen::error_code_of([&] { estimate_subspace(d, MethodSpec::mddm(), 6); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(testgen::error_code_of([&] { estimate_subspace(d, MethodSpec::mddm(), 0); }),
            ErrorCode::DimensionMismatch);
}

TEST(Subspace, SingularCovarianceFallsBackToRidge) {
  Gen g(16);
  DataSet d = g.dataset(30, 3, 1);
  d.x.col(2) = d.x.col(0) + d.x.col(1);
  const auto est = estimate_subspace(d, MethodSpec::mddm(), 1);
  EXPECT_TRUE(est.basis.allFinite());
  EXPECT_EQ(testgen::error_code_of([&] { estimate_subspace(d, MethodSpec::mddm(), 1, 1e-300); }),
            ErrorCode::SingularCovariance);
}

TEST(Subspace, RecoversLinearIndex) {
  Gen g(17);
  DataSet d{g.normal_matrix(400, 4), Matrix(400, 1)};
  const Vector beta = Eigen::Vector4d(1, -1, 0, 0);
  d.y.col(0) = d.x * beta + 0.2 * g.normal_vector(400);
  for (const auto& spec : {MethodSpec::im_pr(), MethodSpec::im_kernel(kGauss4), MethodSpec::cume(),
                           MethodSpec::mddm(), MethodSpec::sir()}) {
    EXPECT_LE(subspace_distance(estimate_subspace(d, spec, 1).basis, beta), 0.2) << spec.label();
  }
}
