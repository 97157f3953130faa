#include "sdrkit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sdrkit/error.hpp"

namespace sdrkit {

namespace {

constexpr Eigen::Index kGramBlockRows = 256;

void require_samples(const DataSet& data, Eigen::Index minimum = 2) {
  data.validate();
  if (data.n() < minimum) {
    throw Error(ErrorCode::TooFewSamples,
                "need at least " + std::to_string(minimum) + " samples, got " + std::to_string(data.n()));
  }
}

const KernelSpec& require_kernel(const std::optional<KernelSpec>& kernel) {
  if (!kernel) throw Error(ErrorCode::MissingKernelSpec, "kernel method called without a kernel");
  kernel->validate();
  return *kernel;
}

double n_squared(const DataSet& data) {
  const double n = static_cast<double>(data.n());
  return n * n;
}

// Σ_ij W_ij (z_i z_iᵀ − Σ)(z_j z_jᵀ − Σ) expanded into matrix products.
Matrix second_order_weighted_sum(const Matrix& z, const Matrix& sigma, const Matrix& w) {
  const Matrix gx = z * z.transpose();
  const Vector row_sums = w.rowwise().sum();
  const Matrix first = z.transpose() * w.cwiseProduct(gx) * z;
  const Matrix weighted_cov = z.transpose() * row_sums.asDiagonal() * z;
  return first - weighted_cov * sigma - sigma * weighted_cov + row_sums.sum() * (sigma * sigma);
}

void check_slicing(const DataSet& data, int slices) {
  if (data.q() != 1) throw Error(ErrorCode::UnivariateOnly, "slicing methods need a univariate response");
  if (slices < 1) throw Error(ErrorCode::InvalidSpec, "slice count must be positive");
  if (slices > data.n()) {
    throw Error(ErrorCode::TooManySlices,
                std::to_string(slices) + " slices requested for " + std::to_string(data.n()) + " samples");
  }
}

}  // namespace

void DataSet::validate() const {
  if (x.rows() != y.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "X has " + std::to_string(x.rows()) + " rows but Y has " +
                                                  std::to_string(y.rows()));
  }
  if (x.cols() < 1 || y.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "X and Y need at least one column");
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::InvalidMatrix, "data contain non-finite values");
}

void MethodSpec::validate() const {
  const bool kernel_method = method == Method::ImK || method == Method::IvK;
  const bool slice_method = method == Method::Sir || method == Method::Save;
  if (kernel_method != kernel.has_value()) {
    throw Error(kernel_method ? ErrorCode::MissingKernelSpec : ErrorCode::InvalidSpec,
                "kernel must be given exactly for kernel methods");
  }
  if (kernel) kernel->validate();
  if (slice_method != slices.has_value()) {
    throw Error(ErrorCode::InvalidSpec, "slice count must be given exactly for SIR/SAVE");
  }
  if (slices && *slices < 1) throw Error(ErrorCode::InvalidSpec, "slice count must be positive");
}

std::string MethodSpec::label() const {
  auto kernel_name = [&] {
    if (!kernel) return std::string("K");
    switch (kernel->family) {
      case KernelFamily::Gaussian: return std::string("Gauss");
      case KernelFamily::Laplace: return std::string("Lap");
      case KernelFamily::RationalQuadratic: return std::string("RQ");
    }
    return std::string("K");
  };
  switch (method) {
    case Method::ImPr: return "IM_PR";
    case Method::ImK: return "IM_" + kernel_name();
    case Method::IvPr: return "IV_PR";
    case Method::IvK: return "IV_" + kernel_name();
    case Method::IcmiId: return "ICMI_ID";
    case Method::Cume: return "CUME";
    case Method::Mddm: return "MDDM";
    case Method::Sir: return "SIR";
    case Method::Save: return "SAVE";
  }
  return "?";
}

std::string MethodSpec::token() const {
  std::string s = label();
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool MethodSpec::is_second_order() const noexcept {
  return method == Method::IvPr || method == Method::IvK || method == Method::Save;
}

MethodSpec parse_method(std::string_view token, std::optional<double> gamma, int slices) {
  auto with_kernel = [&](Method m, KernelFamily family) {
    if (!gamma) throw Error(ErrorCode::MissingKernelSpec, "method '" + std::string(token) + "' needs a gamma");
    KernelSpec k{family, *gamma};
    k.validate();
    return MethodSpec{m, k, std::nullopt};
  };
  if (token == "im_pr") return MethodSpec::im_pr();
  if (token == "iv_pr") return MethodSpec::iv_pr();
  if (token == "icmi_id") return MethodSpec::icmi_id();
  if (token == "cume") return MethodSpec::cume();
  if (token == "mddm") return MethodSpec::mddm();
  if (token == "sir") return MethodSpec::sir(slices);
  if (token == "save") return MethodSpec::save(slices);
  for (auto family : {KernelFamily::Gaussian, KernelFamily::Laplace, KernelFamily::RationalQuadratic}) {
    const std::string suffix(to_string(family));
    if (token == "im_" + suffix) return with_kernel(Method::ImK, family);
    if (token == "iv_" + suffix) return with_kernel(Method::IvK, family);
  }
  throw Error(ErrorCode::InvalidSpec, "unknown method '" + std::string(token) + "'");
}

CenteredDesign center(const Matrix& x) {
  if (x.rows() < 2) throw Error(ErrorCode::TooFewSamples, "centering needs at least 2 rows");
  if (!x.allFinite()) throw Error(ErrorCode::InvalidMatrix, "design has non-finite values");
  const double n = static_cast<double>(x.rows());
  CenteredDesign out;
  out.mean = x.colwise().mean().transpose();
  out.z = x.rowwise() - out.mean.transpose();
  out.cov = SymmetricMatrix(out.z.transpose() * out.z / n);
  return out;
}

CandidateMatrix icmi_pr(const DataSet& data) {
  require_samples(data);
  const Matrix z = center(data.x).z;
  const Matrix w = angle_aggregate(data.y).entries;
  return CandidateMatrix(-(z.transpose() * w * z) / n_squared(data));
}

CandidateMatrix icmi_kernel(const DataSet& data, const std::optional<KernelSpec>& kernel) {
  const KernelSpec& spec = require_kernel(kernel);
  require_samples(data);
  const Matrix z = center(data.x).z;
  const Eigen::Index n = data.n();
  Matrix acc = Matrix::Zero(data.p(), data.p());
  // Row blocks of the gram keep memory at O(block·n) for large n.
  for (Eigen::Index r0 = 0; r0 < n; r0 += kGramBlockRows) {
    const Eigen::Index r1 = std::min(n, r0 + kGramBlockRows);
    const Matrix g = kernel_gram_rows(spec, data.y, r0, r1);
    acc.noalias() += z.middleRows(r0, r1 - r0).transpose() * (g * z);
  }
  return CandidateMatrix(acc / n_squared(data));
}

CandidateMatrix icvi_pr(const DataSet& data) {
  require_samples(data);
  const CenteredDesign c = center(data.x);
  const Matrix w = angle_aggregate(data.y).entries;
  return CandidateMatrix(-second_order_weighted_sum(c.z, c.cov.matrix(), w) / n_squared(data));
}

CandidateMatrix icvi_kernel(const DataSet& data, const std::optional<KernelSpec>& kernel) {
  const KernelSpec& spec = require_kernel(kernel);
  require_samples(data);
  const CenteredDesign c = center(data.x);
  const Matrix g = kernel_gram(spec, data.y).entries;
  return CandidateMatrix(second_order_weighted_sum(c.z, c.cov.matrix(), g) / n_squared(data));
}

CandidateMatrix icmi_id(const DataSet& data) {
  require_samples(data);
  const Matrix z = center(data.x).z;
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.q();
  // v_k = Σ_i I(Y_i ≤ Y_k) z_i, so that M̂ = Σ_k v_k v_kᵀ / n³.
  Matrix v = Matrix::Zero(n, data.p());
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      bool below = true;
      for (Eigen::Index l = 0; l < q && below; ++l) below = data.y(i, l) <= data.y(k, l);
      if (below) v.row(k) += z.row(i);
    }
  }
  const double nd = static_cast<double>(n);
  return CandidateMatrix(v.transpose() * v / (nd * nd * nd));
}

CandidateMatrix cume(const DataSet& data) {
  data.validate();
  if (data.q() != 1) throw Error(ErrorCode::UnivariateOnly, "CUME needs a univariate response");
  return icmi_id(data);
}

CandidateMatrix mddm(const DataSet& data) {
  require_samples(data);
  const Matrix z = center(data.x).z;
  const Matrix dist = distance_matrix(data.y);
  return CandidateMatrix(-(z.transpose() * dist * z) / n_squared(data));
}

std::vector<std::vector<Eigen::Index>> make_slices(const Vector& y, int slices) {
  const Eigen::Index n = y.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return y(a) < y(b); });

  std::vector<Eigen::Index> starts;
  starts.reserve(static_cast<std::size_t>(slices) + 1);
  starts.push_back(0);
  for (int h = 1; h < slices; ++h) {
    Eigen::Index b = static_cast<Eigen::Index>(h) * n / slices;
    b = std::max(b, starts.back());
    while (b > 0 && b < n && y(order[b]) == y(order[b - 1])) ++b;
    starts.push_back(b);
  }
  starts.push_back(n);

  std::vector<std::vector<Eigen::Index>> out;
  for (std::size_t h = 0; h + 1 < starts.size(); ++h) {
    if (starts[h + 1] <= starts[h]) continue;
    out.emplace_back(order.begin() + starts[h], order.begin() + starts[h + 1]);
  }
  return out;
}

CandidateMatrix sir(const DataSet& data, int slices) {
  require_samples(data);
  check_slicing(data, slices);
  const Matrix z = center(data.x).z;
  const double n = static_cast<double>(data.n());
  Matrix acc = Matrix::Zero(data.p(), data.p());
  for (const auto& members : make_slices(data.y.col(0), slices)) {
    Vector m = Vector::Zero(data.p());
    for (Eigen::Index i : members) m += z.row(i).transpose();
    const double nh = static_cast<double>(members.size());
    m /= nh;
    acc += (nh / n) * m * m.transpose();
  }
  return CandidateMatrix(acc);
}

CandidateMatrix save(const DataSet& data, int slices) {
  require_samples(data);
  check_slicing(data, slices);
  const CenteredDesign c = center(data.x);
  const double n = static_cast<double>(data.n());
  const Eigen::Index p = data.p();
  Matrix acc = Matrix::Zero(p, p);
  for (const auto& members : make_slices(data.y.col(0), slices)) {
    if (members.size() < 2) {
      throw Error(ErrorCode::SliceTooSmall, "a slice holds " + std::to_string(members.size()) + " sample");
    }
    const double nh = static_cast<double>(members.size());
    Matrix xs(static_cast<Eigen::Index>(members.size()), p);
    for (std::size_t r = 0; r < members.size(); ++r) xs.row(static_cast<Eigen::Index>(r)) = c.z.row(members[r]);
    const Matrix zs = xs.rowwise() - xs.colwise().mean();
    const Matrix diff = c.cov.matrix() - zs.transpose() * zs / nh;
    acc += (nh / n) * diff * diff;
  }
  return CandidateMatrix(acc);
}

CandidateMatrix candidate_matrix(const DataSet& data, const MethodSpec& spec) {
  spec.validate();
  switch (spec.method) {
    case Method::ImPr: return icmi_pr(data);
    case Method::ImK: return icmi_kernel(data, spec.kernel);
    case Method::IvPr: return icvi_pr(data);
    case Method::IvK: return icvi_kernel(data, spec.kernel);
    case Method::IcmiId: return icmi_id(data);
    case Method::Cume: return cume(data);
    case Method::Mddm: return mddm(data);
    case Method::Sir: return sir(data, *spec.slices);
    case Method::Save: return save(data, *spec.slices);
  }
  throw Error(ErrorCode::InvalidSpec, "unhandled method");
}

SubspaceEstimate subspace_from_candidate(const CandidateMatrix& lambda, const SymmetricMatrix& cov, int d,
                                         double ridge) {
  const Eigen::Index p = cov.dim();
  if (lambda.dim() != p) throw Error(ErrorCode::DimensionMismatch, "candidate and covariance differ in size");
  if (d < 1 || d > p) {
    throw Error(ErrorCode::DimensionMismatch,
                "structural dimension " + std::to_string(d) + " outside [1, " + std::to_string(p) + "]");
  }

  SymmetricMatrix root;
  try {
    root = spd_inv_sqrt(cov, ridge);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularCovariance || ridge > 0.0 || !(cov.trace() > 0.0)) throw;
    root = spd_inv_sqrt(cov, 1e-10 * cov.trace() / static_cast<double>(p));
  }

  const Matrix& b = root.matrix();
  const EigenDecomposition eig = sym_eig(SymmetricMatrix(b * lambda.matrix() * b));

  std::vector<Eigen::Index> rank(static_cast<std::size_t>(p));
  std::iota(rank.begin(), rank.end(), Eigen::Index{0});
  std::stable_sort(rank.begin(), rank.end(), [&](Eigen::Index a, Eigen::Index c) {
    return std::abs(eig.values(a)) > std::abs(eig.values(c));
  });

  Matrix beta(p, d);
  SubspaceEstimate out;
  out.eigenvalues.resize(d);
  for (int k = 0; k < d; ++k) {
    beta.col(k) = b * eig.vectors.col(rank[static_cast<std::size_t>(k)]);
    out.eigenvalues(k) = eig.values(rank[static_cast<std::size_t>(k)]);
  }
  Eigen::HouseholderQR<Matrix> qr(beta);
  out.basis = qr.householderQ() * Matrix::Identity(p, d);
  canonicalize_signs(out.basis);
  return out;
}

SubspaceEstimate estimate_subspace(const DataSet& data, const MethodSpec& spec, int d, double ridge) {
  data.validate();
  if (d < 1 || d > data.p()) {
    throw Error(ErrorCode::DimensionMismatch,
                "structural dimension " + std::to_string(d) + " outside [1, " + std::to_string(data.p()) + "]");
  }
  const CandidateMatrix lambda = candidate_matrix(data, spec);
  return subspace_from_candidate(lambda, center(data.x).cov, d, ridge);
}

}  // namespace sdrkit
