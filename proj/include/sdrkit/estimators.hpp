#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdrkit/kernels.hpp"
#include "sdrkit/linalg.hpp"

namespace sdrkit {

/// Predictors x (n×p) paired row-wise with responses y (n×q).
struct DataSet {
  Matrix x;
  Matrix y;

  Eigen::Index n() const noexcept { return x.rows(); }
  Eigen::Index p() const noexcept { return x.cols(); }
  Eigen::Index q() const noexcept { return y.cols(); }

  /// Shape and finiteness checks; throws DimensionMismatch / InvalidMatrix.
  void validate() const;
};

struct CenteredDesign {
  Matrix z;             // X_i − X̄, row-wise
  Vector mean;          // X̄
  SymmetricMatrix cov;  // ZᵀZ / n
};

/// A p×p candidate matrix whose whitened column space targets the central
/// subspace.
using CandidateMatrix = SymmetricMatrix;

enum class Method { ImPr, ImK, IvPr, IvK, IcmiId, Cume, Mddm, Sir, Save };

struct MethodSpec {
  Method method = Method::ImPr;
  std::optional<KernelSpec> kernel;  // IM_K and IV_K only
  std::optional<int> slices;         // SIR and SAVE only

  static MethodSpec im_pr() { return {Method::ImPr, std::nullopt, std::nullopt}; }
  static MethodSpec iv_pr() { return {Method::IvPr, std::nullopt, std::nullopt}; }
  static MethodSpec im_kernel(KernelSpec k) { return {Method::ImK, k, std::nullopt}; }
  static MethodSpec iv_kernel(KernelSpec k) { return {Method::IvK, k, std::nullopt}; }
  static MethodSpec icmi_id() { return {Method::IcmiId, std::nullopt, std::nullopt}; }
  static MethodSpec cume() { return {Method::Cume, std::nullopt, std::nullopt}; }
  static MethodSpec mddm() { return {Method::Mddm, std::nullopt, std::nullopt}; }
  static MethodSpec sir(int h = 5) { return {Method::Sir, std::nullopt, h}; }
  static MethodSpec save(int h = 5) { return {Method::Save, std::nullopt, h}; }

  void validate() const;

  /// Display name in table style, e.g. "IM_Gauss", "IV_PR", "SIR".
  std::string label() const;
  /// Command-line token, e.g. "im_gauss", "iv_pr", "sir".
  std::string token() const;
  bool is_second_order() const noexcept;
};

/// Parses a command-line method token. Kernel methods take `gamma`; slicing
/// methods take `slices`.
MethodSpec parse_method(std::string_view token, std::optional<double> gamma, int slices = 5);

CenteredDesign center(const Matrix& x);

CandidateMatrix icmi_pr(const DataSet& data);
CandidateMatrix icmi_kernel(const DataSet& data, const std::optional<KernelSpec>& kernel);
CandidateMatrix icvi_pr(const DataSet& data);
CandidateMatrix icvi_kernel(const DataSet& data, const std::optional<KernelSpec>& kernel);
CandidateMatrix icmi_id(const DataSet& data);
CandidateMatrix cume(const DataSet& data);
CandidateMatrix mddm(const DataSet& data);
CandidateMatrix sir(const DataSet& data, int slices);
CandidateMatrix save(const DataSet& data, int slices);

/// Dispatches to the estimator named by spec.
CandidateMatrix candidate_matrix(const DataSet& data, const MethodSpec& spec);

/// Slice membership used by SIR/SAVE: sorted by response, near-equal groups
/// cut at the k/H empirical quantiles, ties kept in the lower slice. Empty
/// slices are dropped. Returns the row indices of each slice.
std::vector<std::vector<Eigen::Index>> make_slices(const Vector& y, int slices);

/// Top-d eigenvectors of Σ⁻¹Λ via S = Σ^{-1/2} Λ Σ^{-1/2}, ranked by |λ|,
/// mapped back through Σ^{-1/2} and orthonormalized. A zero ridge falls back
/// to 1e-10·trace(Σ)/p when Σ is not positive definite.
SubspaceEstimate subspace_from_candidate(const CandidateMatrix& lambda, const SymmetricMatrix& cov, int d,
                                         double ridge = 0.0);

SubspaceEstimate estimate_subspace(const DataSet& data, const MethodSpec& spec, int d, double ridge = 0.0);

}  // namespace sdrkit
