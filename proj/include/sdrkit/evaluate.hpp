#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdrkit/estimators.hpp"
#include "sdrkit/simgen.hpp"

namespace sdrkit {

struct ExperimentPlan {
  SimSpec sim;                      // template; each replication replaces the seed
  std::vector<MethodSpec> methods;
  int replications = 500;
  std::optional<int> d;             // defaults to the example's true dimension

  void validate() const;
  int dimension() const { return d.value_or(sim.d()); }
};

struct MethodSummary {
  MethodSpec method;
  double mean_dist = 0.0;
  double sd_dist = 0.0;               // divisor replications − 1; 0 for one replication
  double mse_dist = 0.0;              // mean of dist²
  double mean_runtime_s = 0.0;        // candidate-matrix build only
  double mean_runtime_inclusive_s = 0.0;  // build + whitening + eigendecomposition
  int failed = 0;
  std::vector<double> distances;      // successful replications, in replication order
};

struct SimResult {
  std::vector<MethodSummary> methods;
  int replications = 0;
  Eigen::Index p = 0;
};

/// Replication r draws its sample from substream_seed(plan.sim.seed, r).
/// Distances are independent of the worker count.
SimResult run_monte_carlo(const ExperimentPlan& plan, int workers = 1);

struct BootstrapSummary {
  MethodSpec method;
  double mean_dist = 0.0;
  double sd_dist = 0.0;
  double mse_dist = 0.0;
  double median_one_minus_r = 0.0;
  double sd_one_minus_r = 0.0;
  int failed = 0;
  std::vector<double> distances;
  std::vector<double> one_minus_r;
};

struct BootstrapReport {
  int resamples = 0;
  std::vector<BootstrapSummary> methods;
};

/// Draws n row indices in [0, n) for one resample.
using Resampler = std::function<std::vector<Eigen::Index>(Rng&, Eigen::Index)>;

/// Uniform with-replacement resampling.
std::vector<Eigen::Index> uniform_resample(Rng& rng, Eigen::Index n);

/// Full-data estimate per method against B row-resampled estimates. A resample
/// whose covariance is singular is redrawn up to 10 times, then counted failed.
BootstrapReport bootstrap_eval(const DataSet& data, const std::vector<MethodSpec>& methods, int d, int resamples,
                               std::uint64_t seed, int workers = 1, const Resampler& resampler = uniform_resample);

struct BenchRow {
  std::string method;
  Eigen::Index n = 0;
  double mean_seconds = 0.0;            // candidate-matrix build only
  double mean_seconds_inclusive = 0.0;  // full subspace estimate
};

struct BenchTable {
  std::vector<BenchRow> rows;
  std::vector<std::pair<std::string, double>> slopes;  // log-log slope of mean_seconds vs n
};

/// Times every method at each sample size (ascending), averaging over
/// plan.replications samples. Runs single-threaded.
BenchTable runtime_bench(const ExperimentPlan& plan, const std::vector<Eigen::Index>& sizes);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct GammaSweepRow {
  double gamma = 0.0;
  std::string method;
  double mse_dist = 0.0;
};

/// Runs the plan once per gamma, replacing the bandwidth of every kernel
/// method; non-kernel methods are ignored.
std::vector<GammaSweepRow> gamma_sweep(const ExperimentPlan& plan, const std::vector<double>& gammas,
                                       int workers = 1);

double sample_mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);
double sample_median(std::vector<double> v);

}  // namespace sdrkit
