#include "sdrkit/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "sdrkit/error.hpp"
#include "sdrkit/parallel.hpp"

namespace sdrkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kFailed = std::numeric_limits<double>::quiet_NaN();

struct ReplicationRecord {
  std::vector<double> dist;
  std::vector<double> exclusive_s;
  std::vector<double> inclusive_s;
};

DataSet take_rows(const DataSet& data, const std::vector<Eigen::Index>& rows) {
  DataSet out{Matrix(static_cast<Eigen::Index>(rows.size()), data.p()),
              Matrix(static_cast<Eigen::Index>(rows.size()), data.q())};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.x.row(static_cast<Eigen::Index>(r)) = data.x.row(rows[r]);
    out.y.row(static_cast<Eigen::Index>(r)) = data.y.row(rows[r]);
  }
  return out;
}

bool covariance_is_singular(const Matrix& x) {
  try {
    spd_inv_sqrt(center(x).cov, 0.0);
    return false;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularCovariance) return true;
    throw;
  }
}

}  // namespace

double sample_mean(const std::vector<double>& v) {
  if (v.empty()) return kFailed;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return v.empty() ? kFailed : 0.0;
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double sample_median(std::vector<double> v) {
  if (v.empty()) return kFailed;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void ExperimentPlan::validate() const {
  sim.validate();
  if (replications < 1) throw Error(ErrorCode::InvalidSpec, "replications must be at least 1");
  if (methods.empty()) throw Error(ErrorCode::InvalidSpec, "experiment needs at least one method");
  for (const auto& m : methods) m.validate();
  if (dimension() < 1 || dimension() > sim.p()) {
    throw Error(ErrorCode::DimensionMismatch, "assumed dimension outside [1, p]");
  }
}

SimResult run_monte_carlo(const ExperimentPlan& plan, int workers) {
  plan.validate();
  const auto reps = static_cast<std::size_t>(plan.replications);
  const std::size_t m = plan.methods.size();
  const int d = plan.dimension();
  std::vector<ReplicationRecord> records(reps);

  parallel_for(reps, workers, [&](std::size_t r) {
    SimSpec spec = plan.sim;
    spec.seed = substream_seed(plan.sim.seed, r);
    const GeneratedSample sample = generate(spec);
    const SymmetricMatrix cov = center(sample.data.x).cov;
    ReplicationRecord& rec = records[r];
    rec.dist.assign(m, kFailed);
    rec.exclusive_s.assign(m, kFailed);
    rec.inclusive_s.assign(m, kFailed);
    for (std::size_t k = 0; k < m; ++k) {
      try {
        const auto start = Clock::now();
        const CandidateMatrix lambda = candidate_matrix(sample.data, plan.methods[k]);
        const double built = seconds_since(start);
        const SubspaceEstimate est = subspace_from_candidate(lambda, cov, d);
        rec.inclusive_s[k] = seconds_since(start);
        rec.exclusive_s[k] = built;
        rec.dist[k] = subspace_distance(est.basis, sample.truth);
      } catch (const Error&) {
        rec.dist[k] = kFailed;
      }
    }
  });

  SimResult out;
  out.replications = plan.replications;
  out.p = plan.sim.p();
  for (std::size_t k = 0; k < m; ++k) {
    MethodSummary s;
    s.method = plan.methods[k];
    std::vector<double> ex, in, sq;
    for (const auto& rec : records) {
      if (std::isnan(rec.dist[k])) {
        ++s.failed;
        continue;
      }
      s.distances.push_back(rec.dist[k]);
      sq.push_back(rec.dist[k] * rec.dist[k]);
      ex.push_back(rec.exclusive_s[k]);
      in.push_back(rec.inclusive_s[k]);
    }
    s.mean_dist = sample_mean(s.distances);
    s.sd_dist = sample_sd(s.distances);
    s.mse_dist = sample_mean(sq);
    s.mean_runtime_s = sample_mean(ex);
    s.mean_runtime_inclusive_s = sample_mean(in);
    out.methods.push_back(std::move(s));
  }
  return out;
}

std::vector<Eigen::Index> uniform_resample(Rng& rng, Eigen::Index n) {
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  for (auto& r : rows) r = pick(rng);
  return rows;
}

BootstrapReport bootstrap_eval(const DataSet& data, const std::vector<MethodSpec>& methods, int d, int resamples,
                               std::uint64_t seed, int workers, const Resampler& resampler) {
  data.validate();
  if (resamples < 1) throw Error(ErrorCode::InvalidSpec, "bootstrap needs at least one resample");
  if (methods.empty()) throw Error(ErrorCode::InvalidSpec, "bootstrap needs at least one method");
  const Eigen::Index min_rows = std::max<Eigen::Index>(10, data.p() + 2);
  if (data.n() < min_rows) {
    throw Error(ErrorCode::TooFewSamples,
                "bootstrap needs at least " + std::to_string(min_rows) + " rows, got " + std::to_string(data.n()));
  }
  for (const auto& m : methods) m.validate();

  const std::size_t m = methods.size();
  std::vector<SubspaceEstimate> full;
  full.reserve(m);
  for (const auto& method : methods) full.push_back(estimate_subspace(data, method, d));

  constexpr int kMaxRedraws = 10;
  const auto b_count = static_cast<std::size_t>(resamples);
  std::vector<std::vector<double>> dist(b_count, std::vector<double>(m, kFailed));
  std::vector<std::vector<double>> gap(b_count, std::vector<double>(m, kFailed));

  parallel_for(b_count, workers, [&](std::size_t b) {
    Rng rng = make_rng(substream_seed(seed, b));
    std::optional<DataSet> resample;
    for (int attempt = 0; attempt <= kMaxRedraws && !resample; ++attempt) {
      DataSet candidate = take_rows(data, resampler(rng, data.n()));
      if (!covariance_is_singular(candidate.x)) resample = std::move(candidate);
    }
    if (!resample) return;
    for (std::size_t k = 0; k < m; ++k) {
      try {
        const SubspaceEstimate est = estimate_subspace(*resample, methods[k], d);
        dist[b][k] = subspace_distance(full[k].basis, est.basis);
        gap[b][k] = 1.0 - trace_correlation(full[k].basis, est.basis);
      } catch (const Error&) {
        dist[b][k] = kFailed;
      }
    }
  });

  BootstrapReport out;
  out.resamples = resamples;
  for (std::size_t k = 0; k < m; ++k) {
    BootstrapSummary s;
    s.method = methods[k];
    std::vector<double> sq;
    for (std::size_t b = 0; b < b_count; ++b) {
      if (std::isnan(dist[b][k])) {
        ++s.failed;
        continue;
      }
      s.distances.push_back(dist[b][k]);
      s.one_minus_r.push_back(gap[b][k]);
      sq.push_back(dist[b][k] * dist[b][k]);
    }
    s.mean_dist = sample_mean(s.distances);
    s.sd_dist = sample_sd(s.distances);
    s.mse_dist = sample_mean(sq);
    s.median_one_minus_r = sample_median(s.one_minus_r);
    s.sd_one_minus_r = sample_sd(s.one_minus_r);
    out.methods.push_back(std::move(s));
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return kFailed;
  std::vector<double> lx(x.size()), ly(y.size());
  std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
  std::transform(y.begin(), y.end(), ly.begin(), [](double v) { return std::log(v); });
  const double mx = sample_mean(lx);
  const double my = sample_mean(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

BenchTable runtime_bench(const ExperimentPlan& plan, const std::vector<Eigen::Index>& sizes) {
  if (sizes.empty() || !std::is_sorted(sizes.begin(), sizes.end())) {
    throw Error(ErrorCode::InvalidSpec, "benchmark sizes must be non-empty and ascending");
  }
  if (plan.replications < 1 || plan.methods.empty()) {
    throw Error(ErrorCode::InvalidSpec, "benchmark needs replications >= 1 and at least one method");
  }
  BenchTable table;
  std::vector<std::vector<double>> per_method(plan.methods.size());
  for (Eigen::Index n : sizes) {
    SimSpec spec = plan.sim;
    spec.n = n;
    spec.validate();
    const int d = std::min<int>(plan.dimension(), static_cast<int>(spec.p()));
    std::vector<double> exclusive(plan.methods.size(), 0.0), inclusive(plan.methods.size(), 0.0);
    for (int r = 0; r < plan.replications; ++r) {
      spec.seed = substream_seed(plan.sim.seed, static_cast<std::uint64_t>(r));
      const GeneratedSample sample = generate(spec);
      for (std::size_t k = 0; k < plan.methods.size(); ++k) {
        auto start = Clock::now();
        const CandidateMatrix lambda = candidate_matrix(sample.data, plan.methods[k]);
        exclusive[k] += seconds_since(start);
        start = Clock::now();
        const SubspaceEstimate est = estimate_subspace(sample.data, plan.methods[k], d);
        inclusive[k] += seconds_since(start);
        (void)lambda;
        (void)est;
      }
    }
    for (std::size_t k = 0; k < plan.methods.size(); ++k) {
      const double reps = static_cast<double>(plan.replications);
      table.rows.push_back({plan.methods[k].label(), n, exclusive[k] / reps, inclusive[k] / reps});
      per_method[k].push_back(exclusive[k] / reps);
    }
  }
  std::vector<double> xs(sizes.begin(), sizes.end());
  for (std::size_t k = 0; k < plan.methods.size(); ++k) {
    table.slopes.emplace_back(plan.methods[k].label(), loglog_slope(xs, per_method[k]));
  }
  return table;
}

std::vector<GammaSweepRow> gamma_sweep(const ExperimentPlan& plan, const std::vector<double>& gammas, int workers) {
  std::vector<GammaSweepRow> rows;
  for (double gamma : gammas) {
    ExperimentPlan sweep = plan;
    sweep.methods.clear();
    for (const auto& m : plan.methods) {
      if (!m.kernel) continue;
      MethodSpec k = m;
      k.kernel->gamma = gamma;
      sweep.methods.push_back(k);
    }
    if (sweep.methods.empty()) throw Error(ErrorCode::InvalidSpec, "gamma sweep needs at least one kernel method");
    const SimResult res = run_monte_carlo(sweep, workers);
    for (const auto& s : res.methods) rows.push_back({gamma, s.method.label(), s.mse_dist});
  }
  return rows;
}

}  // namespace sdrkit
