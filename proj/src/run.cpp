#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sdrkit/cli.hpp"
#include "sdrkit/error.hpp"
#include "sdrkit/evaluate.hpp"
#include "sdrkit/parallel.hpp"

#ifndef SDRKIT_VERSION
#define SDRKIT_VERSION "unknown"
#endif

namespace sdrkit {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorCode::IoFailure, "cannot write " + path);
  }
  void row(const std::vector<std::string>& cells) { out_ << join(cells) << '\n'; }
  ~CsvWriter() = default;
  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::IoFailure, "failed writing " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

std::optional<double> first_gamma(const RunConfig& c) {
  if (c.gammas.empty()) return std::nullopt;
  return c.gammas.front();
}

std::vector<MethodSpec> method_specs(const RunConfig& c, std::optional<double> gamma) {
  std::vector<MethodSpec> out;
  for (const auto& t : c.methods) out.push_back(parse_method(t, gamma, c.slices));
  return out;
}

SimSpec sim_spec(const RunConfig& c) {
  SimSpec s;
  s.example = parse_example(c.example);
  s.error = parse_error_law(c.error);
  s.n = c.n;
  s.seed = c.seed;
  s.mixture = c.mixture_sd ? MixtureReading::StandardDeviation : MixtureReading::Variance;
  return s;
}

std::string gamma_cell(const MethodSpec& m) { return m.kernel ? format_number(m.kernel->gamma) : "NA"; }

void write_manifest(const RunConfig& c, const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["tool"] = "sdrkit";
  j["version"] = SDRKIT_VERSION;
  j["command"] = std::string(to_string(c.command));
  j["seed"] = c.seed;
  j["methods"] = c.methods;
  j["gammas"] = c.gammas;
  j["slices"] = c.slices;
  j["d"] = c.d ? nlohmann::ordered_json(*c.d) : nlohmann::ordered_json(nullptr);
  j["ridge"] = c.ridge;
  if (c.command == Command::Estimate || c.command == Command::Bootstrap) {
    j["input_path"] = c.input_path.value_or("");
    j["x_columns"] = c.x_columns;
    j["y_columns"] = c.y_columns;
    j["sqrt_columns"] = c.sqrt_columns;
    j["strict"] = c.strict;
  } else {
    j["example"] = c.example;
    j["error"] = c.error;
    j["n"] = c.n;
    j["mixture_reading"] = c.mixture_sd ? "sd" : "variance";
  }
  if (c.command == Command::Bench) {
    j["sizes"] = c.sizes;
  }
  j["replications"] = c.replications;
  if (c.command == Command::Bootstrap) j["resamples"] = c.resamples;
  j["record_timing"] = c.record_timing;
  j["outputs"] = outputs;
  std::ofstream out(c.output_path + ".manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write manifest for " + c.output_path);
  out << j.dump(2) << '\n';
}

LoadedCsv load_input(const RunConfig& c, std::ostream& diag) {
  LoadedCsv loaded = load_csv(*c.input_path, c.x_columns, c.y_columns, c.sqrt_columns, c.strict);
  if (loaded.dropped_rows > 0) {
    diag << "warning: dropped " << loaded.dropped_rows << " row(s) with missing or non-numeric values\n";
  }
  loaded.data.validate();
  return loaded;
}

std::vector<std::string> run_estimate(const RunConfig& c, std::ostream& diag) {
  const LoadedCsv loaded = load_input(c, diag);
  const MethodSpec method = method_specs(c, first_gamma(c)).front();
  const int d = c.d.value_or(1);
  const SubspaceEstimate est = estimate_subspace(loaded.data, method, d, c.ridge);
  const double top = est.eigenvalues.size() ? est.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  if (!(top > 1e-12)) {
    diag << "warning: degenerate spectrum (max |eigenvalue| = " << format_number(top)
         << "); the basis is arbitrary\n";
  }

  CsvWriter basis(c.output_path);
  std::vector<std::string> head{"variable"};
  for (int k = 0; k < est.d(); ++k) head.push_back("dir" + std::to_string(k + 1));
  basis.row(head);
  for (Eigen::Index j = 0; j < est.p(); ++j) {
    std::vector<std::string> cells{loaded.x_names[static_cast<std::size_t>(j)]};
    for (int k = 0; k < est.d(); ++k) cells.push_back(format_number(est.basis(j, k)));
    basis.row(cells);
  }
  basis.close();

  const std::string eig_path = c.output_path + ".eigenvalues.csv";
  CsvWriter eig(eig_path);
  eig.row({"rank", "eigenvalue"});
  for (Eigen::Index k = 0; k < est.eigenvalues.size(); ++k) {
    eig.row({std::to_string(k + 1), format_number(est.eigenvalues(k))});
  }
  eig.close();
  return {c.output_path, eig_path};
}

ExperimentPlan make_plan(const RunConfig& c) {
  ExperimentPlan plan;
  plan.sim = sim_spec(c);
  plan.methods = method_specs(c, first_gamma(c));
  plan.replications = c.replications;
  plan.d = c.d;
  return plan;
}

std::vector<std::string> run_simulate(const RunConfig& c, int workers) {
  const ExperimentPlan plan = make_plan(c);
  plan.validate();
  const SimResult res = run_monte_carlo(plan, workers);
  CsvWriter out(c.output_path);
  std::vector<std::string> head{"example", "error", "method", "gamma", "n", "p", "mean_dist", "sd_dist",
                                "mean_runtime_s", "failed_reps"};
  if (c.record_timing) head.push_back("mean_runtime_inclusive_s");
  out.row(head);
  for (const auto& s : res.methods) {
    std::vector<std::string> row{c.example,
                                 c.error,
                                 s.method.label(),
                                 gamma_cell(s.method),
                                 std::to_string(c.n),
                                 std::to_string(res.p),
                                 format_number(s.mean_dist),
                                 format_number(s.sd_dist),
                                 c.record_timing ? format_number(s.mean_runtime_s) : "NA",
                                 std::to_string(s.failed)};
    if (c.record_timing) row.push_back(format_number(s.mean_runtime_inclusive_s));
    out.row(row);
  }
  out.close();
  return {c.output_path};
}

std::vector<std::string> run_bench(const RunConfig& c) {
  ExperimentPlan plan = make_plan(c);
  std::vector<Eigen::Index> sizes = c.sizes.empty() ? std::vector<Eigen::Index>{c.n} : c.sizes;
  plan.sim.n = sizes.front();
  const BenchTable table = runtime_bench(plan, sizes);
  CsvWriter out(c.output_path);
  out.row({"method", "n", "mean_seconds", "mean_seconds_inclusive"});
  for (const auto& r : table.rows) {
    out.row({r.method, std::to_string(r.n), format_number(r.mean_seconds), format_number(r.mean_seconds_inclusive)});
  }
  out.close();
  const std::string slope_path = c.output_path + ".slopes.csv";
  CsvWriter slopes(slope_path);
  slopes.row({"method", "loglog_slope"});
  for (const auto& [name, slope] : table.slopes) slopes.row({name, format_number(slope)});
  slopes.close();
  return {c.output_path, slope_path};
}

std::vector<std::string> run_bootstrap(const RunConfig& c, int workers, std::ostream& diag) {
  const LoadedCsv loaded = load_input(c, diag);
  const auto methods = method_specs(c, first_gamma(c));
  const BootstrapReport rep = bootstrap_eval(loaded.data, methods, c.d.value_or(1), c.resamples, c.seed, workers);
  CsvWriter out(c.output_path);
  out.row({"method", "gamma", "n", "p", "d", "resamples", "mean_dist", "sd_dist", "mse_dist", "median_one_minus_r",
           "sd_one_minus_r", "failed_resamples"});
  for (const auto& s : rep.methods) {
    out.row({s.method.label(), gamma_cell(s.method), std::to_string(loaded.data.n()), std::to_string(loaded.data.p()),
             std::to_string(c.d.value_or(1)), std::to_string(rep.resamples), format_number(s.mean_dist),
             format_number(s.sd_dist), format_number(s.mse_dist), format_number(s.median_one_minus_r),
             format_number(s.sd_one_minus_r), std::to_string(s.failed)});
  }
  out.close();
  return {c.output_path};
}

std::vector<std::string> run_gamma_sweep(const RunConfig& c, int workers) {
  const ExperimentPlan plan = make_plan(c);
  const auto rows = gamma_sweep(plan, c.gammas, workers);
  CsvWriter out(c.output_path);
  out.row({"gamma", "method", "mse_dist"});
  for (const auto& r : rows) out.row({format_number(r.gamma), r.method, format_number(r.mse_dist)});
  out.close();
  return {c.output_path};
}

bool is_kernel_token(const std::string& t) {
  return t.ends_with("_gauss") || t.ends_with("_lap") || t.ends_with("_rq") || t.ends_with("_gaussian") ||
         t.ends_with("_laplace");
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Estimate: return "estimate";
    case Command::Simulate: return "simulate";
    case Command::Bench: return "bench";
    case Command::Bootstrap: return "bootstrap";
    case Command::GammaSweep: return "gamma-sweep";
  }
  return "?";
}

Command parse_command(std::string_view token) {
  for (auto c : {Command::Estimate, Command::Simulate, Command::Bench, Command::Bootstrap, Command::GammaSweep}) {
    if (token == to_string(c)) return c;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown command '" + std::string(token) + "'");
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (output_path.empty()) fail("an output path is required");
  if (methods.empty()) fail("at least one method is required");
  if (command == Command::Estimate && methods.size() != 1) fail("estimate takes exactly one method");
  if (slices < 1) fail("slice count must be at least 1");
  if (d && *d < 1) fail("d must be at least 1");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) fail("ridge must be a finite non-negative number");
  for (double g : gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) fail("gamma values must be positive and finite");
  }
  const bool any_kernel = std::any_of(methods.begin(), methods.end(), is_kernel_token);
  if (command == Command::GammaSweep) {
    if (gammas.empty()) fail("gamma-sweep needs at least one gamma");
    if (!any_kernel) fail("gamma-sweep needs at least one kernel method");
  } else if (gammas.size() > 1) {
    fail("only gamma-sweep accepts more than one gamma");
  }
  // Parse every method now so bad tokens and missing bandwidths fail before any work.
  for (const auto& t : methods) parse_method(t, gammas.empty() ? std::nullopt : std::optional(gammas.front()), slices);

  const bool uses_file = command == Command::Estimate || command == Command::Bootstrap;
  if (uses_file) {
    if (!input_path || input_path->empty()) fail("an input CSV is required");
    if (x_columns.empty() || y_columns.empty()) fail("predictor and response columns are required");
    const std::set<std::string> xs(x_columns.begin(), x_columns.end());
    if (xs.size() != x_columns.size()) fail("duplicate predictor column");
    for (const auto& y : y_columns) {
      if (xs.count(y)) fail("column '" + y + "' is both predictor and response");
    }
    if (command == Command::Bootstrap && resamples < 1) fail("resamples must be at least 1");
  } else {
    if (replications < 1) fail("replications must be at least 1");
    SimSpec s;
    s.example = parse_example(example);
    s.error = parse_error_law(error);
    s.n = command == Command::Bench && !sizes.empty() ? sizes.front() : n;
    s.validate();
    if (command == Command::Bench) {
      for (Eigen::Index m : sizes) {
        s.n = m;
        s.validate();
      }
      if (!std::is_sorted(sizes.begin(), sizes.end())) fail("bench sizes must be ascending");
    }
    if (d && *d > s.p()) fail("d exceeds the predictor dimension");
  }
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidSpec:
    case ErrorCode::MissingKernelSpec:
      return kExitConfig;
    case ErrorCode::MissingColumn:
    case ErrorCode::NonNumericCell:
    case ErrorCode::NegativeUnderSqrt:
    case ErrorCode::IoFailure:
    case ErrorCode::TooFewSamples:
    case ErrorCode::UnivariateOnly:
    case ErrorCode::TooManySlices:
    case ErrorCode::InvalidVector:
      return kExitData;
    case ErrorCode::InvalidMatrix:
    case ErrorCode::SingularCovariance:
    case ErrorCode::RankDeficient:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::SliceTooSmall:
      return kExitNumerical;
  }
  return kExitNumerical;
}

int run(const RunConfig& config, std::ostream& diag) {
  std::string stage = "config";
  try {
    config.validate();
    const int workers = resolve_workers(0);
    std::vector<std::string> outputs;
    stage = std::string(to_string(config.command));
    switch (config.command) {
      case Command::Estimate: outputs = run_estimate(config, diag); break;
      case Command::Simulate: outputs = run_simulate(config, workers); break;
      case Command::Bench: outputs = run_bench(config); break;
      case Command::Bootstrap: outputs = run_bootstrap(config, workers, diag); break;
      case Command::GammaSweep: outputs = run_gamma_sweep(config, workers); break;
    }
    stage = "manifest";
    write_manifest(config, outputs);
    return kExitOk;
  } catch (const Error& e) {
    diag << "error [" << stage << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    diag << "error [" << stage << "]: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace sdrkit
