// sdrkit command-line front end.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdrkit/cli.hpp"
#include "sdrkit/error.hpp"

int main(int argc, char** argv) {
  using namespace sdrkit;
  CLI::App app{"Central subspace estimation and simulation benchmarks", "sdrkit"};
  app.set_config("--config", "", "flat key = value config file; command-line flags take precedence");
  app.set_version_flag("--version", SDRKIT_VERSION_STRING);

  RunConfig cfg;
  std::string command;
  std::string input;
  long long n = cfg.n;
  std::vector<long long> sizes;
  app.add_option("command", command, "estimate | simulate | bench | bootstrap | gamma-sweep")->required();
  app.add_option("--input", input, "input CSV (estimate, bootstrap)");
  app.add_option("--x", cfg.x_columns, "predictor columns")->delimiter(',');
  app.add_option("--y", cfg.y_columns, "response columns")->delimiter(',');
  app.add_option("--sqrt", cfg.sqrt_columns, "columns to square-root transform")->delimiter(',');
  app.add_flag("--strict", cfg.strict, "fail on missing or non-numeric cells instead of dropping rows");
  app.add_option("--method", cfg.methods, "method tokens, e.g. im_gauss,iv_pr,sir")->delimiter(',');
  app.add_option("--gamma", cfg.gammas, "kernel bandwidth (several for gamma-sweep)")->delimiter(',');
  app.add_option("--slices", cfg.slices, "slice count for SIR/SAVE");
  app.add_option("--d", cfg.d, "assumed structural dimension");
  app.add_option("--ridge", cfg.ridge, "ridge added to the covariance before whitening");
  app.add_option("--example", cfg.example, "ex1i | ex1ii | ex2 | ex3i | ex3ii | ex4 | ex5");
  app.add_option("--error", cfg.error, "normal | cauchy | mixnormal | mvt1");
  app.add_option("--n", n, "sample size");
  app.add_option("--sizes", sizes, "ascending sample sizes for bench")->delimiter(',');
  app.add_flag("--mixture-sd", cfg.mixture_sd, "read the mixture's N(0, 10) as standard deviation 10");
  app.add_option("--reps", cfg.replications, "Monte Carlo replications");
  app.add_option("--resamples", cfg.resamples, "bootstrap resamples");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_flag("--timing", cfg.record_timing, "write measured runtimes into the simulate table");
  app.add_option("--output", cfg.output_path, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    cfg.command = parse_command(command);
  } catch (const Error& e) {
    std::cerr << "error [config]: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!input.empty()) cfg.input_path = input;
  cfg.n = static_cast<Eigen::Index>(n);
  for (long long s : sizes) cfg.sizes.push_back(static_cast<Eigen::Index>(s));
  return run(cfg, std::cerr);
}
