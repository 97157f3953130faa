#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdrkit/error.hpp"
#include "sdrkit/estimators.hpp"
#include "sdrkit/simgen.hpp"

namespace sdrkit {

// ---- CSV ingestion ---------------------------------------------------------

struct LoadedCsv {
  DataSet data;
  std::vector<std::string> x_names;
  std::vector<std::string> y_names;
  std::size_t dropped_rows = 0;
};

/// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_record(const std::string& line);

/// Reads the selected columns of a header-first CSV. Rows with a missing or
/// non-numeric selected cell are dropped (or raise NonNumericCell when
/// `strict`). Columns in `sqrt_columns` are square-root transformed.
LoadedCsv load_csv(const std::string& path, const std::vector<std::string>& x_columns,
                   const std::vector<std::string>& y_columns, const std::vector<std::string>& sqrt_columns = {},
                   bool strict = false);

/// Reads a numeric CSV with a header row into a matrix (header dropped).
Matrix read_numeric_csv(const std::string& path, std::vector<std::string>* header = nullptr);

/// 17 significant digits; NaN prints as NA.
std::string format_number(double v);

// ---- Command runner --------------------------------------------------------

enum class Command { Estimate, Simulate, Bench, Bootstrap, GammaSweep };

std::string_view to_string(Command c);
Command parse_command(std::string_view token);

struct RunConfig {
  Command command = Command::Simulate;
  std::optional<std::string> input_path;
  std::vector<std::string> x_columns;
  std::vector<std::string> y_columns;
  std::vector<std::string> sqrt_columns;
  bool strict = false;

  std::vector<std::string> methods;
  std::vector<double> gammas;  // first entry is the bandwidth outside gamma-sweep
  int slices = 5;
  std::optional<int> d;
  double ridge = 0.0;

  std::string example = "ex1i";
  std::string error = "normal";
  Eigen::Index n = 225;
  std::vector<Eigen::Index> sizes;
  bool mixture_sd = false;
  int replications = 500;
  int resamples = 2000;
  std::uint64_t seed = 1;
  bool record_timing = false;

  std::string output_path;

  /// Throws InvalidConfig / InvalidSpec for anything wrong in the config
  /// itself (file contents are checked when loaded).
  void validate() const;
};

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

int exit_code_for(ErrorCode code);

/// Executes one command, writing its CSV outputs plus a `.manifest.json`
/// sidecar next to `output_path`. Diagnostics go to `diag`. Returns the exit
/// code; never throws for domain errors.
int run(const RunConfig& config, std::ostream& diag);

}  // namespace sdrkit
