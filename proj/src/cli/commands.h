#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "stratshap/models.h"

namespace stratshap::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kIoError = 3 };

struct ExplainConfig {
  std::string data;
  std::string model;
  std::string method = "exact";
  std::string value = "marginal";
  // CSV path, or "analytic" for the closed-form spline games.
  std::string background;
  std::size_t subsample = 1000;
  std::uint64_t seed = 0;
  int permutations = 128;
  bool no_antithetic = false;
  std::string ordering;
  std::string stratum_feature;
  double stratum_width = 0.0;
  std::string direction = "cause";
  std::string recipient;
  std::string xi = "global-mean";
  std::vector<std::string> categorical;
  int match_bins = 20;
  int cap = 20;
  bool std_error = false;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  bool trace = false;
};

struct OracleCheckConfig {
  double tolerance = 1e-9;
  std::size_t cases = 1000;
  std::uint64_t seed = 20241202;
  // Test hook: shifts the gamma used for xi in the equivalence check only.
  double gamma_perturbation = 0.0;
  std::string export_path;
  std::size_t export_cases = 50;
};

struct OracleCheckResult {
  // (check name, max absolute deviation)
  std::vector<std::pair<std::string, double>> deviations;
  bool passed = false;
};

struct SimulateConfig {
  std::string scenario = "spline";
  std::size_t n = 1000;
  std::size_t rows_per_age = 300;
  std::uint64_t seed = 0;
  std::vector<double> beta = {0.0, 1.0, 1.0};
  std::string out;
  std::string model_out;
  std::string model_kind = "spline_linear";
};

struct CompareConfig {
  std::string a;
  std::string b;
  std::string out;
  std::string summary;
};

struct ConvergenceConfig {
  std::string model;
  std::string data;
  std::string instances;
  std::size_t instance = 0;
  std::size_t subsample = 1000;
  std::uint64_t background_seed = 0;
  std::vector<int> schedule = {16, 64, 256, 1024};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  bool no_antithetic = false;
  std::string out;
  int threads = 1;
};

// Full command line entry point; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

int cmd_explain(const ExplainConfig& config, std::ostream& out, std::ostream& err);
OracleCheckResult run_oracle_check(const OracleCheckConfig& config);
int cmd_oracle_check(const OracleCheckConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareConfig& config, std::ostream& out, std::ostream& err);
int cmd_convergence(const ConvergenceConfig& config, std::ostream& out, std::ostream& err);

// Shared helpers.
Dataset select_model_columns(const Dataset& data, const Model& model, const std::string& what);
// Writes `content` to `path`, or to `out` when the path is empty. Throws IoError.
void write_output(const std::string& path, const std::string& content, std::ostream& out);
// Maps an Error to the documented exit code, printing it to `err`.
int report_error(const std::exception& e, std::ostream& err);

}  // namespace stratshap::cli
