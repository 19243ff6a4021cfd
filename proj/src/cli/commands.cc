#include "commands.h"

#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "stratshap/csv.h"

namespace stratshap::cli {

Dataset select_model_columns(const Dataset& data, const Model& model, const std::string& what) {
  std::vector<std::size_t> columns;
  for (const std::string& name : model.feature_names()) {
    auto j = data.column_index(name);
    if (!j) throw ConfigError(what + " has no column '" + name + "' required by the model");
    columns.push_back(*j);
  }
  return data.select_columns(columns);
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << content;
  file.close();
  if (!file) throw IoError("failed writing '" + path + "'");
}

int report_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  if (dynamic_cast<const IoError*>(&e)) return kIoError;
  return kConfigError;
}

namespace {

void add_explain(CLI::App& app, ExplainConfig& c) {
  app.add_option("--data", c.data, "CSV of instances to explain")->required();
  app.add_option("--model", c.model, "Model JSON file")->required();
  app.add_option("--method", c.method, "exact | permutation | asymmetric | stratified")
      ->check(CLI::IsMember({"exact", "permutation", "asymmetric", "stratified"}));
  app.add_option("--value", c.value, "Value function: marginal | conditional")
      ->check(CLI::IsMember({"marginal", "conditional"}));
  app.add_option("--background", c.background, "Background CSV, or 'analytic' for spline models");
  app.add_option("--subsample", c.subsample, "Background rows kept (0 = all)");
  app.add_option("--seed", c.seed, "Seed for subsampling and permutations");
  app.add_option("--permutations", c.permutations, "Permutations for the sampling estimator");
  app.add_flag("--no-antithetic", c.no_antithetic, "Sample orders independently");
  app.add_option("--ordering", c.ordering, "Causal groups, e.g. 'x1;x2' or 'age;bm,z1'");
  app.add_option("--stratum-feature", c.stratum_feature, "Stratum feature name or index");
  app.add_option("--stratum-width", c.stratum_width, "Bucket width for the stratum key (0 = raw value)");
  app.add_option("--direction", c.direction, "effect | cause")->check(CLI::IsMember({"effect", "cause"}));
  app.add_option("--recipient", c.recipient, "Feature receiving the reference shift");
  app.add_option("--xi", c.xi,
                 "global-mean | stratum-mean[=<label>] | explicit=<v> | representative=<v1,v2,..>");
  app.add_option("--categorical", c.categorical, "Columns matched exactly when conditioning")
      ->delimiter(',');
  app.add_option("--match-bins", c.match_bins, "Quantile bins for continuous conditioning");
  app.add_option("--cap", c.cap, "Largest feature count for exact enumeration");
  app.add_flag("--stderr", c.std_error, "Report background-sampling standard errors");
  app.add_option("--out", c.out, "Output path (stdout when omitted)");
  app.add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", c.threads, "Worker threads");
  app.add_flag("--trace", c.trace, "Include v(S) traces (json format)");
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shapley attributions: marginal, conditional, stratified and causal"};
  app.name(argv.empty() ? "stratshap" : argv.front());
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);

  ExplainConfig explain;
  add_explain(*app.add_subcommand("explain", "Explain each instance of a data file"), explain);

  OracleCheckConfig oracle;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Check the engine against the closed forms");
  oracle_cmd->add_option("--tolerance", oracle.tolerance, "Largest allowed deviation");
  oracle_cmd->add_option("--cases", oracle.cases, "Random parameter draws");
  oracle_cmd->add_option("--seed", oracle.seed, "Seed for the parameter draws");
  oracle_cmd->add_option("--perturb-gamma", oracle.gamma_perturbation)->group("");
  oracle_cmd->add_option("--export", oracle.export_path, "Write golden fixture rows to this CSV");
  oracle_cmd->add_option("--export-cases", oracle.export_cases, "Parameter draws in the fixture file");

  SimulateConfig simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate synthetic data");
  sim_cmd->add_option("--scenario", simulate.scenario, "spline | age-bm")
      ->check(CLI::IsMember({"spline", "age-bm"}));
  sim_cmd->add_option("--n", simulate.n, "Rows (spline scenario)");
  sim_cmd->add_option("--rows-per-age", simulate.rows_per_age, "Rows per age (age-bm scenario)");
  sim_cmd->add_option("--seed", simulate.seed, "Seed");
  sim_cmd->add_option("--beta", simulate.beta, "beta0,beta1,beta12")->delimiter(',')->expected(3);
  sim_cmd->add_option("--out", simulate.out, "Output CSV")->required();
  sim_cmd->add_option("--model-out", simulate.model_out, "Also write the generating model");
  sim_cmd->add_option("--model-kind", simulate.model_kind, "spline_linear | spline_constant")
      ->check(CLI::IsMember({"spline_linear", "spline_constant"}));

  CompareConfig compare;
  auto* cmp_cmd = app.add_subcommand("compare", "Pair two report files and fit per-feature lines");
  cmp_cmd->add_option("--a", compare.a, "Reference report CSV (x axis)")->required();
  cmp_cmd->add_option("--b", compare.b, "Comparison report CSV (y axis)")->required();
  cmp_cmd->add_option("--out", compare.out, "Paired rows CSV")->required();
  cmp_cmd->add_option("--summary", compare.summary, "Per-feature slope summary CSV");

  ConvergenceConfig conv;
  auto* conv_cmd = app.add_subcommand("convergence", "Permutation error against exact values");
  conv_cmd->add_option("--model", conv.model, "Model JSON file")->required();
  conv_cmd->add_option("--data", conv.data, "Background CSV")->required();
  conv_cmd->add_option("--instances", conv.instances, "CSV holding the instance (default: --data)");
  conv_cmd->add_option("--instance", conv.instance, "Row index of the instance");
  conv_cmd->add_option("--subsample", conv.subsample, "Background rows kept (0 = all)");
  conv_cmd->add_option("--background-seed", conv.background_seed, "Seed for the background subsample");
  conv_cmd->add_option("--schedule", conv.schedule, "Permutation counts")->delimiter(',');
  conv_cmd->add_option("--seeds", conv.seeds, "Seeds, one run each")->delimiter(',');
  conv_cmd->add_flag("--no-antithetic", conv.no_antithetic, "Sample orders independently");
  conv_cmd->add_option("--out", conv.out, "Output CSV (stdout when omitted)");
  conv_cmd->add_option("--threads", conv.threads, "Worker threads");

  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  if (app.got_subcommand("explain")) return cmd_explain(explain, out, err);
  if (app.got_subcommand("oracle-check")) return cmd_oracle_check(oracle, out, err);
  if (app.got_subcommand("simulate")) return cmd_simulate(simulate, out, err);
  if (app.got_subcommand("compare")) return cmd_compare(compare, out, err);
  return cmd_convergence(conv, out, err);
}

}  // namespace stratshap::cli
