#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "commands.h"
#include "json.hpp"
#include "stratshap/csv.h"
#include "stratshap/engine.h"
#include "stratshap/oracle.h"
#include "stratshap/parallel.h"
#include "stratshap/report_io.h"
#include "stratshap/rng.h"

namespace stratshap::cli {
namespace {

int feature_index(const std::string& ref, const std::vector<std::string>& names, const char* flag) {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == ref) return static_cast<int>(j);
  }
  try {
    std::size_t used = 0;
    const int j = std::stoi(ref, &used);
    if (used == ref.size() && j >= 0 && j < static_cast<int>(names.size())) return j;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(flag) + ": unknown feature '" + ref + "'");
}

XiChoice parse_xi(const std::string& text) {
  const auto eq = text.find('=');
  const std::string head = text.substr(0, eq);
  const std::string arg = eq == std::string::npos ? std::string() : text.substr(eq + 1);
  if (head == "global-mean" && eq == std::string::npos) return XiChoice::global_mean();
  if (head == "stratum-mean") {
    if (eq == std::string::npos) return XiChoice::own_stratum_mean();
    return XiChoice::stratum_mean(parse_double(arg, "--xi stratum label"));
  }
  if (head == "explicit" && eq != std::string::npos) {
    return XiChoice::explicit_value(parse_double(arg, "--xi value"));
  }
  if (head == "representative" && eq != std::string::npos) {
    std::vector<double> values;
    for (const std::string& cell : split_csv_line(arg)) {
      values.push_back(parse_double(cell, "--xi representative"));
    }
    return XiChoice::representative_row(FeatureVector(std::move(values)));
  }
  throw ConfigError("--xi: expected global-mean, stratum-mean[=<label>], explicit=<v> or "
                    "representative=<v1,v2,..>, got '" + text + "'");
}

std::optional<SplineParams> spline_params(const Model& model) {
  if (auto* m = std::get_if<SplineLinearModel>(&model.variant())) return m->params;
  if (auto* m = std::get_if<SplineConstantModel>(&model.variant())) return m->params;
  return std::nullopt;
}

// Everything resolved once before the per-instance loop.
struct Plan {
  ExplainConfig config;
  std::shared_ptr<const Model> model;
  Dataset instances;
  // Empirical background (model columns, categorical kinds applied).
  std::shared_ptr<const Dataset> full_background;
  // The same after subsampling; shared by every instance.
  std::shared_ptr<const Dataset> background;
  bool analytic = false;
  SplineParams spline;
  bool conditional = false;
  std::vector<MatchRule> rules;
  std::optional<CausalOrdering> ordering;
  int stratum_feature = -1;
  Direction direction = Direction::kStratumIsCause;
  int recipient = -1;
  XiChoice xi;
  // xi resolved once, unless it depends on the instance's stratum.
  std::optional<double> fixed_xi;
};

Plan make_plan(const ExplainConfig& c) {
  if (c.threads < 1) throw ConfigError("--threads must be at least 1");
  if (c.permutations < 1) throw ConfigError("--permutations must be at least 1");
  if (c.match_bins < 1) throw ConfigError("--match-bins must be at least 1");
  if (c.stratum_width < 0.0) throw ConfigError("--stratum-width must be non-negative");
  if (c.trace && c.format != "json") throw ConfigError("--trace needs --format json");
  if (c.background.empty()) throw ConfigError("--background is required (a CSV path or 'analytic')");

  Plan plan;
  plan.config = c;
  plan.model = std::make_shared<const Model>(load_model(c.model));
  const Model& model = *plan.model;
  const auto& names = model.feature_names();
  plan.instances = select_model_columns(read_csv(c.data), model, "--data");
  plan.conditional = c.value == "conditional";

  plan.analytic = c.background == "analytic";
  if (plan.analytic) {
    auto p = spline_params(model);
    if (!p) throw ConfigError("--background analytic needs a spline_linear or spline_constant model");
    plan.spline = *p;
  } else {
    Dataset bg = select_model_columns(read_csv(c.background), model, "--background");
    std::vector<ColumnKind> kinds = bg.kinds();
    for (const std::string& name : c.categorical) {
      kinds[feature_index(name, names, "--categorical")] = ColumnKind::kCategorical;
    }
    bg = bg.with_kinds(std::move(kinds));
    if (bg.num_rows() == 0) throw EmptyBackground("--background has no rows");
    plan.full_background = std::make_shared<const Dataset>(bg);
    plan.background = std::make_shared<const Dataset>(subsample_rows(bg, c.subsample, c.seed));
    for (std::size_t j = 0; j < bg.num_features(); ++j) {
      plan.rules.push_back(bg.kind(j) == ColumnKind::kCategorical ? MatchRule::exact()
                                                                   : MatchRule::quantile_bins(c.match_bins));
    }
  }

  plan.ordering = c.ordering.empty() ? CausalOrdering::single_group(model.num_features())
                                     : CausalOrdering::parse(c.ordering, names);
  plan.ordering->validate(model.num_features());

  if (c.method == "stratified") {
    if (c.stratum_feature.empty()) throw ConfigError("--method stratified needs --stratum-feature");
    if (plan.conditional) {
      throw ConfigError("--method stratified uses the marginal game inside each stratum");
    }
    plan.stratum_feature = feature_index(c.stratum_feature, names, "--stratum-feature");
    plan.direction = c.direction == "effect" ? Direction::kStratumIsEffect : Direction::kStratumIsCause;
    const int requested = c.recipient.empty() ? -1 : feature_index(c.recipient, names, "--recipient");
    try {
      plan.recipient =
          resolve_recipient(plan.direction, plan.stratum_feature, requested, model.num_features());
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    plan.xi = parse_xi(c.xi);
    if (plan.xi.representative && plan.xi.representative->size() != names.size()) {
      throw ConfigError("--xi representative needs " + std::to_string(names.size()) + " values");
    }
    if (plan.analytic) {
      if (plan.stratum_feature != 1 || c.stratum_width > 0.0) {
        throw ConfigError("the analytic background stratifies on the second spline feature only");
      }
      const SplineParams& p = plan.spline;
      const double g = oracle::kGamma;
      switch (plan.xi.kind) {
        case XiChoice::Kind::kGlobalMean: plan.fixed_xi = p.beta0 + p.beta12 * g; break;
        case XiChoice::Kind::kStratumMean:
          if (plan.xi.stratum_label) {
            plan.fixed_xi = *plan.xi.stratum_label > 0.5 ? p.beta0 + 2.0 * (p.beta1 + p.beta12) * g
                                                         : p.beta0 - 2.0 * p.beta1 * g;
          }
          break;
        case XiChoice::Kind::kRepresentative: plan.fixed_xi = model.predict(*plan.xi.representative); break;
        case XiChoice::Kind::kExplicit: plan.fixed_xi = plan.xi.value; break;
      }
    } else {
      StratumSpec spec{plan.stratum_feature, {}};
      if (c.stratum_width > 0.0) spec.key = bucket_key(c.stratum_width);
      plan.fixed_xi = resolve_xi(plan.xi, model, *plan.full_background, spec, {c.subsample, c.seed});
    }
  }
  return plan;
}

ExactOptions exact_options(const Plan& plan, int threads) {
  ExactOptions o;
  o.cap = plan.config.cap;
  o.threads = threads;
  o.sampling_error = plan.config.std_error;
  o.keep_trace = plan.config.trace;
  return o;
}

PermutationOptions permutation_options(const Plan& plan, std::size_t instance, int threads) {
  PermutationOptions o;
  o.permutations = plan.config.permutations;
  o.seed = derive_seed(plan.config.seed, instance);
  o.antithetic = !plan.config.no_antithetic;
  o.threads = threads;
  return o;
}

std::unique_ptr<ValueFunction> value_function(const Plan& plan, const FeatureVector& x) {
  if (plan.analytic) {
    const bool linear = std::holds_alternative<SplineLinearModel>(plan.model->variant());
    const oracle::ValueQuad q =
        plan.conditional ? oracle::conditional_values(plan.spline, x.values())
        : linear         ? oracle::value_functions_linear(plan.spline, x.values())
                         : oracle::value_functions_constant(plan.spline, x.values());
    return std::make_unique<TableValueFunction>(
        oracle::as_value_function(q, plan.conditional ? ValueKind::kConditional : ValueKind::kMarginal));
  }
  if (plan.conditional) {
    return std::make_unique<ConditionalProvider>(plan.model, x, plan.background, plan.rules);
  }
  return std::make_unique<MarginalProvider>(plan.model, x, plan.background);
}

AttributionReport explain_one(const Plan& plan, std::size_t i, int threads) {
  const FeatureVector x = plan.instances.feature_vector(i);
  const std::string& method = plan.config.method;
  AttributionReport report;
  if (method == "stratified") {
    if (plan.analytic) {
      const TableValueFunction game = oracle::stratum_value_function(plan.spline, x.values());
      report = redistribute_stratum(game, plan.stratum_feature, plan.direction, plan.recipient,
                                    plan.fixed_xi, exact_options(plan, threads))
                   .report;
    } else {
      StratifiedConfig cfg;
      cfg.stratum.feature = plan.stratum_feature;
      if (plan.config.stratum_width > 0.0) cfg.stratum.key = bucket_key(plan.config.stratum_width);
      cfg.direction = plan.direction;
      cfg.recipient = plan.recipient;
      cfg.xi = plan.fixed_xi ? XiChoice::explicit_value(*plan.fixed_xi) : XiChoice::own_stratum_mean();
      cfg.background = {plan.config.subsample, plan.config.seed};
      cfg.exact = exact_options(plan, threads);
      report = stratified_explain(plan.model, x, *plan.full_background, cfg).report;
    }
  } else {
    const std::unique_ptr<ValueFunction> v = value_function(plan, x);
    if (method == "exact") {
      report = exact_shapley(*v, exact_options(plan, threads));
    } else if (method == "permutation") {
      report = permutation_shapley(*v, permutation_options(plan, i, threads));
    } else {
      AsymmetricOptions o;
      o.cap = plan.config.cap;
      o.threads = threads;
      o.sampling = permutation_options(plan, i, threads);
      report = asymmetric_shapley(*v, *plan.ordering, o);
    }
  }
  report.feature_names = plan.model->feature_names();
  return report;
}

// The resolved configuration, echoed into every output file. Thread count is
// left out: it never changes the numbers.
nlohmann::ordered_json provenance(const Plan& plan) {
  const ExplainConfig& c = plan.config;
  nlohmann::ordered_json j;
  j["command"] = "explain";
  j["data"] = c.data;
  j["model"] = c.model;
  j["model_kind"] = plan.model->kind();
  j["method"] = c.method;
  j["value"] = c.value;
  j["background"] = c.background;
  j["subsample"] = c.subsample;
  j["seed"] = c.seed;
  if (c.method == "permutation" || c.method == "asymmetric") {
    j["permutations"] = c.permutations;
    j["antithetic"] = !c.no_antithetic;
  }
  if (c.method == "asymmetric") j["ordering"] = c.ordering.empty() ? "single-group" : c.ordering;
  if (plan.conditional) j["match_bins"] = c.match_bins;
  if (!c.categorical.empty()) j["categorical"] = c.categorical;
  if (c.method == "stratified") {
    j["stratum_feature"] = plan.model->feature_names()[plan.stratum_feature];
    j["stratum_width"] = c.stratum_width;
    j["direction"] = std::string(direction_label(plan.direction));
    j["recipient"] = plan.model->feature_names()[plan.recipient];
    j["xi"] = c.xi;
    if (plan.fixed_xi) j["xi_value"] = *plan.fixed_xi;
  }
  j["cap"] = c.cap;
  j["stderr"] = c.std_error;
  return j;
}

struct InstanceError {
  std::size_t instance = 0;
  std::string kind;
  std::string coalition;
  std::string message;
};

}  // namespace

int cmd_explain(const ExplainConfig& config, std::ostream& out, std::ostream& err) {
  Plan plan;
  try {
    plan = make_plan(config);
  } catch (const std::exception& e) {
    return report_error(e, err);
  }

  const std::size_t n = plan.instances.num_rows();
  std::vector<std::optional<AttributionReport>> reports(n);
  std::vector<std::optional<InstanceError>> errors(n);
  const int inner_threads = n == 1 ? config.threads : 1;
  parallel_for(n, n == 1 ? 1 : config.threads, [&](std::size_t i) {
    try {
      reports[i] = explain_one(plan, i, inner_threads);
    } catch (const Error& e) {
      errors[i] = InstanceError{i, e.kind(), e.coalition() ? e.coalition()->to_string() : "", e.what()};
    } catch (const std::exception& e) {
      errors[i] = InstanceError{i, "Error", "", e.what()};
    }
  });

  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (reports[i]) rows.push_back({i, std::move(*reports[i])});
  }
  const auto config_json = provenance(plan);
  std::ostringstream text;
  if (config.format == "json") {
    nlohmann::json doc;
    doc["config"] = nlohmann::json::parse(config_json.dump());
    doc["reports"] = nlohmann::json::array();
    for (const ReportRow& row : rows) {
      doc["reports"].push_back(report_to_json(row, plan.model->feature_names(), config.trace));
    }
    text << doc.dump(2) << '\n';
  } else {
    write_reports_csv(text, rows, plan.model->feature_names(), config_json.dump());
  }

  std::size_t failed = 0;
  std::ostringstream manifest;
  manifest << "instance,error,coalition,message\n";
  for (const auto& e : errors) {
    if (!e) continue;
    ++failed;
    std::string message = e->message;
    for (char& ch : message) {
      if (ch == '"') ch = '\'';
    }
    manifest << e->instance << ',' << e->kind << ",\"" << e->coalition << "\",\"" << message << "\"\n";
    err << "instance " << e->instance << ": " << e->kind << ": " << e->message << '\n';
  }
  try {
    write_output(config.out, text.str(), out);
    if (failed > 0 && !config.out.empty()) write_output(config.out + ".errors.csv", manifest.str(), out);
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  for (const ReportRow& row : rows) {
    for (const std::string& w : row.report.warnings) err << "instance " << row.instance << ": warning: " << w << '\n';
  }
  if (failed > 0) {
    err << failed << " of " << n << " instances failed\n";
    return kCheckFailed;
  }
  return kOk;
}

}  // namespace stratshap::cli
