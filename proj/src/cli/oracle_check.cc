#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "commands.h"
#include "stratshap/csv.h"
#include "stratshap/engine.h"
#include "stratshap/oracle.h"
#include "stratshap/rng.h"

namespace stratshap::cli {
namespace {

// Stream for the random xi of each case, kept apart from the case draws.
constexpr std::uint64_t kXiStream = 0x78693a3a78693a3aULL;

double max_deviation(const AttributionReport& got, const AttributionReport& want) {
  double d = std::abs(got.phi0 - want.phi0);
  for (std::size_t j = 0; j < want.phi.size(); ++j) d = std::max(d, std::abs(got.phi[j] - want.phi[j]));
  return d;
}

struct Tracker {
  std::vector<std::pair<std::string, double>> worst;

  void record(const std::string& name, double deviation) {
    for (auto& [n, d] : worst) {
      if (n == name) {
        // NaN compares false, so keep it explicitly: it must fail the check.
        if (std::isnan(deviation) || deviation > d) d = deviation;
        return;
      }
    }
    worst.emplace_back(name, deviation);
  }
};

}  // namespace

OracleCheckResult run_oracle_check(const OracleCheckConfig& config) {
  using oracle::CausalDirection;
  using oracle::Table;
  if (config.cases < 1) throw ConfigError("--cases must be at least 1");
  if (!(config.tolerance >= 0.0)) throw ConfigError("--tolerance must be non-negative");

  const CausalOrdering x1_first({{0}, {1}});
  const CausalOrdering x2_first({{1}, {0}});
  Tracker t;
  double residual = 0.0;
  auto track_residual = [&residual](const AttributionReport& r) {
    residual = std::max(residual, std::abs(r.efficiency_residual));
    return r;
  };

  for (std::size_t i = 0; i < config.cases; ++i) {
    const oracle::RandomCase c = oracle::random_case(config.seed, i);
    const SplineParams& p = c.params;
    const std::span<const double> x(c.x, 2);
    Rng rng(derive_seed(config.seed ^ kXiStream, i));
    const double xi = -3.0 + 6.0 * rng.uniform01();

    const auto linear = oracle::as_value_function(oracle::value_functions_linear(p, x), ValueKind::kMarginal);
    const auto constant = oracle::as_value_function(oracle::value_functions_constant(p, x), ValueKind::kMarginal);
    const auto conditional =
        oracle::as_value_function(oracle::conditional_values(p, x), ValueKind::kConditional);
    const TableValueFunction stratum = oracle::stratum_value_function(p, x);

    t.record("T1 marginal, linear extrapolation",
             max_deviation(track_residual(exact_shapley(linear)), oracle::table_attributions(Table::kT1, p, x)));
    t.record("T2 marginal, constant extrapolation",
             max_deviation(track_residual(exact_shapley(constant)), oracle::table_attributions(Table::kT2, p, x)));

    const StratifiedResult own = redistribute_stratum(stratum, 1, Direction::kStratumIsCause, 1, std::nullopt);
    track_residual(own.report);
    t.record("T3 per-stratum", max_deviation(track_residual(own.stratum_report),
                                             oracle::table_attributions(Table::kT3, p, x)));

    const StratifiedResult effect = redistribute_stratum(stratum, 1, Direction::kStratumIsEffect, 0, xi);
    const StratifiedResult cause = redistribute_stratum(stratum, 1, Direction::kStratumIsCause, 1, xi);
    t.record("T4 stratified, x1 -> x2",
             max_deviation(track_residual(effect.report),
                           oracle::table_attributions(Table::kT4, p, x, CausalDirection::kX1CausesX2, xi)));
    t.record("T4 stratified, x2 -> x1",
             max_deviation(track_residual(cause.report),
                           oracle::table_attributions(Table::kT4, p, x, CausalDirection::kX2CausesX1, xi)));

    const AttributionReport asym12 = track_residual(asymmetric_shapley(conditional, x1_first));
    const AttributionReport asym21 = track_residual(asymmetric_shapley(conditional, x2_first));
    t.record("T6 asymmetric, x1 -> x2",
             max_deviation(asym12, oracle::table_attributions(Table::kT6, p, x, CausalDirection::kX1CausesX2)));
    t.record("T6 asymmetric, x2 -> x1",
             max_deviation(asym21, oracle::table_attributions(Table::kT6, p, x, CausalDirection::kX2CausesX1)));

    const double xi_eq = p.beta0 + p.beta12 * (oracle::kGamma + config.gamma_perturbation);
    const StratifiedResult eq_effect = redistribute_stratum(stratum, 1, Direction::kStratumIsEffect, 0, xi_eq);
    const StratifiedResult eq_cause = redistribute_stratum(stratum, 1, Direction::kStratumIsCause, 1, xi_eq);
    t.record("stratified == asymmetric, x1 -> x2", max_deviation(track_residual(eq_effect.report), asym12));
    t.record("stratified == asymmetric, x2 -> x1", max_deviation(track_residual(eq_cause.report), asym21));
  }
  t.record("efficiency residual", residual);

  OracleCheckResult result;
  result.deviations = t.worst;
  result.passed = std::all_of(result.deviations.begin(), result.deviations.end(),
                              [&](const auto& d) { return d.second <= config.tolerance; });
  return result;
}

int cmd_oracle_check(const OracleCheckConfig& config, std::ostream& out, std::ostream& err) {
  OracleCheckResult result;
  try {
    result = run_oracle_check(config);
    if (!config.export_path.empty()) {
      std::ostringstream text;
      oracle::write_golden_fixtures(text, config.export_cases, config.seed);
      write_output(config.export_path, text.str(), out);
    }
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  out << "check,max_deviation,tolerance,status\n";
  for (const auto& [name, deviation] : result.deviations) {
    out << name << ',' << format_double(deviation) << ',' << format_double(config.tolerance) << ','
        << (deviation <= config.tolerance ? "ok" : "FAIL") << '\n';
  }
  out << (result.passed ? "all checks passed" : "oracle check FAILED") << " over " << config.cases
      << " cases\n";
  return result.passed ? kOk : kCheckFailed;
}

}  // namespace stratshap::cli
