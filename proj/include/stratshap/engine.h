#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stratshap/core.h"
#include "stratshap/models.h"
#include "stratshap/valuefn.h"

namespace stratshap {

struct ExactOptions {
  int cap = kDefaultEnumerationCap;
  int threads = 1;
  // For sample-averaged providers, also report standard errors of phi0 and
  // phi over the samples.
  bool sampling_error = false;
  // Keep every v(S) in the report.
  bool keep_trace = false;
};

// v(S) for all 2^M coalitions, indexed by bitset; each evaluated once.
std::vector<double> coalition_values(const ValueFunction& v, int cap = kDefaultEnumerationCap,
                                     int threads = 1);

// Shapley values of the game given by a full coalition table.
std::vector<double> shapley_from_table(std::span<const double> table, int num_features);

// phi_j = sum over S not containing j of w(|S|, M) (v(S u {j}) - v(S)), phi0 = v(empty).
// Errors raised by the value function carry the offending coalition.
AttributionReport exact_shapley(const ValueFunction& v, const ExactOptions& options = {});

// One row per sample of a sample-averaged provider: (phi0, phi_1 .. phi_M) of
// that sample's game. Column means equal the exact attributions.
std::vector<std::vector<double>> per_sample_attributions(const ValueFunction& v,
                                                         int cap = kDefaultEnumerationCap,
                                                         int threads = 1);

// The closed form for two players.
AttributionReport two_feature_shapley(double v_empty, double v_1, double v_2, double v_12);

struct PermutationOptions {
  int permutations = 128;
  std::uint64_t seed = 0;
  // Pair each sampled order with its reverse. Only applies when
  // `permutations` is even; an odd count samples independent orders.
  bool antithetic = true;
  int threads = 1;
};

// Monte Carlo Shapley values from random feature orders. Each sampling unit
// (an order, or an antithetic pair) draws from its own seeded stream, so the
// result does not depend on the thread count. Standard errors are reported
// when there are at least two units.
AttributionReport permutation_shapley(const ValueFunction& v, const PermutationOptions& options);

// Ordered partition of the features: every feature in an earlier group is a
// causal ancestor of the features in later groups.
class CausalOrdering {
 public:
  explicit CausalOrdering(std::vector<std::vector<int>> groups);

  static CausalOrdering single_group(int num_features);
  // Groups separated by ';' (or '|'), members by ','. Members are feature
  // names from `names`, or indices.
  static CausalOrdering parse(std::string_view text, const std::vector<std::string>& names);

  const std::vector<std::vector<int>>& groups() const { return groups_; }
  // Throws InvalidArgument unless the groups partition {0..M-1}.
  void validate(int num_features) const;

 private:
  std::vector<std::vector<int>> groups_;
};

struct AsymmetricOptions {
  int cap = kDefaultEnumerationCap;
  int threads = 1;
  // Used when a group is larger than `cap`.
  PermutationOptions sampling;
};

// Shapley values averaged over only those feature orders in which each group
// entirely precedes the later groups. Exact while every group fits under the
// cap; otherwise sampled from consistent orders.
AttributionReport asymmetric_shapley(const ValueFunction& v, const CausalOrdering& ordering,
                                     const AsymmetricOptions& options = {});

// Which way the stratum feature Z relates to the rest.
enum class Direction {
  // others -> Z: Z is redundant and gets 0; the reference shift goes to a
  // designated cause feature.
  kStratumIsEffect,
  // Z -> others: the reference shift goes to Z itself.
  kStratumIsCause,
};

std::string_view direction_label(Direction d);

struct XiChoice {
  enum class Kind { kGlobalMean, kStratumMean, kRepresentative, kExplicit };
  Kind kind = Kind::kGlobalMean;
  // kStratumMean: the stratum to average over; empty means the instance's own.
  std::optional<double> stratum_label;
  std::optional<FeatureVector> representative;
  double value = 0.0;

  static XiChoice global_mean() { return {}; }
  static XiChoice own_stratum_mean() { return {Kind::kStratumMean, std::nullopt, std::nullopt, 0.0}; }
  static XiChoice stratum_mean(double label) { return {Kind::kStratumMean, label, std::nullopt, 0.0}; }
  static XiChoice representative_row(FeatureVector x) {
    return {Kind::kRepresentative, std::nullopt, std::move(x), 0.0};
  }
  static XiChoice explicit_value(double xi) { return {Kind::kExplicit, std::nullopt, std::nullopt, xi}; }
};

struct StratifiedConfig {
  StratumSpec stratum;
  Direction direction = Direction::kStratumIsCause;
  // Must equal stratum.feature under kStratumIsCause (-1 picks it); must name
  // another feature under kStratumIsEffect.
  int recipient = -1;
  XiChoice xi;
  // Applied to the in-stratum background. Default keeps up to 1000 rows.
  BackgroundOptions background{1000, 0};
  ExactOptions exact;
  // Warn when |phi0_stratum - xi| exceeds this multiple of the largest
  // in-stratum attribution.
  double xi_warning_factor = 3.0;
};

struct StratifiedResult {
  // Per-stratum attributions: phi0 is the stratum reference, the stratum
  // feature gets 0.
  AttributionReport stratum_report;
  // After moving phi0_stratum - xi onto the recipient; phi0 == xi.
  AttributionReport report;
  double xi = 0.0;
};

// Returns the recipient implied by (direction, recipient) or throws
// InvalidArgument for an invalid or ambiguous choice.
int resolve_recipient(Direction direction, int stratum_feature, int recipient, int num_features);

// Redistribution core. `stratum_game` is a full-width value function whose
// averaging is already restricted to the stratum; the stratum feature stays
// in every coalition. `xi` empty means xi = phi0_stratum.
StratifiedResult redistribute_stratum(const ValueFunction& stratum_game, int stratum_feature,
                                      Direction direction, int recipient,
                                      std::optional<double> xi, const ExactOptions& options = {},
                                      double xi_warning_factor = 3.0);

// Empirical xi for a choice. Empty for an own-stratum mean.
std::optional<double> resolve_xi(const XiChoice& choice, const Model& model, const Dataset& data,
                                 const StratumSpec& stratum, const BackgroundOptions& background);

// Marginal Shapley values inside the instance's stratum, then the reference
// redistribution. Efficiency holds: xi + sum(phi) == f(instance).
StratifiedResult stratified_explain(std::shared_ptr<const Model> model, const FeatureVector& instance,
                                    const Dataset& data, const StratifiedConfig& config);

struct ComparisonRow {
  std::size_t instance = 0;
  std::size_t feature = 0;
  double phi_a = 0.0;
  double phi_b = 0.0;
  double difference = 0.0;  // phi_a - phi_b
};

// Least-squares line phi_b = intercept + slope * phi_a over instances. NaN
// when phi_a has no spread.
struct FeatureFit {
  std::string feature;
  std::size_t count = 0;
  double slope = 0.0;
  double intercept = 0.0;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::vector<FeatureFit> fits;
};

// Pairs report a[i] with b[i]. Throws InvalidArgument on mismatched or empty input.
Comparison compare_reports(std::span<const AttributionReport> a,
                           std::span<const AttributionReport> b);

}  // namespace stratshap
