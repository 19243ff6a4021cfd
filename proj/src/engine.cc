#include "stratshap/engine.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "stratshap/parallel.h"
#include "stratshap/rng.h"
#include "summation.h"

namespace stratshap {
namespace {

using internal::CompensatedSum;

double evaluate(const ValueFunction& v, const Coalition& s) {
  try {
    return v.value(s);
  } catch (Error& e) {
    e.attach_coalition(s);
    throw;
  }
}

Method exact_method(const ValueFunction& v) {
  return v.kind() == ValueKind::kConditional ? Method::kExactConditional : Method::kExactMarginal;
}

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> std_error;
};

// Mean and standard error of the mean for each column, in row order.
ColumnStats column_stats(const std::vector<std::vector<double>>& rows, std::size_t width) {
  ColumnStats out{std::vector<double>(width, 0.0), std::vector<double>(width, 0.0)};
  const std::size_t n = rows.size();
  if (n == 0) return out;
  for (std::size_t c = 0; c < width; ++c) {
    CompensatedSum sum;
    for (const auto& r : rows) sum.add(r[c]);
    const double mean = sum.total() / static_cast<double>(n);
    CompensatedSum sq;
    for (const auto& r : rows) sq.add((r[c] - mean) * (r[c] - mean));
    out.mean[c] = mean;
    out.std_error[c] =
        n > 1 ? std::sqrt(sq.total() / static_cast<double>(n - 1) / static_cast<double>(n))
              : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

// Players are every feature of `inner` except `fixed`, which sits in every
// coalition.
class FixedFeatureGame : public ValueFunction {
 public:
  FixedFeatureGame(const ValueFunction& inner, int fixed) : inner_(inner), fixed_(fixed) {}

  int num_features() const override { return inner_.num_features() - 1; }
  ValueKind kind() const override { return inner_.kind(); }
  double value(const Coalition& s) const override {
    return inner_.value(Coalition(expand(s.bits()), inner_.num_features()));
  }
  std::size_t sample_count() const override { return inner_.sample_count(); }
  void sample_table(std::size_t i, std::span<double> table) const override {
    std::vector<double> full(std::size_t{1} << inner_.num_features());
    inner_.sample_table(i, full);
    for (std::size_t mask = 0; mask < table.size(); ++mask) table[mask] = full[expand(mask)];
  }

  std::uint64_t expand(std::uint64_t mask) const {
    const std::uint64_t low = (std::uint64_t{1} << fixed_) - 1;
    return (mask & low) | ((mask & ~low) << 1) | (std::uint64_t{1} << fixed_);
  }

 private:
  const ValueFunction& inner_;
  int fixed_;
};

// Random feature orders in which each group keeps its place and only the
// members inside a group are shuffled. A single group gives plain
// permutations.
AttributionReport sample_ordered_permutations(const ValueFunction& v,
                                              const std::vector<std::vector<int>>& groups,
                                              const PermutationOptions& options, Method method) {
  if (options.permutations < 1) throw InvalidArgument("permutation count must be at least 1");
  const int m = v.num_features();
  const bool paired = options.antithetic && options.permutations % 2 == 0;
  const std::size_t units =
      paired ? static_cast<std::size_t>(options.permutations / 2) : options.permutations;

  const double v_empty = evaluate(v, Coalition::empty(m));
  const double v_full = evaluate(v, Coalition::full(m));

  auto walk = [&](const std::vector<int>& order, std::vector<double>& contrib) {
    std::uint64_t bits = 0;
    double prev = v_empty;
    for (std::size_t k = 0; k < order.size(); ++k) {
      bits |= std::uint64_t{1} << order[k];
      const double cur = k + 1 == order.size() ? v_full : evaluate(v, Coalition(bits, m));
      contrib[order[k]] += cur - prev;
      prev = cur;
    }
  };

  std::vector<std::vector<double>> unit_values(units);
  parallel_for(units, options.threads, [&](std::size_t u) {
    Rng rng(derive_seed(options.seed, u));
    std::vector<int> order;
    order.reserve(m);
    for (const auto& g : groups) {
      const std::size_t start = order.size();
      order.insert(order.end(), g.begin(), g.end());
      rng.shuffle(std::span<int>(order).subspan(start));
    }
    std::vector<double> contrib(m, 0.0);
    walk(order, contrib);
    if (paired) {
      std::size_t start = 0;
      for (const auto& g : groups) {
        std::reverse(order.begin() + start, order.begin() + start + g.size());
        start += g.size();
      }
      std::vector<double> mirrored(m, 0.0);
      walk(order, mirrored);
      for (int j = 0; j < m; ++j) contrib[j] = 0.5 * (contrib[j] + mirrored[j]);
    }
    unit_values[u] = std::move(contrib);
  });

  ColumnStats stats = column_stats(unit_values, m);
  AttributionReport report;
  report.method = method;
  report.phi0 = v_empty;
  report.phi = std::move(stats.mean);
  report.prediction = v_full;
  if (units >= 2) report.std_error = std::move(stats.std_error);
  report.update_residual();
  return report;
}

}  // namespace

std::vector<double> coalition_values(const ValueFunction& v, int cap, int threads) {
  const int m = v.num_features();
  if (m > cap) {
    throw CapExceeded("exact enumeration over " + std::to_string(m) +
                      " features exceeds the cap of " + std::to_string(cap) +
                      "; use the permutation estimator");
  }
  if (m < 0 || m >= kMaxFeatures) throw InvalidArgument("unsupported feature count");
  std::vector<double> table(std::size_t{1} << m);
  parallel_for(table.size(), threads,
               [&](std::size_t mask) { table[mask] = evaluate(v, Coalition(mask, m)); });
  return table;
}

std::vector<double> shapley_from_table(std::span<const double> table, int num_features) {
  const int m = num_features;
  if (m < 0 || m >= kMaxFeatures || table.size() != (std::size_t{1} << m)) {
    throw InvalidArgument("value table must hold 2^M entries");
  }
  std::vector<double> weight(m);
  for (int s = 0; s < m; ++s) weight[s] = shapley_weight(s, m);
  std::vector<double> phi(m, 0.0);
  for (int j = 0; j < m; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    CompensatedSum sum;
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
      if (mask & bit) continue;
      sum.add(weight[std::popcount(mask)] * (table[mask | bit] - table[mask]));
    }
    phi[j] = sum.total();
  }
  return phi;
}

std::vector<std::vector<double>> per_sample_attributions(const ValueFunction& v, int cap,
                                                         int threads) {
  const int m = v.num_features();
  if (m > cap) throw CapExceeded("exact enumeration over " + std::to_string(m) + " features exceeds the cap");
  const std::size_t n = v.sample_count();
  if (n == 0) throw InvalidArgument("value function has no per-sample view");
  std::vector<std::vector<double>> rows(n);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> table(std::size_t{1} << m);
    v.sample_table(i, table);
    std::vector<double> phi = shapley_from_table(table, m);
    std::vector<double> row;
    row.reserve(m + 1);
    row.push_back(table[0]);
    row.insert(row.end(), phi.begin(), phi.end());
    rows[i] = std::move(row);
  });
  return rows;
}

AttributionReport exact_shapley(const ValueFunction& v, const ExactOptions& options) {
  const int m = v.num_features();
  std::vector<double> table = coalition_values(v, options.cap, options.threads);
  AttributionReport report;
  report.method = exact_method(v);
  report.phi0 = table.front();
  report.phi = shapley_from_table(table, m);
  report.prediction = table.back();
  report.update_residual();
  if (options.sampling_error && v.sample_count() >= 2) {
    ColumnStats stats = column_stats(per_sample_attributions(v, options.cap, options.threads), m + 1);
    report.phi0_std_error = stats.std_error[0];
    report.std_error = std::vector<double>(stats.std_error.begin() + 1, stats.std_error.end());
  }
  if (options.keep_trace) report.coalition_values = std::move(table);
  return report;
}

AttributionReport two_feature_shapley(double v_empty, double v_1, double v_2, double v_12) {
  AttributionReport report;
  report.phi0 = v_empty;
  report.phi = {0.5 * (v_12 - v_2) + 0.5 * (v_1 - v_empty),
                0.5 * (v_12 - v_1) + 0.5 * (v_2 - v_empty)};
  report.prediction = v_12;
  report.update_residual();
  return report;
}

AttributionReport permutation_shapley(const ValueFunction& v, const PermutationOptions& options) {
  std::vector<int> all(v.num_features());
  std::iota(all.begin(), all.end(), 0);
  return sample_ordered_permutations(v, {all}, options, Method::kPermutation);
}

CausalOrdering::CausalOrdering(std::vector<std::vector<int>> groups) : groups_(std::move(groups)) {
  if (groups_.empty()) throw InvalidArgument("causal ordering needs at least one group");
  for (const auto& g : groups_) {
    if (g.empty()) throw InvalidArgument("causal ordering has an empty group");
  }
}

CausalOrdering CausalOrdering::single_group(int num_features) {
  std::vector<int> all(num_features);
  std::iota(all.begin(), all.end(), 0);
  return CausalOrdering({all});
}

CausalOrdering CausalOrdering::parse(std::string_view text, const std::vector<std::string>& names) {
  std::vector<std::vector<int>> groups(1);
  std::string token;
  auto flush = [&] {
    const auto first = token.find_first_not_of(' ');
    if (first == std::string::npos) {
      token.clear();
      return;
    }
    token = token.substr(first, token.find_last_not_of(' ') - first + 1);
    auto it = std::find(names.begin(), names.end(), token);
    if (it != names.end()) {
      groups.back().push_back(static_cast<int>(it - names.begin()));
    } else {
      int index = -1;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), index);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw InvalidArgument("unknown feature '" + token + "' in causal ordering");
      }
      groups.back().push_back(index);
    }
    token.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else if (c == ';' || c == '|') {
      flush();
      groups.emplace_back();
    } else {
      token += c;
    }
  }
  flush();
  return CausalOrdering(std::move(groups));
}

void CausalOrdering::validate(int num_features) const {
  std::vector<int> seen(num_features, 0);
  for (const auto& g : groups_) {
    for (int j : g) {
      if (j < 0 || j >= num_features) {
        throw InvalidArgument("causal ordering names feature " + std::to_string(j) +
                              " outside {0.." + std::to_string(num_features - 1) + "}");
      }
      if (seen[j]++) throw InvalidArgument("feature " + std::to_string(j) + " appears twice in causal ordering");
    }
  }
  for (int j = 0; j < num_features; ++j) {
    if (!seen[j]) throw InvalidArgument("causal ordering omits feature " + std::to_string(j));
  }
}

AttributionReport asymmetric_shapley(const ValueFunction& v, const CausalOrdering& ordering,
                                     const AsymmetricOptions& options) {
  const int m = v.num_features();
  ordering.validate(m);
  const auto& groups = ordering.groups();
  std::size_t largest = 0;
  for (const auto& g : groups) largest = std::max(largest, g.size());
  if (static_cast<int>(largest) > options.cap) {
    return sample_ordered_permutations(v, groups, options.sampling, Method::kAsymmetric);
  }

  // A feature in group g always follows every earlier group, and within g it
  // sees a Shapley-weighted random subset of its group mates. So each group
  // is an ordinary Shapley game on top of its predecessors.
  AttributionReport report;
  report.method = Method::kAsymmetric;
  report.phi.assign(m, 0.0);
  std::uint64_t predecessors = 0;
  report.phi0 = evaluate(v, Coalition::empty(m));
  report.prediction = report.phi0;
  for (const auto& g : groups) {
    const int k = static_cast<int>(g.size());
    std::vector<double> table(std::size_t{1} << k);
    parallel_for(table.size(), options.threads, [&](std::size_t local) {
      std::uint64_t bits = predecessors;
      for (int i = 0; i < k; ++i) {
        if ((local >> i) & 1u) bits |= std::uint64_t{1} << g[i];
      }
      table[local] = evaluate(v, Coalition(bits, m));
    });
    const std::vector<double> local_phi = shapley_from_table(table, k);
    for (int i = 0; i < k; ++i) report.phi[g[i]] = local_phi[i];
    for (int j : g) predecessors |= std::uint64_t{1} << j;
    report.prediction = table.back();
  }
  report.update_residual();
  return report;
}

std::string_view direction_label(Direction d) {
  return d == Direction::kStratumIsEffect ? "effect" : "cause";
}

int resolve_recipient(Direction direction, int stratum_feature, int recipient, int num_features) {
  if (stratum_feature < 0 || stratum_feature >= num_features) {
    throw InvalidArgument("stratum feature " + std::to_string(stratum_feature) + " out of range");
  }
  if (direction == Direction::kStratumIsCause) {
    if (recipient != -1 && recipient != stratum_feature) {
      throw InvalidArgument(
          "when the stratum feature is the cause, the reference shift goes to the stratum feature "
          "itself");
    }
    return stratum_feature;
  }
  if (recipient == -1) {
    throw InvalidArgument("when the stratum feature is the effect, exactly one recipient feature is required");
  }
  if (recipient == stratum_feature) {
    throw InvalidArgument("when the stratum feature is the effect, the recipient must be another feature");
  }
  if (recipient < 0 || recipient >= num_features) {
    throw InvalidArgument("recipient feature " + std::to_string(recipient) + " out of range");
  }
  return recipient;
}

StratifiedResult redistribute_stratum(const ValueFunction& stratum_game, int stratum_feature,
                                      Direction direction, int recipient,
                                      std::optional<double> xi, const ExactOptions& options,
                                      double xi_warning_factor) {
  const int m = stratum_game.num_features();
  recipient = resolve_recipient(direction, stratum_feature, recipient, m);
  const FixedFeatureGame game(stratum_game, stratum_feature);

  ExactOptions inner = options;
  inner.sampling_error = false;
  const AttributionReport sub = exact_shapley(game, inner);
  auto full_index = [&](int sub_index) { return sub_index < stratum_feature ? sub_index : sub_index + 1; };

  StratifiedResult result;
  AttributionReport& stratum = result.stratum_report;
  stratum.method = Method::kStratified;
  stratum.phi0 = sub.phi0;
  stratum.phi.assign(m, 0.0);
  for (int i = 0; i < m - 1; ++i) stratum.phi[full_index(i)] = sub.phi[i];
  stratum.prediction = sub.prediction;
  if (!sub.coalition_values.empty()) {
    stratum.coalition_values.assign(std::size_t{1} << m, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t mask = 0; mask < sub.coalition_values.size(); ++mask) {
      stratum.coalition_values[game.expand(mask)] = sub.coalition_values[mask];
    }
  }
  stratum.update_residual();

  result.xi = xi.value_or(sub.phi0);
  const double shift = sub.phi0 - result.xi;

  AttributionReport& report = result.report;
  report = stratum;
  report.phi0 = result.xi;
  report.phi[recipient] += shift;
  report.update_residual();

  if (options.sampling_error && game.sample_count() >= 2) {
    auto samples = per_sample_attributions(game, options.cap, options.threads);
    ColumnStats stats = column_stats(samples, m);
    std::vector<double> se(m, 0.0);
    for (int i = 0; i < m - 1; ++i) se[full_index(i)] = stats.std_error[i + 1];
    stratum.std_error = se;
    stratum.phi0_std_error = stats.std_error[0];
    // The shifted recipient is phi_r + phi0 per sample (phi0 alone for the
    // stratum feature), with xi held fixed.
    const int sub_recipient =
        recipient == stratum_feature ? -1 : (recipient < stratum_feature ? recipient : recipient - 1);
    std::vector<std::vector<double>> shifted(samples.size(), std::vector<double>(1));
    for (std::size_t s = 0; s < samples.size(); ++s) {
      shifted[s][0] = samples[s][0] + (sub_recipient >= 0 ? samples[s][sub_recipient + 1] : 0.0);
    }
    if (xi) {
      se[recipient] = column_stats(shifted, 1).std_error[0];
      report.phi0_std_error = 0.0;
    } else {
      // xi tracks the stratum mean, so nothing moves.
      report.phi0_std_error = stratum.phi0_std_error;
    }
    report.std_error = se;
  }

  double spread = 0.0;
  for (double p : sub.phi) spread = std::max(spread, std::abs(p));
  if (std::abs(shift) > xi_warning_factor * spread) {
    report.warnings.push_back("reference shift " + std::to_string(shift) + " exceeds " +
                              std::to_string(xi_warning_factor) +
                              "x the largest in-stratum attribution (" + std::to_string(spread) +
                              "); xi may distort the recipient's attribution");
  }
  return result;
}

std::optional<double> resolve_xi(const XiChoice& choice, const Model& model, const Dataset& data,
                                 const StratumSpec& stratum, const BackgroundOptions& background) {
  auto mean_prediction = [&](const Dataset& rows) {
    if (rows.num_rows() == 0) throw EmptyBackground("no rows to average for xi");
    CompensatedSum sum;
    for (double y : model.predict_batch(rows)) sum.add(y);
    return sum.total() / static_cast<double>(rows.num_rows());
  };
  switch (choice.kind) {
    case XiChoice::Kind::kGlobalMean:
      return mean_prediction(data);
    case XiChoice::Kind::kStratumMean:
      if (!choice.stratum_label) return std::nullopt;
      return mean_prediction(subsample_rows(stratum_rows(data, stratum, *choice.stratum_label),
                                            background.subsample, background.seed));
    case XiChoice::Kind::kRepresentative:
      if (!choice.representative) throw InvalidArgument("representative xi needs an observation");
      return model.predict(*choice.representative);
    case XiChoice::Kind::kExplicit:
      if (!std::isfinite(choice.value)) throw InvalidArgument("explicit xi must be finite");
      return choice.value;
  }
  return std::nullopt;
}

StratifiedResult stratified_explain(std::shared_ptr<const Model> model, const FeatureVector& instance,
                                    const Dataset& data, const StratifiedConfig& config) {
  const int m = model->num_features();
  if (static_cast<int>(instance.size()) != m || static_cast<int>(data.num_features()) != m) {
    throw InvalidInput("instance and data must have the model's " + std::to_string(m) + " features");
  }
  const int recipient = resolve_recipient(config.direction, config.stratum.feature, config.recipient, m);
  auto background = std::make_shared<const Dataset>(
      subsample_rows(stratified_background(data, config.stratum, instance),
                     config.background.subsample, config.background.seed));
  const MarginalProvider provider(model, instance, background);
  const std::optional<double> xi =
      resolve_xi(config.xi, *model, data, config.stratum, config.background);
  StratifiedResult result = redistribute_stratum(provider, config.stratum.feature, config.direction,
                                                 recipient, xi, config.exact,
                                                 config.xi_warning_factor);
  result.stratum_report.feature_names = model->feature_names();
  result.report.feature_names = model->feature_names();
  return result;
}

Comparison compare_reports(std::span<const AttributionReport> a, std::span<const AttributionReport> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("nothing to compare: empty report set");
  if (a.size() != b.size()) {
    throw InvalidArgument("report sets differ in size: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  const std::size_t m = a.front().num_features();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].num_features() != m || b[i].num_features() != m) {
      throw InvalidArgument("report " + std::to_string(i) + " has a different feature count");
    }
    if (!a[i].feature_names.empty() && !b[i].feature_names.empty() &&
        a[i].feature_names != b[i].feature_names) {
      throw InvalidArgument("report " + std::to_string(i) + " has different feature names");
    }
  }
  std::vector<std::string> names = a.front().feature_names;
  if (names.empty()) names = default_feature_names(m);

  Comparison out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out.rows.push_back({i, j, a[i].phi[j], b[i].phi[j], a[i].phi[j] - b[i].phi[j]});
    }
  }
  const double n = static_cast<double>(a.size());
  for (std::size_t j = 0; j < m; ++j) {
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < a.size(); ++i) {
      sx.add(a[i].phi[j]);
      sy.add(b[i].phi[j]);
    }
    const double mx = sx.total() / n;
    const double my = sy.total() / n;
    CompensatedSum sxx, sxy;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double dx = a[i].phi[j] - mx;
      sxx.add(dx * dx);
      sxy.add(dx * (b[i].phi[j] - my));
    }
    FeatureFit fit{names[j], a.size(), std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN()};
    if (a.size() >= 2 && sxx.total() > 0.0) {
      fit.slope = sxy.total() / sxx.total();
      fit.intercept = my - fit.slope * mx;
    }
    out.fits.push_back(std::move(fit));
  }
  return out;
}

}  // namespace stratshap
