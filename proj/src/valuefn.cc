#include "stratshap/valuefn.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stratshap/rng.h"
#include "summation.h"

namespace stratshap {
namespace {

using internal::CompensatedSum;

void check_shapes(const Model& model, const FeatureVector& instance, const Dataset& background) {
  const auto m = static_cast<std::size_t>(model.num_features());
  if (instance.size() != m) {
    throw InvalidInput("instance has " + std::to_string(instance.size()) +
                       " features, model expects " + std::to_string(m));
  }
  if (background.num_rows() == 0) throw EmptyBackground("background data has no rows");
  if (background.num_features() != m) {
    throw InvalidInput("background has " + std::to_string(background.num_features()) +
                       " columns, model expects " + std::to_string(m));
  }
}

void check_coalition(const Coalition& s, int m) {
  if (s.num_features() != m) {
    throw InvalidArgument("coalition over " + std::to_string(s.num_features()) +
                          " features used with a " + std::to_string(m) + "-feature game");
  }
}

}  // namespace

void ValueFunction::sample_table(std::size_t, std::span<double>) const {
  throw InvalidArgument("value function has no per-sample view");
}

TableValueFunction::TableValueFunction(int num_features, std::vector<double> table, ValueKind kind)
    : num_features_(num_features), table_(std::move(table)), kind_(kind) {
  if (num_features < 0 || num_features >= kMaxFeatures ||
      table_.size() != (std::size_t{1} << num_features)) {
    throw InvalidArgument("value table must hold 2^M entries");
  }
}

Dataset subsample_rows(const Dataset& data, std::size_t n, std::uint64_t seed) {
  if (n == 0 || n >= data.num_rows()) return data;
  std::vector<std::size_t> idx(data.num_rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: the first n slots end up a uniform sample.
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i + static_cast<std::size_t>(rng.uniform_index(idx.size() - i));
    std::swap(idx[i], idx[k]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return data.select_rows(idx);
}

MarginalProvider::MarginalProvider(std::shared_ptr<const Model> model, FeatureVector instance,
                                   std::shared_ptr<const Dataset> background,
                                   BackgroundOptions options)
    : model_(std::move(model)), instance_(std::move(instance)), background_(std::move(background)) {
  check_shapes(*model_, instance_, *background_);
  if (options.subsample != 0 && options.subsample < background_->num_rows()) {
    background_ = std::make_shared<const Dataset>(
        subsample_rows(*background_, options.subsample, options.seed));
  }
}

double MarginalProvider::value(const Coalition& s) const {
  const int m = num_features();
  check_coalition(s, m);
  if (s == Coalition::full(m)) return model_->predict_unchecked(instance_.values());

  std::vector<double> hybrid(m);
  const auto x = instance_.values();
  const auto in = s.members();
  // Deviations from the first payoff are averaged, so a coalition whose
  // payoff is the same on every row returns that payoff exactly. This keeps
  // v(S u {j}) == v(S) bit for bit when j is a dummy, including S u {j} = full.
  CompensatedSum sum;
  double first = 0.0;
  for (std::size_t i = 0; i < background_->num_rows(); ++i) {
    auto row = background_->row(i);
    std::copy(row.begin(), row.end(), hybrid.begin());
    for (int j : in) hybrid[j] = x[j];
    const double payoff = model_->predict_unchecked(hybrid);
    if (i == 0) first = payoff;
    sum.add(payoff - first);
  }
  return first + sum.total() / static_cast<double>(background_->num_rows());
}

void MarginalProvider::sample_table(std::size_t i, std::span<double> table) const {
  const int m = num_features();
  const std::size_t count = std::size_t{1} << m;
  if (table.size() != count) throw InvalidArgument("sample table must hold 2^M entries");
  const auto row = background_->row(i);
  const auto x = instance_.values();
  std::vector<double> hybrid(m);
  for (std::size_t mask = 0; mask < count; ++mask) {
    for (int j = 0; j < m; ++j) hybrid[j] = (mask >> j) & 1u ? x[j] : row[j];
    table[mask] = model_->predict_unchecked(hybrid);
  }
}

std::vector<MatchRule> default_match_rules(const Dataset& background) {
  std::vector<MatchRule> rules;
  for (std::size_t j = 0; j < background.num_features(); ++j) {
    rules.push_back(background.kind(j) == ColumnKind::kCategorical ? MatchRule::exact()
                                                                   : MatchRule::quantile_bins(20));
  }
  return rules;
}

ConditionalProvider::ConditionalProvider(std::shared_ptr<const Model> model, FeatureVector instance,
                                         std::shared_ptr<const Dataset> background,
                                         std::vector<MatchRule> rules)
    : model_(std::move(model)),
      instance_(std::move(instance)),
      background_(std::move(background)),
      rules_(std::move(rules)) {
  check_shapes(*model_, instance_, *background_);
  const std::size_t m = background_->num_features();
  const std::size_t n = background_->num_rows();
  if (rules_.empty()) rules_ = default_match_rules(*background_);
  if (rules_.size() != m) throw InvalidArgument("need one match rule per feature");

  row_bins_.assign(n * m, 0);
  instance_bins_.assign(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const MatchRule& rule = rules_[j];
    if (rule.kind == MatchRule::Kind::kTolerance && !(rule.tolerance >= 0.0)) {
      throw InvalidArgument("match tolerance must be non-negative");
    }
    if (rule.kind != MatchRule::Kind::kQuantileBins) continue;
    if (rule.bins < 1) throw InvalidArgument("quantile bin count must be positive");
    std::vector<double> column(n);
    for (std::size_t i = 0; i < n; ++i) column[i] = background_->at(i, j);
    std::sort(column.begin(), column.end());
    std::vector<double> edges;
    for (int k = 1; k < rule.bins; ++k) {
      edges.push_back(column[static_cast<std::size_t>(k) * n / rule.bins]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    auto bin_of = [&edges](double v) {
      return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    };
    for (std::size_t i = 0; i < n; ++i) row_bins_[i * m + j] = bin_of(background_->at(i, j));
    instance_bins_[j] = bin_of(instance_[j]);
  }

  CompensatedSum sum;
  for (std::size_t i = 0; i < n; ++i) sum.add(model_->predict_unchecked(background_->row(i)));
  empty_value_ = sum.total() / static_cast<double>(n);
}

bool ConditionalProvider::matches(std::size_t row, std::span<const int> members) const {
  const std::size_t m = background_->num_features();
  for (int j : members) {
    const double b = background_->at(row, j);
    switch (rules_[j].kind) {
      case MatchRule::Kind::kExact:
        if (b != instance_[j]) return false;
        break;
      case MatchRule::Kind::kTolerance:
        if (std::abs(b - instance_[j]) > rules_[j].tolerance) return false;
        break;
      case MatchRule::Kind::kQuantileBins:
        if (row_bins_[row * m + j] != instance_bins_[j]) return false;
        break;
    }
  }
  return true;
}

std::size_t ConditionalProvider::match_count(const Coalition& s) const {
  check_coalition(s, num_features());
  const auto in = s.members();
  std::size_t count = 0;
  for (std::size_t i = 0; i < background_->num_rows(); ++i) count += matches(i, in);
  return count;
}

double ConditionalProvider::value(const Coalition& s) const {
  const int m = num_features();
  check_coalition(s, m);
  if (s.size() == 0) return empty_value_;
  if (s == Coalition::full(m)) return model_->predict_unchecked(instance_.values());

  std::vector<double> hybrid(m);
  const auto x = instance_.values();
  const auto in = s.members();
  CompensatedSum sum;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < background_->num_rows(); ++i) {
    if (!matches(i, in)) continue;
    auto row = background_->row(i);
    std::copy(row.begin(), row.end(), hybrid.begin());
    for (int j : in) hybrid[j] = x[j];
    sum.add(model_->predict_unchecked(hybrid));
    ++matched;
  }
  if (matched == 0) throw EmptyConditioningSet(s);
  return sum.total() / static_cast<double>(matched);
}

std::function<double(double)> bucket_key(double width) {
  if (!(width > 0.0)) throw InvalidArgument("stratum bucket width must be positive");
  return [width](double v) { return std::floor(v / width) * width; };
}

Dataset stratum_rows(const Dataset& data, const StratumSpec& spec, double label) {
  if (spec.feature < 0 || static_cast<std::size_t>(spec.feature) >= data.num_features()) {
    throw InvalidArgument("stratum feature " + std::to_string(spec.feature) + " out of range");
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    if (spec.label_of(data.at(i, spec.feature)) == label) rows.push_back(i);
  }
  if (rows.empty()) throw EmptyStratum(label);
  return data.select_rows(rows);
}

Dataset stratified_background(const Dataset& data, const StratumSpec& spec,
                              const FeatureVector& instance) {
  if (instance.size() != data.num_features()) {
    throw InvalidInput("instance width does not match the data");
  }
  if (spec.feature < 0 || static_cast<std::size_t>(spec.feature) >= data.num_features()) {
    throw InvalidArgument("stratum feature " + std::to_string(spec.feature) + " out of range");
  }
  return stratum_rows(data, spec, spec.label_of(instance[spec.feature]));
}

}  // namespace stratshap
