#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "stratshap/core.h"
#include "stratshap/models.h"

namespace stratshap {

enum class ValueKind { kMarginal, kConditional, kOther };

// The payoff v(S) of every coalition for one fixed instance. Implementations
// are read-only after construction and safe to evaluate concurrently.
class ValueFunction {
 public:
  virtual ~ValueFunction() = default;

  virtual int num_features() const = 0;
  virtual double value(const Coalition& s) const = 0;
  virtual ValueKind kind() const { return ValueKind::kOther; }

  // Providers that average a payoff over N samples expose the per-sample
  // payoffs so the engine can report standard errors. sample_count() == 0
  // means no such view.
  virtual std::size_t sample_count() const { return 0; }
  // table[mask] = payoff of coalition `mask` for sample i, all 2^M masks.
  virtual void sample_table(std::size_t i, std::span<double> table) const;
};

// v given as an explicit table indexed by coalition bitset.
class TableValueFunction : public ValueFunction {
 public:
  TableValueFunction(int num_features, std::vector<double> table,
                     ValueKind kind = ValueKind::kOther);

  int num_features() const override { return num_features_; }
  double value(const Coalition& s) const override { return table_[s.bits()]; }
  ValueKind kind() const override { return kind_; }
  const std::vector<double>& table() const { return table_; }

 private:
  int num_features_;
  std::vector<double> table_;
  ValueKind kind_;
};

class LambdaValueFunction : public ValueFunction {
 public:
  LambdaValueFunction(int num_features, std::function<double(const Coalition&)> fn,
                      ValueKind kind = ValueKind::kOther)
      : num_features_(num_features), fn_(std::move(fn)), kind_(kind) {}

  int num_features() const override { return num_features_; }
  double value(const Coalition& s) const override { return fn_(s); }
  ValueKind kind() const override { return kind_; }

 private:
  int num_features_;
  std::function<double(const Coalition&)> fn_;
  ValueKind kind_;
};

struct BackgroundOptions {
  // Rows kept from the background; 0 keeps all of them. The subsample is
  // drawn once, at construction, and shared by every coalition.
  std::size_t subsample = 0;
  std::uint64_t seed = 0;
};

// `n` rows drawn without replacement, kept in their original order.
Dataset subsample_rows(const Dataset& data, std::size_t n, std::uint64_t seed);

// Interventional value: v(S) = mean over background rows b of
// f(x*_S, b_notS).
class MarginalProvider : public ValueFunction {
 public:
  MarginalProvider(std::shared_ptr<const Model> model, FeatureVector instance,
                   std::shared_ptr<const Dataset> background, BackgroundOptions options = {});

  int num_features() const override { return model_->num_features(); }
  double value(const Coalition& s) const override;
  ValueKind kind() const override { return ValueKind::kMarginal; }
  std::size_t sample_count() const override { return background_->num_rows(); }
  void sample_table(std::size_t i, std::span<double> table) const override;

  const Dataset& background() const { return *background_; }
  const FeatureVector& instance() const { return instance_; }

 private:
  std::shared_ptr<const Model> model_;
  FeatureVector instance_;
  std::shared_ptr<const Dataset> background_;
};

struct MatchRule {
  enum class Kind { kExact, kTolerance, kQuantileBins };
  Kind kind = Kind::kExact;
  double tolerance = 0.0;
  int bins = 20;

  static MatchRule exact() { return {Kind::kExact, 0.0, 0}; }
  static MatchRule within(double tol) { return {Kind::kTolerance, tol, 0}; }
  static MatchRule quantile_bins(int bins) { return {Kind::kQuantileBins, 0.0, bins}; }
};

// Exact matching for categorical columns, 20 quantile bins otherwise.
std::vector<MatchRule> default_match_rules(const Dataset& background);

// Observational value: v(S) = mean of f(x*_S, b_notS) over the background rows
// b whose in-coalition features match x*_S. v(empty) is the plain background
// mean and v(full) is f(x*).
class ConditionalProvider : public ValueFunction {
 public:
  ConditionalProvider(std::shared_ptr<const Model> model, FeatureVector instance,
                      std::shared_ptr<const Dataset> background,
                      std::vector<MatchRule> rules = {});

  int num_features() const override { return model_->num_features(); }
  // Throws EmptyConditioningSet when no row matches.
  double value(const Coalition& s) const override;
  ValueKind kind() const override { return ValueKind::kConditional; }

  // Rows whose in-coalition features match the instance.
  std::size_t match_count(const Coalition& s) const;

 private:
  bool matches(std::size_t row, std::span<const int> members) const;

  std::shared_ptr<const Model> model_;
  FeatureVector instance_;
  std::shared_ptr<const Dataset> background_;
  std::vector<MatchRule> rules_;
  // Row-major bin ids for binned columns, and the instance's bin per column.
  std::vector<int> row_bins_;
  std::vector<int> instance_bins_;
  double empty_value_ = 0.0;
};

// Maps a feature value to a stratum label. The default key is the raw value.
struct StratumSpec {
  int feature = 0;
  std::function<double(double)> key;

  double label_of(double value) const { return key ? key(value) : value; }
};

// Key that buckets values into [k*width, (k+1)*width).
std::function<double(double)> bucket_key(double width);

// Rows of `data` in the instance's stratum, in their original order. Throws
// EmptyStratum when there are none.
Dataset stratified_background(const Dataset& data, const StratumSpec& spec,
                              const FeatureVector& instance);
Dataset stratum_rows(const Dataset& data, const StratumSpec& spec, double label);

}  // namespace stratshap
