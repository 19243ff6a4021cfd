#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stratshap/coalition.h"
#include "stratshap/errors.h"

namespace stratshap {

// One observation: M finite feature values and their names.
class FeatureVector {
 public:
  FeatureVector() = default;
  FeatureVector(std::vector<double> values, std::vector<std::string> names);
  // Names default to x0..x{M-1}.
  explicit FeatureVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  const std::vector<std::string>& names() const { return names_; }
  double operator[](std::size_t j) const { return values_[j]; }

 private:
  std::vector<double> values_;
  std::vector<std::string> names_;
};

enum class ColumnKind { kContinuous, kCategorical };

// Row-major numeric table. Immutable once built.
class Dataset {
 public:
  Dataset() = default;
  // `values` holds rows back to back; its size must be a multiple of names.size().
  Dataset(std::vector<std::string> names, std::vector<double> values,
          std::vector<ColumnKind> kinds = {});

  std::size_t num_rows() const { return num_features() == 0 ? 0 : values_.size() / num_features(); }
  std::size_t num_features() const { return names_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * num_features(), num_features()};
  }
  double at(std::size_t i, std::size_t j) const { return values_[i * num_features() + j]; }
  FeatureVector feature_vector(std::size_t i) const;

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ColumnKind>& kinds() const { return kinds_; }
  ColumnKind kind(std::size_t j) const { return kinds_[j]; }
  std::optional<std::size_t> column_index(std::string_view name) const;

  Dataset select_rows(std::span<const std::size_t> rows) const;
  // Columns in the given order; kinds follow their columns.
  Dataset select_columns(std::span<const std::size_t> columns) const;
  Dataset with_kinds(std::vector<ColumnKind> kinds) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::vector<ColumnKind> kinds_;
};

enum class Method { kExactMarginal, kExactConditional, kPermutation, kAsymmetric, kStratified };

std::string_view method_label(Method m);
Method parse_method_label(std::string_view label);

// phi0 plus one attribution per feature. `prediction` is the payoff of the
// full coalition, so efficiency_residual = prediction - phi0 - sum(phi).
struct AttributionReport {
  Method method = Method::kExactMarginal;
  double phi0 = 0.0;
  std::vector<double> phi;
  double prediction = 0.0;
  double efficiency_residual = 0.0;
  std::optional<std::vector<double>> std_error;
  std::optional<double> phi0_std_error;
  std::vector<std::string> feature_names;
  std::vector<std::string> warnings;
  // v(S) indexed by coalition bitset; filled only when a trace was requested.
  std::vector<double> coalition_values;

  std::size_t num_features() const { return phi.size(); }
  void update_residual();
};

std::vector<std::string> default_feature_names(std::size_t m);

}  // namespace stratshap
