#include "stratshap/core.h"

#include <charconv>
#include <cmath>
#include <numeric>

namespace stratshap {

std::string EmptyStratum::format_label(double label) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), label);
  return std::string(buf, end);
}

Coalition::Coalition(std::uint64_t bits, int num_features) : bits_(bits), num_features_(num_features) {
  if (num_features < 0 || num_features > kMaxFeatures) {
    throw InvalidArgument("coalition feature count " + std::to_string(num_features) +
                          " outside [0, 64]");
  }
  if (num_features < kMaxFeatures && (bits >> num_features) != 0) {
    throw InvalidArgument("coalition has members outside {0.." + std::to_string(num_features - 1) +
                          "}");
  }
}

Coalition Coalition::full(int num_features) {
  std::uint64_t bits = num_features >= kMaxFeatures ? ~std::uint64_t{0}
                                                    : (std::uint64_t{1} << num_features) - 1;
  return Coalition(bits, num_features);
}

Coalition Coalition::from_members(std::span<const int> members, int num_features) {
  std::uint64_t bits = 0;
  for (int j : members) {
    if (j < 0 || j >= num_features) {
      throw InvalidArgument("feature index " + std::to_string(j) + " outside {0.." +
                            std::to_string(num_features - 1) + "}");
    }
    bits |= std::uint64_t{1} << j;
  }
  return Coalition(bits, num_features);
}

Coalition Coalition::with(int j) const {
  if (j < 0 || j >= num_features_) throw InvalidArgument("feature index out of range");
  return Coalition(bits_ | (std::uint64_t{1} << j), num_features_);
}

Coalition Coalition::without(int j) const {
  if (j < 0 || j >= num_features_) throw InvalidArgument("feature index out of range");
  return Coalition(bits_ & ~(std::uint64_t{1} << j), num_features_);
}

std::vector<int> Coalition::members() const {
  std::vector<int> out;
  out.reserve(size());
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

std::string Coalition::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int j : members()) {
    if (!first) out += ',';
    out += std::to_string(j);
    first = false;
  }
  return out + "}";
}

std::vector<Coalition> enumerate_subsets(int num_features, int excluding, int cap) {
  if (num_features > cap) {
    throw CapExceeded("exact enumeration over " + std::to_string(num_features) +
                      " features exceeds the cap of " + std::to_string(cap) +
                      "; use the permutation estimator");
  }
  if (num_features < 1 || excluding < 0 || excluding >= num_features) {
    throw InvalidArgument("enumerate_subsets requires 0 <= excluding < M");
  }
  // Spread the 2^(M-1) counters over every bit except `excluding`.
  const std::uint64_t low_mask = (std::uint64_t{1} << excluding) - 1;
  const std::uint64_t count = std::uint64_t{1} << (num_features - 1);
  std::vector<Coalition> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    std::uint64_t bits = (k & low_mask) | ((k & ~low_mask) << 1);
    out.emplace_back(bits, num_features);
  }
  return out;
}

double shapley_weight(int coalition_size, int num_features) {
  if (num_features < 1 || coalition_size < 0 || coalition_size >= num_features) {
    throw InvalidArgument("shapley_weight requires 0 <= s < M, got s=" +
                          std::to_string(coalition_size) + ", M=" + std::to_string(num_features));
  }
  const int n = num_features - 1;
  const int k = std::min(coalition_size, n - coalition_size);
  double binom = 1.0;
  for (int i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
  return 1.0 / (num_features * binom);
}

FeatureVector::FeatureVector(std::vector<double> values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
  if (values_.size() != names_.size()) {
    throw InvalidInput("feature vector has " + std::to_string(values_.size()) + " values but " +
                       std::to_string(names_.size()) + " names");
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j])) {
      throw InvalidInput("feature '" + names_[j] + "' is not finite");
    }
  }
}

FeatureVector::FeatureVector(std::vector<double> values)
    : FeatureVector(values, default_feature_names(values.size())) {}

Dataset::Dataset(std::vector<std::string> names, std::vector<double> values,
                 std::vector<ColumnKind> kinds)
    : names_(std::move(names)), values_(std::move(values)), kinds_(std::move(kinds)) {
  if (names_.empty() && !values_.empty()) throw InvalidInput("dataset has values but no columns");
  if (!names_.empty() && values_.size() % names_.size() != 0) {
    throw InvalidInput("dataset value count is not a multiple of the column count");
  }
  if (kinds_.empty()) kinds_.assign(names_.size(), ColumnKind::kContinuous);
  if (kinds_.size() != names_.size()) throw InvalidInput("dataset column kinds do not match columns");
  for (std::size_t a = 0; a < names_.size(); ++a) {
    for (std::size_t b = a + 1; b < names_.size(); ++b) {
      if (names_[a] == names_[b]) throw InvalidInput("duplicate dataset column '" + names_[a] + "'");
    }
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw InvalidInput("dataset row " + std::to_string(k / names_.size()) + ", column '" +
                         names_[k % names_.size()] + "' is not finite");
    }
  }
}

FeatureVector Dataset::feature_vector(std::size_t i) const {
  auto r = row(i);
  return FeatureVector(std::vector<double>(r.begin(), r.end()), names_);
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return j;
  }
  return std::nullopt;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<double> out;
  out.reserve(rows.size() * num_features());
  for (std::size_t i : rows) {
    if (i >= num_rows()) throw InvalidArgument("row index out of range");
    auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return Dataset(names_, std::move(out), kinds_);
}

Dataset Dataset::select_columns(std::span<const std::size_t> columns) const {
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;
  for (std::size_t j : columns) {
    if (j >= num_features()) throw InvalidArgument("column index out of range");
    names.push_back(names_[j]);
    kinds.push_back(kinds_[j]);
  }
  std::vector<double> out;
  out.reserve(num_rows() * columns.size());
  for (std::size_t i = 0; i < num_rows(); ++i) {
    for (std::size_t j : columns) out.push_back(at(i, j));
  }
  return Dataset(std::move(names), std::move(out), std::move(kinds));
}

Dataset Dataset::with_kinds(std::vector<ColumnKind> kinds) const {
  return Dataset(names_, values_, std::move(kinds));
}

std::string_view method_label(Method m) {
  switch (m) {
    case Method::kExactMarginal: return "exact-marginal";
    case Method::kExactConditional: return "exact-conditional";
    case Method::kPermutation: return "permutation";
    case Method::kAsymmetric: return "asymmetric";
    case Method::kStratified: return "stratified";
  }
  return "unknown";
}

Method parse_method_label(std::string_view label) {
  for (Method m : {Method::kExactMarginal, Method::kExactConditional, Method::kPermutation,
                   Method::kAsymmetric, Method::kStratified}) {
    if (method_label(m) == label) return m;
  }
  throw InvalidInput("unknown method label '" + std::string(label) + "'");
}

void AttributionReport::update_residual() {
  // Fixed left-to-right order keeps the residual reproducible.
  double total = phi0;
  for (double p : phi) total += p;
  efficiency_residual = prediction - total;
}

std::vector<std::string> default_feature_names(std::size_t m) {
  std::vector<std::string> names(m);
  for (std::size_t j = 0; j < m; ++j) names[j] = "x" + std::to_string(j);
  return names;
}

}  // namespace stratshap
