#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stratshap {

// Largest feature count a coalition bitset can hold.
inline constexpr int kMaxFeatures = 64;

// Default cap on the feature count for exhaustive coalition enumeration.
// 2^20 coalitions is about 10^6 value evaluations per explanation.
inline constexpr int kDefaultEnumerationCap = 20;

// A subset of the feature indices {0..M-1}, stored as a fixed-width bitset.
class Coalition {
 public:
  Coalition() = default;
  Coalition(std::uint64_t bits, int num_features);

  static Coalition empty(int num_features) { return Coalition(0, num_features); }
  static Coalition full(int num_features);
  static Coalition from_members(std::span<const int> members, int num_features);

  std::uint64_t bits() const { return bits_; }
  int num_features() const { return num_features_; }
  int size() const { return std::popcount(bits_); }
  bool contains(int j) const { return (bits_ >> j) & 1u; }

  Coalition with(int j) const;
  Coalition without(int j) const;
  std::vector<int> members() const;

  // "{0,2}" style rendering, used in diagnostics.
  std::string to_string() const;

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  std::uint64_t bits_ = 0;
  int num_features_ = 0;
};

// All 2^(M-1) coalitions of {0..M-1} that do not contain `excluding`, in
// increasing bitset order. Throws CapExceeded when M > cap.
std::vector<Coalition> enumerate_subsets(int num_features, int excluding,
                                         int cap = kDefaultEnumerationCap);

// |S|!(M-|S|-1)!/M!, evaluated as 1/(M * C(M-1, s)) so it never forms a factorial.
double shapley_weight(int coalition_size, int num_features);

}  // namespace stratshap
