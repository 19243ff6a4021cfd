#include "stratshap/synth.h"

#include <algorithm>
#include <cmath>

#include "stratshap/rng.h"

namespace stratshap::synth {
namespace {

Tree stump(int feature, double threshold, double left, double right) {
  Tree t;
  t.nodes = {TreeNode{feature, threshold, 1, 2, 0.0}, TreeNode{-1, 0.0, -1, -1, left},
             TreeNode{-1, 0.0, -1, -1, right}};
  return t;
}

constexpr int kAge = 0;
constexpr int kBonusMalus = 1;

}  // namespace

Dataset sample_age_bm(std::size_t rows_per_age, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(kMaxAge - kMinAge + 1) * rows_per_age * 5);
  for (int age = kMinAge; age <= kMaxAge; ++age) {
    for (std::size_t i = 0; i < rows_per_age; ++i) {
      // Young drivers sit near the 100 entry level; the score decays toward
      // 50 with years of claim-free driving.
      const double level = 50.0 + 60.0 * std::exp(-(age - kMinAge) / 8.0);
      const double bm = std::clamp(std::round(level + 12.0 * std::abs(rng.normal())), 50.0, 230.0);
      values.insert(values.end(), {static_cast<double>(age), bm, rng.normal(), rng.normal(), rng.normal()});
    }
  }
  return Dataset({"age", "bm", "z1", "z2", "z3"}, std::move(values),
                 {ColumnKind::kCategorical, ColumnKind::kContinuous, ColumnKind::kContinuous,
                  ColumnKind::kContinuous, ColumnKind::kContinuous});
}

Model age_bm_model() {
  TreeEnsemble m;
  m.base_score = -2.0;
  m.num_features = 5;
  for (auto [threshold, left, right] :
       {std::tuple{20.5, 0.25, 0.0}, std::tuple{25.5, 0.15, 0.0}, std::tuple{30.5, 0.05, 0.0},
        std::tuple{60.5, 0.0, 0.1}, std::tuple{70.5, 0.0, 0.1}}) {
    m.trees.push_back(stump(kAge, threshold, left, right));
  }
  for (double threshold : {52.0, 60.0, 70.0, 85.0, 100.0, 120.0}) {
    Tree t;
    t.nodes = {TreeNode{kBonusMalus, threshold, 1, 2, 0.0}, TreeNode{-1, 0.0, -1, -1, 0.0},
               TreeNode{kAge, 35.5, 3, 4, 0.0}, TreeNode{-1, 0.0, -1, -1, 0.04},
               TreeNode{-1, 0.0, -1, -1, 0.12}};
    m.trees.push_back(std::move(t));
  }
  const double slopes[3] = {0.3, -0.2, 0.15};
  for (int k = 0; k < 3; ++k) {
    for (double threshold : {-1.5, -0.75, 0.0, 0.75, 1.5}) {
      m.trees.push_back(stump(2 + k, threshold, 0.0, 0.75 * slopes[k]));
    }
  }
  return Model(std::move(m), {"age", "bm", "z1", "z2", "z3"});
}

}  // namespace stratshap::synth
