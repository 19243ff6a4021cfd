#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond the public types, and favour the most literal
// reading of each definition over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "stratshap/core.h"
#include "stratshap/models.h"
#include "stratshap/valuefn.h"

namespace stratshap::testing {

// gamma computed from its definition rather than from the library constant.
inline double gamma_ref() { return std::sqrt(1.0 / (2.0 * std::acos(-1.0))); }

// Shapley values by listing all M! orders and averaging marginal
// contributions. `keep(order)` filters the orders that count.
inline std::vector<double> brute_force_over_orders(
    const std::function<double(std::uint64_t)>& v, int m,
    const std::function<bool(const std::vector<int>&)>& keep = nullptr) {
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<long double> total(m, 0.0L);
  long double kept = 0.0L;
  do {
    if (keep && !keep(order)) continue;
    std::uint64_t mask = 0;
    for (int j : order) {
      const double before = v(mask);
      mask |= std::uint64_t{1} << j;
      total[j] += static_cast<long double>(v(mask)) - before;
    }
    kept += 1.0L;
  } while (std::next_permutation(order.begin(), order.end()));
  std::vector<double> phi(m);
  for (int j = 0; j < m; ++j) phi[j] = static_cast<double>(total[j] / kept);
  return phi;
}

inline std::vector<double> brute_force_shapley(const std::vector<double>& table, int m) {
  return brute_force_over_orders([&](std::uint64_t s) { return table[s]; }, m);
}

// Orders in which every member of an earlier group precedes every member of a
// later group.
inline std::vector<double> brute_force_asymmetric(const std::vector<double>& table, int m,
                                                  const std::vector<std::vector<int>>& groups) {
  std::vector<int> group_of(m);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int j : groups[g]) group_of[j] = static_cast<int>(g);
  }
  auto consistent = [&](const std::vector<int>& order) {
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (group_of[order[i - 1]] > group_of[order[i]]) return false;
    }
    return true;
  };
  return brute_force_over_orders([&](std::uint64_t s) { return table[s]; }, m, consistent);
}

inline std::vector<double> random_table(int m, std::uint64_t seed, double scale = 5.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> t(std::size_t{1} << m);
  for (double& x : t) x = u(gen);
  return t;
}

// v(S) for the interventional game, by a plain double loop.
inline double naive_marginal_value(const Model& model, std::span<const double> x, const Dataset& bg,
                                   std::uint64_t mask) {
  long double sum = 0.0L;
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < bg.num_rows(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (mask >> j) & 1 ? x[j] : bg.at(i, j);
    sum += model.predict(z);
  }
  return static_cast<double>(sum / static_cast<long double>(bg.num_rows()));
}

// Tree walk written independently of the library's routing code.
inline double naive_tree_predict(const TreeEnsemble& e, std::span<const double> x) {
  double y = e.base_score;
  for (const Tree& t : e.trees) {
    const TreeNode* n = &t.nodes[0];
    while (n->feature >= 0) n = &t.nodes[x[n->feature] <= n->threshold ? n->left : n->right];
    y += n->leaf_value;
  }
  return y;
}

// A random full-depth tree ensemble over `m` features.
inline TreeEnsemble random_ensemble(int m, int trees, int depth, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> feature(0, m - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  TreeEnsemble e;
  e.base_score = normal(gen);
  e.num_features = m;
  for (int t = 0; t < trees; ++t) {
    Tree tree;
    // Heap layout: node k has children 2k+1 and 2k+2.
    const int internal = (1 << depth) - 1;
    const int total = (1 << (depth + 1)) - 1;
    for (int k = 0; k < total; ++k) {
      TreeNode n;
      if (k < internal) {
        n.feature = feature(gen);
        n.threshold = 0.8 * normal(gen);
        n.left = 2 * k + 1;
        n.right = 2 * k + 2;
      } else {
        n.leaf_value = normal(gen);
      }
      tree.nodes.push_back(n);
    }
    e.trees.push_back(std::move(tree));
  }
  return e;
}

inline Dataset random_gaussian_data(int m, std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(rows * m);
  for (double& v : values) v = normal(gen);
  return Dataset(default_feature_names(m), std::move(values));
}

// Ordinary least squares y = a + b x in the textbook closed form.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

inline double mean_of(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline double std_error_of_mean(const std::vector<double>& v) {
  const double m = mean_of(v);
  long double ss = 0.0L;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(static_cast<double>(ss / static_cast<long double>(v.size() - 1)) /
                   static_cast<double>(v.size()));
}

// A fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("stratshap_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace stratshap::testing
