#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stratshap/core.h"

namespace stratshap {

struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coefficients;
};

// f(x1, x2) = beta0 + beta1*x1 + beta12*x1*x2 with x2 = I(x1 > 0) on the data.
struct SplineParams {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double beta12 = 0.0;
};

// Evaluates the spline formula everywhere, so off-manifold points are
// extrapolated linearly.
struct SplineLinearModel {
  SplineParams params;
};

// The same spline as a tree that splits on x2 first: off-manifold points get
// the value at the x1 = 0 edge of their x2 branch (constant extrapolation).
// x2 > 0.5 selects the x2 = 1 branch.
struct SplineConstantModel {
  SplineParams params;
};

// Internal nodes route left iff x[feature] <= threshold. A leaf has feature == -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

// Node 0 is the root.
struct Tree {
  std::vector<TreeNode> nodes;
};

struct TreeEnsemble {
  double base_score = 0.0;
  std::vector<Tree> trees;
  int num_features = 0;
};

class Model {
 public:
  using Variant = std::variant<LinearModel, SplineLinearModel, SplineConstantModel, TreeEnsemble>;

  // Validates the parameters. Empty `feature_names` get defaults (x1, x2 for
  // splines, x0.. otherwise).
  explicit Model(Variant v, std::vector<std::string> feature_names = {});

  int num_features() const { return num_features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const Variant& variant() const { return model_; }
  std::string_view kind() const;

  // Throws InvalidInput on a length mismatch or a non-finite value.
  double predict(std::span<const double> x) const;
  double predict(const FeatureVector& x) const { return predict(x.values()); }
  // No validation: the caller guarantees M finite values.
  double predict_unchecked(std::span<const double> x) const;

  std::vector<double> predict_batch(const Dataset& rows) const;

 private:
  Variant model_;
  int num_features_ = 0;
  std::vector<std::string> feature_names_;
};

double predict_tree(const Tree& tree, std::span<const double> x);

// JSON model documents. The `kind` field selects the family:
//   {"kind":"linear","intercept":b,"coefficients":[...]}
//   {"kind":"spline_linear"|"spline_constant","beta0":..,"beta1":..,"beta12":..}
//   {"kind":"tree_ensemble","base_score":b,"num_features":M,
//    "trees":[{"nodes":[{"feature":j,"threshold":t,"left":l,"right":r} | {"leaf":v}]}]}
// Every kind accepts an optional "feature_names" array. Schema violations
// raise ModelFormatError naming the offending field path.
Model model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const Model& model);
Model load_model(const std::filesystem::path& path);
void save_model(const Model& model, const std::filesystem::path& path);

}  // namespace stratshap
