#include "stratshap/models.h"

#include <cmath>
#include <fstream>
#include <sstream>

namespace stratshap {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double v, const std::string& path) {
  if (!std::isfinite(v)) throw ModelFormatError(path, "value is not finite");
}

void validate_spline(const SplineParams& p) {
  require_finite(p.beta0, "beta0");
  require_finite(p.beta1, "beta1");
  require_finite(p.beta12, "beta12");
}

void validate_tree(const Tree& tree, int num_features, const std::string& path) {
  const int n = static_cast<int>(tree.nodes.size());
  if (n == 0) throw ModelFormatError(path + ".nodes", "tree has no nodes");
  // Every node must be reached exactly once from the root: no cycles, no
  // shared children, no orphans.
  std::vector<int> seen(n, 0);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const std::string node_path = path + ".nodes[" + std::to_string(i) + "]";
    if (seen[i]++) throw ModelFormatError(node_path, "node reached twice (cycle or shared child)");
    const TreeNode& node = tree.nodes[i];
    if (node.is_leaf()) {
      require_finite(node.leaf_value, node_path + ".leaf");
      continue;
    }
    if (node.feature >= num_features) {
      throw ModelFormatError(node_path + ".feature",
                             "feature index " + std::to_string(node.feature) +
                                 " >= num_features " + std::to_string(num_features));
    }
    require_finite(node.threshold, node_path + ".threshold");
    for (auto [child, name] : {std::pair{node.left, ".left"}, std::pair{node.right, ".right"}}) {
      if (child <= 0 || child >= n) {
        throw ModelFormatError(node_path + name, "child index " + std::to_string(child) +
                                                     " outside [1, " + std::to_string(n) + ")");
      }
      stack.push_back(child);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw ModelFormatError(path + ".nodes[" + std::to_string(i) + "]",
                             "node is not reachable from the root");
    }
  }
}

int declared_features(const Model::Variant& v) {
  return std::visit(Overloaded{
                        [](const LinearModel& m) { return static_cast<int>(m.coefficients.size()); },
                        [](const SplineLinearModel&) { return 2; },
                        [](const SplineConstantModel&) { return 2; },
                        [](const TreeEnsemble& m) { return m.num_features; },
                    },
                    v);
}

}  // namespace

double predict_tree(const Tree& tree, std::span<const double> x) {
  int i = 0;
  while (!tree.nodes[i].is_leaf()) {
    const TreeNode& node = tree.nodes[i];
    i = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return tree.nodes[i].leaf_value;
}

Model::Model(Variant v, std::vector<std::string> feature_names)
    : model_(std::move(v)), feature_names_(std::move(feature_names)) {
  std::visit(Overloaded{
                 [](const LinearModel& m) {
                   require_finite(m.intercept, "intercept");
                   for (std::size_t j = 0; j < m.coefficients.size(); ++j) {
                     require_finite(m.coefficients[j], "coefficients[" + std::to_string(j) + "]");
                   }
                 },
                 [](const SplineLinearModel& m) { validate_spline(m.params); },
                 [](const SplineConstantModel& m) { validate_spline(m.params); },
                 [](const TreeEnsemble& m) {
                   require_finite(m.base_score, "base_score");
                   if (m.num_features < 0 || m.num_features > kMaxFeatures) {
                     throw ModelFormatError("num_features", "must lie in [0, 64]");
                   }
                   for (std::size_t t = 0; t < m.trees.size(); ++t) {
                     validate_tree(m.trees[t], m.num_features, "trees[" + std::to_string(t) + "]");
                   }
                 },
             },
             model_);
  num_features_ = declared_features(model_);
  if (num_features_ > kMaxFeatures) throw ModelFormatError("coefficients", "more than 64 features");
  if (feature_names_.empty()) {
    if (std::holds_alternative<SplineLinearModel>(model_) ||
        std::holds_alternative<SplineConstantModel>(model_)) {
      feature_names_ = {"x1", "x2"};
    } else {
      feature_names_ = default_feature_names(num_features_);
    }
  }
  if (static_cast<int>(feature_names_.size()) != num_features_) {
    throw ModelFormatError("feature_names", "expected " + std::to_string(num_features_) +
                                                " names, got " +
                                                std::to_string(feature_names_.size()));
  }
}

std::string_view Model::kind() const {
  return std::visit(Overloaded{
                        [](const LinearModel&) { return std::string_view("linear"); },
                        [](const SplineLinearModel&) { return std::string_view("spline_linear"); },
                        [](const SplineConstantModel&) { return std::string_view("spline_constant"); },
                        [](const TreeEnsemble&) { return std::string_view("tree_ensemble"); },
                    },
                    model_);
}

double Model::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != num_features_) {
    throw InvalidInput("model expects " + std::to_string(num_features_) + " features, got " +
                       std::to_string(x.size()));
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j])) throw InvalidInput("feature " + feature_names_[j] + " is not finite");
  }
  return predict_unchecked(x);
}

double Model::predict_unchecked(std::span<const double> x) const {
  return std::visit(
      Overloaded{
          [&](const LinearModel& m) {
            double y = m.intercept;
            for (std::size_t j = 0; j < m.coefficients.size(); ++j) y += m.coefficients[j] * x[j];
            return y;
          },
          [&](const SplineLinearModel& m) {
            const auto& p = m.params;
            return p.beta0 + p.beta1 * x[0] + p.beta12 * x[0] * x[1];
          },
          [&](const SplineConstantModel& m) {
            const auto& p = m.params;
            if (x[1] > 0.5) return p.beta0 + (x[0] > 0.0 ? (p.beta1 + p.beta12) * x[0] : 0.0);
            return p.beta0 + (x[0] <= 0.0 ? p.beta1 * x[0] : 0.0);
          },
          [&](const TreeEnsemble& m) {
            double y = m.base_score;
            for (const Tree& t : m.trees) y += predict_tree(t, x);
            return y;
          },
      },
      model_);
}

std::vector<double> Model::predict_batch(const Dataset& rows) const {
  std::vector<double> out;
  if (rows.num_rows() == 0) return out;
  if (static_cast<int>(rows.num_features()) != num_features_) {
    throw InvalidInput("model expects " + std::to_string(num_features_) + " columns, got " +
                       std::to_string(rows.num_features()));
  }
  out.reserve(rows.num_rows());
  // Dataset values are finite by construction.
  for (std::size_t i = 0; i < rows.num_rows(); ++i) out.push_back(predict_unchecked(rows.row(i)));
  return out;
}

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* name, const std::string& path) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ModelFormatError(path + name, "missing required field");
  return *it;
}

double number_field(const json& obj, const char* name, const std::string& path) {
  const json& v = field(obj, name, path);
  if (!v.is_number()) throw ModelFormatError(path + name, "expected a number");
  return v.get<double>();
}

int index_field(const json& obj, const char* name, const std::string& path) {
  const json& v = field(obj, name, path);
  if (!v.is_number_integer()) throw ModelFormatError(path + name, "expected an integer");
  return v.get<int>();
}

SplineParams spline_from_json(const json& doc) {
  return {number_field(doc, "beta0", ""), number_field(doc, "beta1", ""),
          number_field(doc, "beta12", "")};
}

Tree tree_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw ModelFormatError(path, "expected an object");
  const json& nodes = field(doc, "nodes", path + ".");
  if (!nodes.is_array()) throw ModelFormatError(path + ".nodes", "expected an array");
  Tree tree;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string node_path = path + ".nodes[" + std::to_string(i) + "].";
    const json& n = nodes[i];
    if (!n.is_object()) throw ModelFormatError(node_path.substr(0, node_path.size() - 1), "expected an object");
    TreeNode node;
    if (n.contains("leaf")) {
      node.leaf_value = number_field(n, "leaf", node_path);
    } else {
      node.feature = index_field(n, "feature", node_path);
      if (node.feature < 0) throw ModelFormatError(node_path + "feature", "negative feature index");
      node.threshold = number_field(n, "threshold", node_path);
      node.left = index_field(n, "left", node_path);
      node.right = index_field(n, "right", node_path);
    }
    tree.nodes.push_back(node);
  }
  return tree;
}

}  // namespace

Model model_from_json(const json& doc) {
  if (!doc.is_object()) throw ModelFormatError("$", "model document must be a JSON object");
  const json& kind_field = field(doc, "kind", "");
  if (!kind_field.is_string()) throw ModelFormatError("kind", "expected a string");
  const std::string kind = kind_field.get<std::string>();

  std::vector<std::string> names;
  if (auto it = doc.find("feature_names"); it != doc.end()) {
    if (!it->is_array()) throw ModelFormatError("feature_names", "expected an array");
    for (std::size_t j = 0; j < it->size(); ++j) {
      if (!(*it)[j].is_string()) {
        throw ModelFormatError("feature_names[" + std::to_string(j) + "]", "expected a string");
      }
      names.push_back((*it)[j].get<std::string>());
    }
  }

  if (kind == "linear") {
    LinearModel m;
    m.intercept = number_field(doc, "intercept", "");
    const json& coefs = field(doc, "coefficients", "");
    if (!coefs.is_array()) throw ModelFormatError("coefficients", "expected an array");
    for (std::size_t j = 0; j < coefs.size(); ++j) {
      if (!coefs[j].is_number()) {
        throw ModelFormatError("coefficients[" + std::to_string(j) + "]", "expected a number");
      }
      m.coefficients.push_back(coefs[j].get<double>());
    }
    return Model(std::move(m), std::move(names));
  }
  if (kind == "spline_linear") return Model(SplineLinearModel{spline_from_json(doc)}, std::move(names));
  if (kind == "spline_constant") {
    return Model(SplineConstantModel{spline_from_json(doc)}, std::move(names));
  }
  if (kind == "tree_ensemble") {
    TreeEnsemble m;
    m.base_score = number_field(doc, "base_score", "");
    const json& trees = field(doc, "trees", "");
    if (!trees.is_array()) throw ModelFormatError("trees", "expected an array");
    for (std::size_t t = 0; t < trees.size(); ++t) {
      m.trees.push_back(tree_from_json(trees[t], "trees[" + std::to_string(t) + "]"));
    }
    if (doc.contains("num_features")) {
      m.num_features = index_field(doc, "num_features", "");
    } else if (!names.empty()) {
      m.num_features = static_cast<int>(names.size());
    } else {
      int max_feature = -1;
      for (const Tree& t : m.trees) {
        for (const TreeNode& n : t.nodes) max_feature = std::max(max_feature, n.feature);
      }
      m.num_features = max_feature + 1;
    }
    return Model(std::move(m), std::move(names));
  }
  throw ModelFormatError("kind", "unknown model kind '" + kind + "'");
}

json model_to_json(const Model& model) {
  json doc;
  doc["kind"] = std::string(model.kind());
  std::visit(Overloaded{
                 [&](const LinearModel& m) {
                   doc["intercept"] = m.intercept;
                   doc["coefficients"] = m.coefficients;
                 },
                 [&](const SplineLinearModel& m) {
                   doc["beta0"] = m.params.beta0;
                   doc["beta1"] = m.params.beta1;
                   doc["beta12"] = m.params.beta12;
                 },
                 [&](const SplineConstantModel& m) {
                   doc["beta0"] = m.params.beta0;
                   doc["beta1"] = m.params.beta1;
                   doc["beta12"] = m.params.beta12;
                 },
                 [&](const TreeEnsemble& m) {
                   doc["base_score"] = m.base_score;
                   doc["num_features"] = m.num_features;
                   json trees = json::array();
                   for (const Tree& t : m.trees) {
                     json nodes = json::array();
                     for (const TreeNode& n : t.nodes) {
                       if (n.is_leaf()) {
                         nodes.push_back({{"leaf", n.leaf_value}});
                       } else {
                         nodes.push_back({{"feature", n.feature},
                                          {"threshold", n.threshold},
                                          {"left", n.left},
                                          {"right", n.right}});
                       }
                     }
                     trees.push_back({{"nodes", std::move(nodes)}});
                   }
                   doc["trees"] = std::move(trees);
                 },
             },
             model.variant());
  doc["feature_names"] = model.feature_names();
  return doc;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelFormatError("$", std::string("invalid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw IoError("failed writing model file " + path.string());
}

}  // namespace stratshap
