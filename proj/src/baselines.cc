#include "ocp/baselines.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include "ocp/error.h"
#include "ocp/rng.h"
#include "trees.h"

namespace ocp {

using nlohmann::json;

namespace {

constexpr std::string_view kKindNames[] = {
    "linear_svm", "logistic_regression", "knn", "random_forest",
    "gradient_boosted_trees"};

constexpr const char* kBaselineFormat = "ocp-baseline-v1";

bool binary_only(BaselineKind kind) {
  return kind == BaselineKind::kLinearSvm ||
         kind == BaselineKind::kLogisticRegression ||
         kind == BaselineKind::kGradientBoostedTrees;
}

double sparse_dot_dense(const SparseVector& x, const std::vector<double>& w) {
  double s = 0.0;
  for (size_t k = 0; k < x.indices.size(); ++k) s += x.values[k] * w[x.indices[k]];
  return s;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.indices.size() || j < b.indices.size()) {
    if (j == b.indices.size() || (i < a.indices.size() && a.indices[i] < b.indices[j])) {
      d += a.values[i] * a.values[i];
      ++i;
    } else if (i == a.indices.size() || b.indices[j] < a.indices[i]) {
      d += b.values[j] * b.values[j];
      ++j;
    } else {
      double diff = a.values[i] - b.values[j];
      d += diff * diff;
      ++i;
      ++j;
    }
  }
  return d;
}

// log(1 + exp(-m)) without overflow.
double log1p_exp_neg(double m) {
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Dual coordinate descent for the L1-loss (hinge) SVM with the bias folded
// in as a constant feature of value 1.
LinearParams train_svm(const std::vector<SparseVector>& x, const std::vector<double>& sign,
                       const std::vector<double>& upper, const BaselineHyperparams& hp,
                       size_t dim, bool& converged, int& iterations) {
  const size_t n = x.size();
  std::vector<double> w(dim, 0.0), alpha(n, 0.0), qdiag(n);
  double b = 0.0;
  for (size_t i = 0; i < n; ++i) qdiag[i] = x[i].squared_norm() + 1.0;
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(hp.seed);
  converged = false;
  iterations = 0;
  for (int iter = 0; iter < hp.max_iter; ++iter) {
    iterations = iter + 1;
    rng.shuffle(std::span<size_t>(order));
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (size_t i : order) {
      double g = sign[i] * (sparse_dot_dense(x[i], w) + b) - 1.0;
      double pg = 0.0;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == upper[i]) {
        pg = std::max(g, 0.0);
      } else {
        pg = g;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg == 0.0) continue;
      double old = alpha[i];
      alpha[i] = std::clamp(old - g / qdiag[i], 0.0, upper[i]);
      double delta = (alpha[i] - old) * sign[i];
      if (delta == 0.0) continue;
      const SparseVector& xi = x[i];
      for (size_t k = 0; k < xi.indices.size(); ++k) w[xi.indices[k]] += delta * xi.values[k];
      b += delta;
    }
    if (pg_max - pg_min <= hp.tol) {
      converged = true;
      break;
    }
  }
  return LinearParams{std::move(w), b};
}

// L2-regularised logistic regression by L-BFGS; the bias is not penalised.
LinearParams train_logistic(const std::vector<SparseVector>& x,
                            const std::vector<double>& sign,
                            const std::vector<double>& sample_weight,
                            const BaselineHyperparams& hp, size_t dim, bool& converged,
                            int& iterations) {
  const size_t n = x.size();
  const size_t p = dim + 1;  // last coordinate is the bias
  const double c = hp.lr_c;
  std::vector<double> margins(n);

  auto evaluate = [&](const std::vector<double>& theta, std::vector<double>& grad) {
    double f = 0.0;
    grad.assign(p, 0.0);
    for (size_t j = 0; j < dim; ++j) {
      f += 0.5 * theta[j] * theta[j];
      grad[j] = theta[j];
    }
    for (size_t i = 0; i < n; ++i) {
      double z = sparse_dot_dense(x[i], theta) + theta[dim];
      double m = sign[i] * z;
      f += c * sample_weight[i] * log1p_exp_neg(m);
      double coef = c * sample_weight[i] * (sigmoid(m) - 1.0) * sign[i];
      const SparseVector& xi = x[i];
      for (size_t k = 0; k < xi.indices.size(); ++k) grad[xi.indices[k]] += coef * xi.values[k];
      grad[dim] += coef;
    }
    return f;
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  const size_t history = 10;
  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;
  std::vector<double> theta(p, 0.0), grad, next(p), next_grad, dir(p);
  double f = evaluate(theta, grad);
  const double g0 = std::sqrt(dot(grad, grad));
  converged = false;
  iterations = 0;
  for (int iter = 0; iter < hp.max_iter; ++iter) {
    double gnorm = std::sqrt(dot(grad, grad));
    if (gnorm <= hp.tol * std::max(1.0, g0)) {
      converged = true;
      break;
    }
    iterations = iter + 1;
    // Two-loop recursion.
    dir = grad;
    std::vector<double> a(s_hist.size());
    for (size_t k = s_hist.size(); k-- > 0;) {
      a[k] = rho_hist[k] * dot(s_hist[k], dir);
      for (size_t j = 0; j < p; ++j) dir[j] -= a[k] * y_hist[k][j];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
    for (double& d : dir) d *= gamma;
    for (size_t k = 0; k < s_hist.size(); ++k) {
      double beta = rho_hist[k] * dot(y_hist[k], dir);
      for (size_t j = 0; j < p; ++j) dir[j] += (a[k] - beta) * s_hist[k][j];
    }
    for (double& d : dir) d = -d;
    double slope = dot(grad, dir);
    if (slope >= 0.0) {
      for (size_t j = 0; j < p; ++j) dir[j] = -grad[j];
      slope = -gnorm * gnorm;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
    double f_next = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (size_t j = 0; j < p; ++j) next[j] = theta[j] + step * dir[j];
      f_next = evaluate(next, next_grad);
      if (f_next <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    std::vector<double> s(p), y(p);
    for (size_t j = 0; j < p; ++j) {
      s[j] = next[j] - theta[j];
      y[j] = next_grad[j] - grad[j];
    }
    double sy = dot(s, y);
    if (sy > 1e-10) {
      if (s_hist.size() == history) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    theta.swap(next);
    grad.swap(next_grad);
    f = f_next;
  }
  if (!converged) {
    double gnorm = std::sqrt(dot(grad, grad));
    converged = gnorm <= hp.tol * std::max(1.0, g0);
  }
  double bias = theta[dim];
  theta.resize(dim);
  return LinearParams{std::move(theta), bias};
}

uint32_t knn_vote(const KnnParams& knn, const SparseVector& q, int k, size_t n_classes,
                  const std::vector<double>& class_vote) {
  std::vector<std::pair<double, uint32_t>> dist(knn.vectors.size());
  for (size_t i = 0; i < knn.vectors.size(); ++i) {
    dist[i] = {squared_distance(q, knn.vectors[i]), static_cast<uint32_t>(i)};
  }
  size_t kk = std::min<size_t>(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
  std::vector<double> votes(n_classes, 0.0);
  for (size_t i = 0; i < kk; ++i) {
    uint32_t c = knn.classes[dist[i].second];
    votes[c] += class_vote[c];
  }
  return static_cast<uint32_t>(argmax_first(votes));
}

void check_dimensions(const std::vector<SparseVector>& x, size_t dim) {
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].dimension != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "row " + std::to_string(i) + " has dimension " +
                      std::to_string(x[i].dimension) + ", expected " + std::to_string(dim));
    }
  }
}

std::vector<double> class_vote_weights(const BaselineModel& model) {
  std::vector<double> w(model.classes.size(), 1.0);
  if (model.class_weights) {
    for (size_t c = 0; c < model.classes.size(); ++c) w[c] = model.class_weights->at(model.classes[c]);
  }
  return w;
}

// ------------------------------------------------------------ json helpers

json sparse_to_json(const SparseVector& v) {
  return json{{"indices", v.indices}, {"values", v.values}};
}

SparseVector sparse_from_json(const json& j, size_t dim) {
  SparseVector v;
  v.dimension = dim;
  v.indices = j.at("indices").get<std::vector<uint32_t>>();
  v.values = j.at("values").get<std::vector<double>>();
  v.validate();
  return v;
}

json tree_to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const TreeNode& n : tree.nodes) {
    nodes.push_back(json{{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"default_left", n.default_left},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value}});
  }
  return json{{"absent_is_missing", tree.absent_is_missing}, {"nodes", nodes}};
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree tree;
  tree.absent_is_missing = j.at("absent_is_missing").get<bool>();
  for (const json& n : j.at("nodes")) {
    TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.default_left = n.at("default_left").get<bool>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.value = n.at("value").get<std::vector<double>>();
    tree.nodes.push_back(std::move(node));
  }
  int count = static_cast<int>(tree.nodes.size());
  for (const TreeNode& n : tree.nodes) {
    if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count)) {
      throw Error(ErrorCode::kSchemaVersionMismatch, "tree node has invalid children");
    }
  }
  if (tree.nodes.empty()) throw Error(ErrorCode::kSchemaVersionMismatch, "empty tree");
  return tree;
}

}  // namespace

std::string_view to_string(BaselineKind kind) {
  return kKindNames[static_cast<size_t>(kind)];
}

BaselineKind parse_baseline_kind(std::string_view name) {
  for (size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == name) return static_cast<BaselineKind>(i);
  }
  if (name == "svm") return BaselineKind::kLinearSvm;
  if (name == "lr") return BaselineKind::kLogisticRegression;
  if (name == "rf") return BaselineKind::kRandomForest;
  if (name == "gbt" || name == "xgboost") return BaselineKind::kGradientBoostedTrees;
  throw Error(ErrorCode::kInvalidArgument, "unknown baseline kind '" + std::string(name) + "'");
}

void BaselineSpec::validate() const {
  const BaselineHyperparams& h = hyperparams;
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (h.knn_k < 1) fail("knn requires k >= 1");
  if (!(h.svm_c > 0.0)) fail("svm_c must be positive");
  if (!(h.lr_c > 0.0)) fail("lr_c must be positive");
  if (h.rf_trees < 1) fail("rf_trees must be >= 1");
  if (h.rf_max_depth < 0) fail("rf_max_depth must be >= 0");
  if (h.gbt_rounds < 0) fail("gbt_rounds must be >= 0");
  if (h.gbt_max_depth < 1) fail("gbt_max_depth must be >= 1");
  if (!(h.gbt_learning_rate > 0.0)) fail("gbt_learning_rate must be positive");
  if (h.gbt_lambda < 0.0) fail("gbt_lambda must be >= 0");
  if (h.gbt_min_child_weight < 0.0) fail("gbt_min_child_weight must be >= 0");
  if (h.max_iter < 1) fail("max_iter must be >= 1");
  if (!(h.tol > 0.0)) fail("tol must be positive");
}

BaselineModel train_baseline(const BaselineSpec& spec, const std::vector<SparseVector>& x,
                             const std::vector<Label>& y, const ClassWeights* weights) {
  spec.validate();
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(x.size()) + " rows but " +
                                                std::to_string(y.size()) + " labels");
  }
  if (x.empty()) throw Error(ErrorCode::kEmptyDataset, "no training rows");
  const size_t dim = x[0].dimension;
  check_dimensions(x, dim);

  BaselineModel model;
  model.spec = spec;
  model.dimension = dim;
  {
    std::vector<Label> classes(y.begin(), y.end());
    std::sort(classes.begin(), classes.end(),
              [](Label a, Label b) { return to_string(a) < to_string(b); });
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    model.classes = std::move(classes);
  }
  if (model.classes.size() < 2) {
    throw Error(ErrorCode::kSingleClassData,
                "training labels contain only " + std::string(to_string(model.classes[0])));
  }
  if (binary_only(spec.kind) && model.classes.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(to_string(spec.kind)) + " supports binary tasks only");
  }
  if (weights) {
    model.class_weights = *weights;
  } else if (spec.class_weighting == ClassWeighting::kBalanced) {
    model.class_weights = balanced_weights_for(y);
  }

  std::vector<uint32_t> cls(y.size());
  std::vector<double> sample_weight(y.size(), 1.0);
  for (size_t i = 0; i < y.size(); ++i) {
    cls[i] = static_cast<uint32_t>(
        std::find(model.classes.begin(), model.classes.end(), y[i]) - model.classes.begin());
    if (model.class_weights) {
      auto it = model.class_weights->weights.find(y[i]);
      if (it == model.class_weights->weights.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "no class weight for " + std::string(to_string(y[i])));
      }
      sample_weight[i] = it->second;
    }
  }
  std::vector<double> sign(y.size());
  for (size_t i = 0; i < y.size(); ++i) sign[i] = cls[i] == 1 ? 1.0 : -1.0;

  const BaselineHyperparams& hp = spec.hyperparams;
  switch (spec.kind) {
    case BaselineKind::kLinearSvm: {
      std::vector<double> upper(y.size());
      for (size_t i = 0; i < y.size(); ++i) upper[i] = hp.svm_c * sample_weight[i];
      model.params = train_svm(x, sign, upper, hp, dim, model.converged, model.iterations);
      break;
    }
    case BaselineKind::kLogisticRegression:
      model.params = train_logistic(x, sign, sample_weight, hp, dim, model.converged,
                                    model.iterations);
      break;
    case BaselineKind::kKnn:
      model.params = KnnParams{x, cls};
      break;
    case BaselineKind::kRandomForest:
      model.params = internal::train_forest(x, cls, model.classes.size(), sample_weight, hp);
      break;
    case BaselineKind::kGradientBoostedTrees: {
      std::vector<double> targets(y.size());
      for (size_t i = 0; i < y.size(); ++i) targets[i] = cls[i] == 1 ? 1.0 : 0.0;
      model.params = internal::train_boosting(x, targets, sample_weight, hp);
      model.iterations = hp.gbt_rounds;
      break;
    }
  }
  if (!model.converged) {
    std::cerr << "warning: " << error_code_name(ErrorCode::kNonConvergence) << ": "
              << to_string(spec.kind) << " stopped after " << model.iterations
              << " iterations\n";
  }
  return model;
}

std::vector<Label> predict_baseline(const BaselineModel& model,
                                    const std::vector<SparseVector>& x) {
  check_dimensions(x, model.dimension);
  std::vector<Label> out;
  out.reserve(x.size());
  const size_t n_classes = model.classes.size();
  if (const auto* lin = std::get_if<LinearParams>(&model.params)) {
    for (const SparseVector& v : x) {
      double score = sparse_dot_dense(v, lin->weights) + lin->bias;
      out.push_back(model.classes[score > 0.0 ? 1 : 0]);
    }
  } else if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
    std::vector<double> votes = class_vote_weights(model);
    for (const SparseVector& v : x) {
      out.push_back(model.classes[knn_vote(*knn, v, model.spec.hyperparams.knn_k, n_classes, votes)]);
    }
  } else if (const auto* forest = std::get_if<ForestParams>(&model.params)) {
    for (const SparseVector& v : x) {
      std::vector<double> dist(n_classes, 0.0);
      for (const DecisionTree& t : forest->trees) {
        const std::vector<double>& leaf = t.leaf(v).value;
        for (size_t c = 0; c < n_classes; ++c) dist[c] += leaf[c];
      }
      out.push_back(model.classes[argmax_first(dist)]);
    }
  } else if (const auto* boost = std::get_if<BoostParams>(&model.params)) {
    for (const SparseVector& v : x) {
      double margin = boost->base_margin;
      for (const DecisionTree& t : boost->trees) margin += t.leaf(v).value[0];
      out.push_back(model.classes[margin > 0.0 ? 1 : 0]);
    }
  }
  return out;
}

json to_json(const BaselineSpec& spec) {
  const BaselineHyperparams& h = spec.hyperparams;
  return json{
      {"kind", to_string(spec.kind)},
      {"class_weighting", spec.class_weighting == ClassWeighting::kBalanced ? "balanced" : "none"},
      {"hyperparams",
       {{"svm_c", h.svm_c},
        {"lr_c", h.lr_c},
        {"knn_k", h.knn_k},
        {"rf_trees", h.rf_trees},
        {"rf_max_depth", h.rf_max_depth},
        {"gbt_rounds", h.gbt_rounds},
        {"gbt_max_depth", h.gbt_max_depth},
        {"gbt_learning_rate", h.gbt_learning_rate},
        {"gbt_lambda", h.gbt_lambda},
        {"gbt_min_child_weight", h.gbt_min_child_weight},
        {"max_iter", h.max_iter},
        {"tol", h.tol},
        {"seed", h.seed}}}};
}

BaselineSpec baseline_spec_from_json(const json& j) {
  BaselineSpec spec;
  try {
    spec.kind = parse_baseline_kind(j.at("kind").get<std::string>());
    if (j.contains("class_weighting")) {
      std::string cw = j.at("class_weighting").get<std::string>();
      if (cw == "balanced") {
        spec.class_weighting = ClassWeighting::kBalanced;
      } else if (cw == "none") {
        spec.class_weighting = ClassWeighting::kNone;
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown class_weighting '" + cw + "'");
      }
    }
    if (j.contains("hyperparams")) {
      const json& h = j.at("hyperparams");
      BaselineHyperparams& p = spec.hyperparams;
      auto get = [&](const char* key, auto& field) {
        if (h.contains(key)) field = h.at(key).get<std::decay_t<decltype(field)>>();
      };
      get("svm_c", p.svm_c);
      get("lr_c", p.lr_c);
      get("knn_k", p.knn_k);
      get("rf_trees", p.rf_trees);
      get("rf_max_depth", p.rf_max_depth);
      get("gbt_rounds", p.gbt_rounds);
      get("gbt_max_depth", p.gbt_max_depth);
      get("gbt_learning_rate", p.gbt_learning_rate);
      get("gbt_lambda", p.gbt_lambda);
      get("gbt_min_child_weight", p.gbt_min_child_weight);
      get("max_iter", p.max_iter);
      get("tol", p.tol);
      get("seed", p.seed);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad baseline spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

void save_baseline(const BaselineModel& model, const std::filesystem::path& path) {
  json j;
  j["format"] = kBaselineFormat;
  j["spec"] = to_json(model.spec);
  json classes = json::array();
  for (Label c : model.classes) classes.push_back(to_string(c));
  j["classes"] = classes;
  j["dimension"] = model.dimension;
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;
  if (model.class_weights) {
    json w = json::object();
    for (const auto& [label, value] : model.class_weights->weights) w[std::string(to_string(label))] = value;
    j["class_weights"] = w;
  }
  json params;
  if (const auto* lin = std::get_if<LinearParams>(&model.params)) {
    params = {{"type", "linear"}, {"weights", lin->weights}, {"bias", lin->bias}};
  } else if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
    json rows = json::array();
    for (const SparseVector& v : knn->vectors) rows.push_back(sparse_to_json(v));
    params = {{"type", "knn"}, {"vectors", rows}, {"classes", knn->classes}};
  } else if (const auto* forest = std::get_if<ForestParams>(&model.params)) {
    json trees = json::array();
    for (const DecisionTree& t : forest->trees) trees.push_back(tree_to_json(t));
    params = {{"type", "forest"}, {"trees", trees}};
  } else if (const auto* boost = std::get_if<BoostParams>(&model.params)) {
    json trees = json::array();
    for (const DecisionTree& t : boost->trees) trees.push_back(tree_to_json(t));
    params = {{"type", "boost"}, {"trees", trees}, {"base_margin", boost->base_margin}};
  }
  j["params"] = params;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

BaselineModel load_baseline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIoFailure, path.string() + ": " + e.what());
  }
  if (j.value("format", "") != kBaselineFormat) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                path.string() + " is not a " + kBaselineFormat + " file");
  }
  BaselineModel model;
  try {
    model.spec = baseline_spec_from_json(j.at("spec"));
    model.dimension = j.at("dimension").get<size_t>();
    model.converged = j.at("converged").get<bool>();
    model.iterations = j.at("iterations").get<int>();
    // Any label name identifies its task.
    for (const json& c : j.at("classes")) {
      std::string name = c.get<std::string>();
      bool found = false;
      for (Task t : {Task::kA, Task::kB, Task::kC}) {
        for (Label l : label_set(t)) {
          if (to_string(l) == name) {
            model.classes.push_back(l);
            found = true;
          }
        }
      }
      if (!found) throw Error(ErrorCode::kUnknownLabel, "unknown class '" + name + "'");
    }
    if (j.contains("class_weights")) {
      ClassWeights w;
      for (const auto& [name, value] : j.at("class_weights").items()) {
        Label l = parse_label(task_of(model.classes.at(0)), name);
        w.weights[l] = value.get<double>();
      }
      model.class_weights = w;
    }
    const json& p = j.at("params");
    std::string type = p.at("type").get<std::string>();
    if (type == "linear") {
      LinearParams lin{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()};
      if (lin.weights.size() != model.dimension) {
        throw Error(ErrorCode::kDimensionMismatch, "weight vector length differs from dimension");
      }
      model.params = std::move(lin);
    } else if (type == "knn") {
      KnnParams knn;
      for (const json& row : p.at("vectors")) knn.vectors.push_back(sparse_from_json(row, model.dimension));
      knn.classes = p.at("classes").get<std::vector<uint32_t>>();
      model.params = std::move(knn);
    } else if (type == "forest") {
      ForestParams forest;
      for (const json& t : p.at("trees")) forest.trees.push_back(tree_from_json(t));
      model.params = std::move(forest);
    } else if (type == "boost") {
      BoostParams boost;
      for (const json& t : p.at("trees")) boost.trees.push_back(tree_from_json(t));
      boost.base_margin = p.at("base_margin").get<double>();
      model.params = std::move(boost);
    } else {
      throw Error(ErrorCode::kSchemaVersionMismatch, "unknown parameter type '" + type + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaVersionMismatch, path.string() + ": " + e.what());
  }
  return model;
}

ExperimentResult run_baseline_experiment(const Dataset& ds, const BaselineSpec& spec,
                                         double split, uint64_t seed,
                                         const PreprocessConfig& preprocessing) {
  if (!(split > 0.0 && split < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "split must lie strictly between 0 and 1");
  }
  if (ds.size() < 2) throw Error(ErrorCode::kEmptyDataset, "need at least 2 records to split");
  preprocessing.validate();
  std::vector<Label> labels = ds.labels();

  ExperimentResult result;
  result.split = seeded_split(ds.size(), split, seed);
  std::vector<std::string> train_texts, val_texts;
  std::vector<Label> train_labels;
  for (size_t i : result.split.train) {
    train_texts.push_back(preprocess(ds[i].text, preprocessing));
    train_labels.push_back(labels[i]);
  }
  for (size_t i : result.split.validation) val_texts.push_back(preprocess(ds[i].text, preprocessing));

  result.tfidf = fit_tfidf(train_texts);
  std::vector<SparseVector> x_train = transform_all(result.tfidf, train_texts);
  std::vector<SparseVector> x_val = transform_all(result.tfidf, val_texts);
  result.model = train_baseline(spec, x_train, train_labels);
  std::vector<Label> predicted = predict_baseline(result.model, x_val);
  result.report = evaluate(ds.subset(result.split.validation), predicted);
  return result;
}

}  // namespace ocp
