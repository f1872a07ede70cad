#ifndef OCP_BASELINES_H_
#define OCP_BASELINES_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ocp/corpus.h"
#include "ocp/evaluate.h"
#include "ocp/features.h"
#include "ocp/labels.h"
#include "ocp/preprocess.h"
#include "ocp/split.h"

namespace ocp {

enum class BaselineKind {
  kLinearSvm,
  kLogisticRegression,
  kKnn,
  kRandomForest,
  kGradientBoostedTrees,
};

enum class ClassWeighting { kNone, kBalanced };

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(std::string_view name);

struct BaselineHyperparams {
  double svm_c = 1.0;
  double lr_c = 1.0;
  int knn_k = 5;
  int rf_trees = 100;
  int rf_max_depth = 0;  // 0: grow until pure
  int gbt_rounds = 100;
  int gbt_max_depth = 6;
  double gbt_learning_rate = 0.3;
  double gbt_lambda = 1.0;
  double gbt_min_child_weight = 1.0;
  int max_iter = 1000;
  double tol = 1e-4;
  uint64_t seed = 0;
};

struct BaselineSpec {
  BaselineKind kind = BaselineKind::kLinearSvm;
  ClassWeighting class_weighting = ClassWeighting::kNone;
  BaselineHyperparams hyperparams;

  void validate() const;
};

// Decision tree over sparse rows. A row goes left when its value for
// `feature` is < threshold; absent entries read as 0 unless the tree treats
// them as missing, in which case they follow `default_left`.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool default_left = false;
  int left = -1;
  int right = -1;
  std::vector<double> value;  // class distribution or single leaf score
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  bool absent_is_missing = false;

  const TreeNode& leaf(const SparseVector& x) const;
};

struct LinearParams {
  std::vector<double> weights;
  double bias = 0.0;
};

struct KnnParams {
  std::vector<SparseVector> vectors;
  std::vector<uint32_t> classes;  // index into BaselineModel::classes
};

struct ForestParams {
  std::vector<DecisionTree> trees;
};

struct BoostParams {
  std::vector<DecisionTree> trees;
  double base_margin = 0.0;
};

struct BaselineModel {
  BaselineSpec spec;
  std::vector<Label> classes;  // sorted by label name
  size_t dimension = 0;
  std::optional<ClassWeights> class_weights;
  std::variant<LinearParams, KnnParams, ForestParams, BoostParams> params;
  bool converged = true;
  int iterations = 0;
};

// `weights`, when given, overrides the weights derived from
// spec.class_weighting.
BaselineModel train_baseline(const BaselineSpec& spec,
                             const std::vector<SparseVector>& x,
                             const std::vector<Label>& y,
                             const ClassWeights* weights = nullptr);
std::vector<Label> predict_baseline(const BaselineModel& model,
                                    const std::vector<SparseVector>& x);

nlohmann::json to_json(const BaselineSpec& spec);
BaselineSpec baseline_spec_from_json(const nlohmann::json& j);
void save_baseline(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel load_baseline(const std::filesystem::path& path);

struct ExperimentResult {
  EvalReport report;
  TfidfModel tfidf;
  BaselineModel model;
  TrainValSplit split;
};

// Seeded split, preprocessing, tf-idf fitted on the training fold only,
// training, then corpus-level evaluation on the validation fold.
ExperimentResult run_baseline_experiment(const Dataset& ds,
                                         const BaselineSpec& spec,
                                         double split, uint64_t seed,
                                         const PreprocessConfig& preprocessing = {});

}  // namespace ocp

#endif  // OCP_BASELINES_H_
