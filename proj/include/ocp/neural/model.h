#ifndef OCP_NEURAL_MODEL_H_
#define OCP_NEURAL_MODEL_H_

#include <filesystem>
#include <string>
#include <vector>

#include "ocp/corpus.h"
#include "ocp/neural/autodiff.h"
#include "ocp/rng.h"

namespace ocp::nn {

// -sum_i p_i ln(max(q_i, 1e-7)). Throws DimensionMismatch.
double soft_cross_entropy(const std::vector<double>& p, const std::vector<double>& q);
// Gradient of soft_cross_entropy(p, softmax(logits)) with respect to logits.
std::vector<double> soft_cross_entropy_grad(const std::vector<double>& p,
                                            const std::vector<double>& logits);

// Shared surface of the trainable text classifiers.
class NeuralModel {
 public:
  NeuralModel() = default;
  NeuralModel(const NeuralModel&) = delete;
  NeuralModel& operator=(const NeuralModel&) = delete;
  NeuralModel(NeuralModel&&) = default;
  NeuralModel& operator=(NeuralModel&&) = default;
  virtual ~NeuralModel() = default;

  // Token ids for one raw text, after the model's preprocessing.
  virtual std::vector<int> encode(const std::string& text) const = 0;
  // 1 x n_classes scores. Dropout is active only when `rng` is given.
  virtual Var logits(const std::vector<int>& ids, Rng* rng) const = 0;
  virtual std::vector<Parameter> parameters() const = 0;
  const std::vector<Label>& labels() const { return labels_; }

 protected:
  std::vector<Label> labels_;
};

struct Prediction {
  std::vector<double> probabilities;  // in labels() order
  Label label;
};

// Evaluation mode: no dropout, deterministic. Labels follow the argmax rule
// with ties to the earlier label.
std::vector<Prediction> predict_neural(const NeuralModel& model, const std::vector<std::string>& texts);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_f1_batchavg = 0.0;
  double val_acc_batchavg = 0.0;
  bool operator==(const EpochRecord&) const = default;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 1-based, 0 when nothing was trained
  bool operator==(const TrainingHistory&) const = default;
};

void write_history_csv(const TrainingHistory& history, const std::filesystem::path& path);
TrainingHistory read_history_csv(const std::filesystem::path& path);

// Snapshot / restore of parameter values, matched by position.
std::vector<Matrix> snapshot(const std::vector<Parameter>& params);
void restore(const std::vector<Parameter>& params, const std::vector<Matrix>& values);

}  // namespace ocp::nn

#endif  // OCP_NEURAL_MODEL_H_
