#ifndef OCP_NEURAL_FINETUNE_H_
#define OCP_NEURAL_FINETUNE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "ocp/corpus.h"
#include "ocp/neural/classifier.h"
#include "ocp/split.h"

namespace ocp::nn {

struct FinetuneConfig {
  double learning_rate = 2e-5;
  // Decoupled decay for every parameter except biases and normalization.
  double weight_decay = 0.01;
  size_t max_sequence_length = 64;
  int batch_size = 32;
  int max_epochs = 4;
  bool early_stopping = true;
  int patience = 1;
  double split = 0.8;
  uint64_t seed = 0;
  double adam_epsilon = 1e-8;
  double clip_norm = 1.0;
  // Training-fold records encoded and trained per chunk; 0 for one chunk.
  size_t chunk_size = 0;
  // Where to save the model after each chunk, when set.
  std::string chunk_checkpoint_dir;
  std::string preprocess = "none";

  void validate() const;
};

nlohmann::json to_json(const FinetuneConfig& cfg);
FinetuneConfig finetune_config_from_json(const nlohmann::json& j);

struct FinetuneResult {
  NeuralClassifier model;
  TrainingHistory history;
  TrainValSplit split;
  std::vector<std::string> decayed_parameters;
};

// Seeded split, tokenizer built from the training fold when the model has
// none, AdamW training; with early stopping the model returned holds the
// weights of the epoch with the best batch-averaged validation F1.
// Throws EmptyDataset, TokenizerMismatch, IncompatibleDims.
FinetuneResult finetune(NeuralClassifier model, const Dataset& ds, const FinetuneConfig& cfg);

}  // namespace ocp::nn

#endif  // OCP_NEURAL_FINETUNE_H_
