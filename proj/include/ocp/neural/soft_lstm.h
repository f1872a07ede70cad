#ifndef OCP_NEURAL_SOFT_LSTM_H_
#define OCP_NEURAL_SOFT_LSTM_H_

#include <string>

#include "json.hpp"
#include "ocp/corpus.h"
#include "ocp/neural/layers.h"
#include "ocp/neural/model.h"
#include "ocp/neural/tokenizer.h"
#include "ocp/preprocess.h"
#include "ocp/split.h"

namespace ocp::nn {

struct SoftLstmConfig {
  int embedding_dim = 128;
  double spatial_dropout = 0.2;
  double input_dropout = 0.2;
  double recurrent_dropout = 0.2;
  double split = 0.9;
  int max_epochs = 3;
  int hidden_dim = 128;
  size_t max_sequence_length = 64;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double adam_epsilon = 1e-7;
  size_t max_vocab = 0;  // 0: every training token
  std::string preprocess = "english_soft_c";
  uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const SoftLstmConfig& cfg);
SoftLstmConfig soft_lstm_config_from_json(const nlohmann::json& j);

// Embedding -> spatial dropout -> LSTM (input and recurrent dropout) ->
// dense softmax over IND, GRP, OTH.
class SoftLstmModel : public NeuralModel {
 public:
  SoftLstmModel(const SoftLstmConfig& cfg, WordTokenizer tokenizer);

  const SoftLstmConfig& config() const { return cfg_; }
  const WordTokenizer& tokenizer() const { return tokenizer_; }

  std::vector<int> encode(const std::string& text) const override;
  Var logits(const std::vector<int>& ids, Rng* rng) const override;
  std::vector<Parameter> parameters() const override { return params_; }

 private:
  SoftLstmConfig cfg_;
  WordTokenizer tokenizer_;
  PreprocessConfig preprocess_;
  std::vector<Parameter> params_;
  Var embedding_;
  Lstm lstm_;
  Linear output_;
};

struct SoftLstmResult {
  SoftLstmModel model;
  TrainingHistory history;
  TrainValSplit split;
};

// Soft cross-entropy against each record's (p_ind, p_grp, p_oth); the
// returned model holds the weights of the lowest validation-loss epoch.
// Throws EmptyDataset.
SoftLstmResult train_soft_lstm(const Dataset& ds, const SoftLstmConfig& cfg);

}  // namespace ocp::nn

#endif  // OCP_NEURAL_SOFT_LSTM_H_
