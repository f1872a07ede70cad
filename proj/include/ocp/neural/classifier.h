#ifndef OCP_NEURAL_CLASSIFIER_H_
#define OCP_NEURAL_CLASSIFIER_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ocp/neural/layers.h"
#include "ocp/neural/model.h"
#include "ocp/neural/tokenizer.h"
#include "ocp/preprocess.h"

namespace ocp::nn {

enum class EncoderSource { kPretrainedRegistry, kRandomInit };

struct EncoderSpec {
  EncoderSource source = EncoderSource::kRandomInit;
  std::string identifier;  // registry name, or a free-form architecture tag
  int num_layers = 2;
  int hidden_dim = 32;
  int vocab_size = 200;
  int num_heads = 2;
  int intermediate_dim = 0;  // 0: 4 * hidden_dim
  int max_positions = 64;
  double dropout = 0.1;
  bool cased = false;

  // Throws IncompatibleDims / InvalidArgument.
  void validate() const;
};

enum class HeadKind { kLinear, kBiGru, kBiLstm };

struct HeadSpec {
  HeadKind kind = HeadKind::kLinear;
  bool use_last4_concat = false;
  int recurrent_hidden_dim = 32;
  bool freeze_encoder = false;
  double dropout = 0.1;
};

std::string_view to_string(EncoderSource source);
std::string_view to_string(HeadKind kind);
HeadKind parse_head_kind(std::string_view name);
nlohmann::json to_json(const EncoderSpec& spec);
EncoderSpec encoder_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HeadSpec& spec);
HeadSpec head_spec_from_json(const nlohmann::json& j);

// BERT-style encoder: learned token and position embeddings, post-norm
// self-attention blocks and a tanh pooler over the first token.
class Encoder {
 public:
  Encoder() = default;
  Encoder(const EncoderSpec& spec, std::vector<Parameter>& registry, Rng& rng);

  // Embedding output followed by each block's output, each (tokens x hidden).
  std::vector<Var> hidden_states(const std::vector<int>& ids, Rng* rng) const;
  Var pool(const Var& last_state) const;

 private:
  struct Block {
    Linear query, key, value, attn_out;
    LayerNorm attn_norm;
    Linear ffn_in, ffn_out;
    LayerNorm ffn_norm;
  };
  EncoderSpec spec_;
  Var token_embedding_;
  Var position_embedding_;
  LayerNorm embedding_norm_;
  std::vector<Block> blocks_;
  Linear pooler_;
};

// Encoder plus classification head with a terminal softmax.
class NeuralClassifier : public NeuralModel {
 public:
  NeuralClassifier(const EncoderSpec& encoder, const HeadSpec& head, size_t n_classes, uint64_t seed);

  const EncoderSpec& encoder_spec() const { return encoder_spec_; }
  const HeadSpec& head_spec() const { return head_spec_; }
  size_t n_classes() const { return n_classes_; }
  // Width of the features the head consumes: hidden, or 4 * hidden with the
  // last-4 concatenation.
  long head_input_width() const;

  std::vector<int> encode(const std::string& text) const override;
  Var logits(const std::vector<int>& ids, Rng* rng) const override;
  std::vector<Parameter> parameters() const override { return params_; }

  // Output rows are probability vectors.
  Matrix forward_probabilities(const std::vector<std::vector<int>>& batch) const;

  const std::optional<WordTokenizer>& tokenizer() const { return tokenizer_; }
  void set_tokenizer(WordTokenizer tokenizer);
  size_t max_sequence_length() const { return max_sequence_length_; }
  void set_max_sequence_length(size_t n);
  Preset preset() const { return preset_; }
  void set_preset(Preset preset);
  void set_labels(std::vector<Label> labels);

 private:
  std::vector<Var> features(const std::vector<int>& ids, Rng* rng) const;

  EncoderSpec encoder_spec_;
  HeadSpec head_spec_;
  size_t n_classes_;
  std::vector<Parameter> params_;
  Encoder encoder_;
  Linear output_;
  std::optional<Gru> gru_fwd_, gru_bwd_;
  std::optional<Lstm> lstm_fwd_, lstm_bwd_;
  std::optional<WordTokenizer> tokenizer_;
  size_t max_sequence_length_ = 64;
  Preset preset_ = Preset::kNone;
  PreprocessConfig preprocess_;
};

// Random-init specs build fresh weights. Registry specs load the named
// encoder and its tokenizer from the model registry (ModelNotFound when
// absent); the head is always freshly initialised. Throws IncompatibleDims
// for fewer than 2 classes.
NeuralClassifier build_classifier(const EncoderSpec& encoder, const HeadSpec& head, size_t n_classes,
                                  uint64_t seed = 0);

}  // namespace ocp::nn

#endif  // OCP_NEURAL_CLASSIFIER_H_
