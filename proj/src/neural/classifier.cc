#include "ocp/neural/classifier.h"

#include <cmath>

#include "ocp/error.h"
#include "ocp/neural/checkpoint.h"

namespace ocp::nn {

namespace {

constexpr std::string_view kHeadNames[] = {"linear", "bi_gru", "bi_lstm"};

[[noreturn]] void incompatible(const std::string& what) {
  throw Error(ErrorCode::kIncompatibleDims, what);
}

}  // namespace

std::string_view to_string(EncoderSource source) {
  return source == EncoderSource::kRandomInit ? "random_init" : "pretrained_registry";
}

std::string_view to_string(HeadKind kind) { return kHeadNames[static_cast<size_t>(kind)]; }

HeadKind parse_head_kind(std::string_view name) {
  for (size_t i = 0; i < std::size(kHeadNames); ++i) {
    if (kHeadNames[i] == name) return static_cast<HeadKind>(i);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown head kind '" + std::string(name) + "'");
}

void EncoderSpec::validate() const {
  if (source == EncoderSource::kPretrainedRegistry) {
    if (identifier.empty()) throw Error(ErrorCode::kInvalidArgument, "registry encoder needs an identifier");
    return;
  }
  if (num_layers < 1) incompatible("encoder needs at least one layer");
  if (hidden_dim < 1 || vocab_size <= WordTokenizer::kSpecials || max_positions < 2) {
    incompatible("random_init encoder needs hidden_dim >= 1, vocab_size > 4 and max_positions >= 2");
  }
  if (num_heads < 1 || hidden_dim % num_heads != 0) {
    incompatible("hidden_dim " + std::to_string(hidden_dim) + " is not divisible by " +
                 std::to_string(num_heads) + " heads");
  }
  if (intermediate_dim < 0) incompatible("intermediate_dim must be >= 0");
  if (dropout < 0.0 || dropout >= 1.0) throw Error(ErrorCode::kInvalidArgument, "dropout must lie in [0, 1)");
}

nlohmann::json to_json(const EncoderSpec& s) {
  return {{"source", to_string(s.source)},   {"identifier", s.identifier},
          {"num_layers", s.num_layers},      {"hidden_dim", s.hidden_dim},
          {"vocab_size", s.vocab_size},      {"num_heads", s.num_heads},
          {"intermediate_dim", s.intermediate_dim}, {"max_positions", s.max_positions},
          {"dropout", s.dropout},            {"cased", s.cased}};
}

EncoderSpec encoder_spec_from_json(const nlohmann::json& j) {
  EncoderSpec s;
  try {
    std::string source = j.value("source", "random_init");
    if (source == "random_init") {
      s.source = EncoderSource::kRandomInit;
    } else if (source == "pretrained_registry") {
      s.source = EncoderSource::kPretrainedRegistry;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown encoder source '" + source + "'");
    }
    s.identifier = j.value("identifier", s.identifier);
    s.num_layers = j.value("num_layers", s.num_layers);
    s.hidden_dim = j.value("hidden_dim", s.hidden_dim);
    s.vocab_size = j.value("vocab_size", s.vocab_size);
    s.num_heads = j.value("num_heads", s.num_heads);
    s.intermediate_dim = j.value("intermediate_dim", s.intermediate_dim);
    s.max_positions = j.value("max_positions", s.max_positions);
    s.dropout = j.value("dropout", s.dropout);
    s.cased = j.value("cased", s.cased);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad encoder spec: ") + e.what());
  }
  return s;
}

nlohmann::json to_json(const HeadSpec& h) {
  return {{"kind", to_string(h.kind)},
          {"use_last4_concat", h.use_last4_concat},
          {"recurrent_hidden_dim", h.recurrent_hidden_dim},
          {"freeze_encoder", h.freeze_encoder},
          {"dropout", h.dropout}};
}

HeadSpec head_spec_from_json(const nlohmann::json& j) {
  HeadSpec h;
  try {
    h.kind = parse_head_kind(j.value("kind", std::string("linear")));
    h.use_last4_concat = j.value("use_last4_concat", h.use_last4_concat);
    h.recurrent_hidden_dim = j.value("recurrent_hidden_dim", h.recurrent_hidden_dim);
    h.freeze_encoder = j.value("freeze_encoder", h.freeze_encoder);
    h.dropout = j.value("dropout", h.dropout);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad head spec: ") + e.what());
  }
  return h;
}

// ------------------------------------------------------------------ encoder

Encoder::Encoder(const EncoderSpec& spec, std::vector<Parameter>& reg, Rng& rng) : spec_(spec) {
  const long d = spec.hidden_dim;
  const long ff = spec.intermediate_dim > 0 ? spec.intermediate_dim : 4 * d;
  token_embedding_ = add_parameter(reg, "encoder.embeddings.token", ParamRole::kEmbedding,
                                   init_matrix(Init::kNormal002, spec.vocab_size, d, rng));
  position_embedding_ = add_parameter(reg, "encoder.embeddings.position", ParamRole::kEmbedding,
                                      init_matrix(Init::kNormal002, spec.max_positions, d, rng));
  embedding_norm_ = make_layer_norm(reg, "encoder.embeddings.norm", d);
  for (int l = 0; l < spec.num_layers; ++l) {
    std::string p = "encoder.layer" + std::to_string(l) + ".";
    Block b;
    b.query = make_linear(reg, p + "attention.query", d, d, Init::kNormal002, rng);
    b.key = make_linear(reg, p + "attention.key", d, d, Init::kNormal002, rng);
    b.value = make_linear(reg, p + "attention.value", d, d, Init::kNormal002, rng);
    b.attn_out = make_linear(reg, p + "attention.output", d, d, Init::kNormal002, rng);
    b.attn_norm = make_layer_norm(reg, p + "attention.norm", d);
    b.ffn_in = make_linear(reg, p + "ffn.in", d, ff, Init::kNormal002, rng);
    b.ffn_out = make_linear(reg, p + "ffn.out", ff, d, Init::kNormal002, rng);
    b.ffn_norm = make_layer_norm(reg, p + "ffn.norm", d);
    blocks_.push_back(std::move(b));
  }
  pooler_ = make_linear(reg, "encoder.pooler", d, d, Init::kNormal002, rng);
}

std::vector<Var> Encoder::hidden_states(const std::vector<int>& ids, Rng* rng) const {
  if (ids.empty()) throw Error(ErrorCode::kEmptyList, "empty token sequence");
  if (static_cast<int>(ids.size()) > spec_.max_positions) {
    throw Error(ErrorCode::kOutOfRange, std::to_string(ids.size()) + " tokens exceed " +
                                            std::to_string(spec_.max_positions) + " positions");
  }
  std::vector<int> positions(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) positions[i] = static_cast<int>(i);
  Var x = add(gather_rows(token_embedding_, ids), gather_rows(position_embedding_, positions));
  x = dropout(embedding_norm_(x), spec_.dropout, rng);
  std::vector<Var> states{x};
  const long d = spec_.hidden_dim;
  const long dh = d / spec_.num_heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  for (const Block& b : blocks_) {
    Var q = b.query(x), k = b.key(x), v = b.value(x);
    std::vector<Var> heads;
    for (int h = 0; h < spec_.num_heads; ++h) {
      Var qh = slice_cols(q, h * dh, dh);
      Var kh = slice_cols(k, h * dh, dh);
      Var vh = slice_cols(v, h * dh, dh);
      Var attn = softmax_rows(scale(matmul(qh, transpose(kh)), inv_sqrt));
      heads.push_back(matmul(attn, vh));
    }
    Var context = heads.size() == 1 ? heads[0] : concat_cols(heads);
    x = b.attn_norm(add(x, dropout(b.attn_out(context), spec_.dropout, rng)));
    Var ff = b.ffn_out(gelu(b.ffn_in(x)));
    x = b.ffn_norm(add(x, dropout(ff, spec_.dropout, rng)));
    states.push_back(x);
  }
  return states;
}

Var Encoder::pool(const Var& last_state) const {
  return tanh(pooler_(slice_rows(last_state, 0, 1)));
}

// --------------------------------------------------------------- classifier

NeuralClassifier::NeuralClassifier(const EncoderSpec& encoder, const HeadSpec& head, size_t n_classes,
                                   uint64_t seed)
    : encoder_spec_(encoder), head_spec_(head), n_classes_(n_classes) {
  if (n_classes < 2) incompatible("classification needs at least 2 classes, got " + std::to_string(n_classes));
  EncoderSpec dims = encoder;
  dims.source = EncoderSource::kRandomInit;
  dims.validate();
  if (head.kind != HeadKind::kLinear && head.recurrent_hidden_dim < 1) {
    incompatible("recurrent head needs recurrent_hidden_dim >= 1");
  }
  if (head.dropout < 0.0 || head.dropout >= 1.0) throw Error(ErrorCode::kInvalidArgument, "head dropout must lie in [0, 1)");
  Rng rng(seed);
  encoder_ = Encoder(encoder, params_, rng);
  const long width = head_input_width();
  const long r = head.recurrent_hidden_dim;
  switch (head.kind) {
    case HeadKind::kLinear:
      output_ = make_linear(params_, "head.output", width, static_cast<long>(n_classes), Init::kNormal002, rng);
      break;
    case HeadKind::kBiGru:
      gru_fwd_ = make_gru(params_, "head.gru_forward", width, r, rng);
      gru_bwd_ = make_gru(params_, "head.gru_backward", width, r, rng);
      output_ = make_linear(params_, "head.output", 2 * r, static_cast<long>(n_classes), Init::kGlorotUniform, rng);
      break;
    case HeadKind::kBiLstm:
      lstm_fwd_ = make_lstm(params_, "head.lstm_forward", width, r, rng);
      lstm_bwd_ = make_lstm(params_, "head.lstm_backward", width, r, rng);
      output_ = make_linear(params_, "head.output", 2 * r, static_cast<long>(n_classes), Init::kGlorotUniform, rng);
      break;
  }
  if (head.freeze_encoder) {
    for (Parameter& p : params_) {
      if (p.name.rfind("encoder.", 0) == 0) p.var->requires_grad = false;
    }
  }
  if (n_classes == 2) labels_ = label_set(Task::kA);
  if (n_classes == 3) labels_ = label_set(Task::kC);
  max_sequence_length_ = static_cast<size_t>(encoder.max_positions);
}

long NeuralClassifier::head_input_width() const {
  return encoder_spec_.hidden_dim * (head_spec_.use_last4_concat ? 4 : 1);
}

void NeuralClassifier::set_tokenizer(WordTokenizer tokenizer) {
  if (tokenizer.size() > static_cast<size_t>(encoder_spec_.vocab_size)) {
    throw Error(ErrorCode::kTokenizerMismatch, "tokenizer has " + std::to_string(tokenizer.size()) +
                                                   " entries but the encoder embeds " +
                                                   std::to_string(encoder_spec_.vocab_size));
  }
  if (tokenizer.cased() != encoder_spec_.cased) {
    throw Error(ErrorCode::kTokenizerMismatch, "tokenizer casing differs from the encoder's");
  }
  tokenizer_ = std::move(tokenizer);
}

void NeuralClassifier::set_max_sequence_length(size_t n) {
  if (n < 2 || n > static_cast<size_t>(encoder_spec_.max_positions)) {
    throw Error(ErrorCode::kIncompatibleDims, "max_sequence_length " + std::to_string(n) +
                                                  " outside [2, " + std::to_string(encoder_spec_.max_positions) + "]");
  }
  max_sequence_length_ = n;
}

void NeuralClassifier::set_preset(Preset preset) {
  preprocess_ = make_preset(preset);
  preset_ = preset;
}

void NeuralClassifier::set_labels(std::vector<Label> labels) {
  if (labels.size() != n_classes_) {
    incompatible(std::to_string(labels.size()) + " labels for a " + std::to_string(n_classes_) + "-class model");
  }
  labels_ = std::move(labels);
}

std::vector<int> NeuralClassifier::encode(const std::string& text) const {
  if (!tokenizer_) throw Error(ErrorCode::kTokenizerMismatch, "model has no tokenizer yet");
  return tokenizer_->encode_marked(preprocess(text, preprocess_), max_sequence_length_);
}

std::vector<Var> NeuralClassifier::features(const std::vector<int>& ids, Rng* rng) const {
  std::vector<Var> states = encoder_.hidden_states(ids, rng);
  if (!head_spec_.use_last4_concat) return {states.back()};
  // Shallow encoders repeat their earliest state to fill four slots.
  std::vector<Var> last4;
  for (int k = 3; k >= 0; --k) {
    long idx = static_cast<long>(states.size()) - 1 - k;
    last4.push_back(states[static_cast<size_t>(std::max(0L, idx))]);
  }
  return last4;
}

Var NeuralClassifier::logits(const std::vector<int>& ids, Rng* rng) const {
  std::vector<Var> feats = features(ids, rng);
  Var pooled;
  if (head_spec_.kind == HeadKind::kLinear) {
    if (head_spec_.use_last4_concat) {
      std::vector<Var> cls;
      for (const Var& s : feats) cls.push_back(slice_rows(s, 0, 1));
      pooled = concat_cols(cls);
    } else {
      pooled = encoder_.pool(feats[0]);
    }
  } else {
    Var seq = feats.size() == 1 ? feats[0] : concat_cols(feats);
    Var fwd, bwd;
    if (gru_fwd_) {
      fwd = gru_fwd_->run(seq, false);
      bwd = gru_bwd_->run(seq, true);
    } else {
      fwd = lstm_fwd_->run(seq, false);
      bwd = lstm_bwd_->run(seq, true);
    }
    pooled = concat_cols({fwd, bwd});
  }
  return output_(dropout(pooled, head_spec_.dropout, rng));
}

Matrix NeuralClassifier::forward_probabilities(const std::vector<std::vector<int>>& batch) const {
  Matrix out(static_cast<long>(batch.size()), static_cast<long>(n_classes_));
  for (size_t i = 0; i < batch.size(); ++i) {
    out.row(static_cast<long>(i)) = softmax_rows(logits(batch[i], nullptr)->value);
  }
  return out;
}

NeuralClassifier build_classifier(const EncoderSpec& encoder, const HeadSpec& head, size_t n_classes,
                                  uint64_t seed) {
  encoder.validate();
  if (encoder.source == EncoderSource::kRandomInit) {
    return NeuralClassifier(encoder, head, n_classes, seed);
  }
  RegistryEntry entry = load_registry_entry(encoder.identifier);
  EncoderSpec resolved = entry.encoder;
  resolved.source = EncoderSource::kPretrainedRegistry;
  resolved.identifier = encoder.identifier;
  NeuralClassifier model(resolved, head, n_classes, seed);
  for (const Parameter& p : model.parameters()) {
    if (p.name.rfind("encoder.", 0) != 0) continue;
    auto it = entry.weights.find(p.name);
    if (it == entry.weights.end()) {
      throw Error(ErrorCode::kIncompatibleDims, "registry model '" + encoder.identifier + "' lacks " + p.name);
    }
    if (it->second.rows() != p.var->value.rows() || it->second.cols() != p.var->value.cols()) {
      throw Error(ErrorCode::kIncompatibleDims, "registry weight " + p.name + " has the wrong shape");
    }
    p.var->value = it->second;
  }
  model.set_tokenizer(std::move(entry.tokenizer));
  return model;
}

}  // namespace ocp::nn
