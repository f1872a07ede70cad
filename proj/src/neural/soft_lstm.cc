#include "ocp/neural/soft_lstm.h"

#include "ocp/error.h"
#include "training.h"

namespace ocp::nn {

void SoftLstmConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  for (double rate : {spatial_dropout, input_dropout, recurrent_dropout}) {
    if (rate < 0.0 || rate >= 1.0) fail("dropout rates must lie in [0, 1)");
  }
  if (embedding_dim < 1 || hidden_dim < 1) fail("embedding_dim and hidden_dim must be >= 1");
  if (!(split > 0.0 && split < 1.0)) fail("split must lie strictly between 0 and 1");
  if (max_epochs < 0) fail("max_epochs must be >= 0");
  if (max_sequence_length < 1) fail("max_sequence_length must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !(adam_epsilon > 0.0)) fail("learning_rate and adam_epsilon must be positive");
  parse_preset(preprocess);
}

nlohmann::json to_json(const SoftLstmConfig& c) {
  return {{"embedding_dim", c.embedding_dim},
          {"spatial_dropout", c.spatial_dropout},
          {"input_dropout", c.input_dropout},
          {"recurrent_dropout", c.recurrent_dropout},
          {"split", c.split},
          {"max_epochs", c.max_epochs},
          {"checkpoint_rule", "best validation loss"},
          {"hidden_dim", c.hidden_dim},
          {"max_sequence_length", c.max_sequence_length},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"adam_epsilon", c.adam_epsilon},
          {"max_vocab", c.max_vocab},
          {"preprocess", c.preprocess},
          {"seed", c.seed}};
}

SoftLstmConfig soft_lstm_config_from_json(const nlohmann::json& j) {
  SoftLstmConfig c;
  try {
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
    c.spatial_dropout = j.value("spatial_dropout", c.spatial_dropout);
    c.input_dropout = j.value("input_dropout", c.input_dropout);
    c.recurrent_dropout = j.value("recurrent_dropout", c.recurrent_dropout);
    c.split = j.value("split", c.split);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.max_sequence_length = j.value("max_sequence_length", c.max_sequence_length);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
    c.max_vocab = j.value("max_vocab", c.max_vocab);
    c.preprocess = j.value("preprocess", c.preprocess);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad soft-lstm config: ") + e.what());
  }
  c.validate();
  return c;
}

SoftLstmModel::SoftLstmModel(const SoftLstmConfig& cfg, WordTokenizer tokenizer)
    : cfg_(cfg), tokenizer_(std::move(tokenizer)) {
  cfg_.validate();
  preprocess_ = make_preset(parse_preset(cfg_.preprocess));
  labels_ = label_set(Task::kC);
  Rng rng(cfg_.seed);
  Matrix table(static_cast<long>(tokenizer_.size()), cfg_.embedding_dim);
  for (long i = 0; i < table.size(); ++i) table.data()[i] = rng.uniform(-0.05, 0.05);
  embedding_ = add_parameter(params_, "embedding", ParamRole::kEmbedding, std::move(table));
  lstm_ = make_lstm(params_, "lstm", cfg_.embedding_dim, cfg_.hidden_dim, rng);
  output_ = make_linear(params_, "output", cfg_.hidden_dim, 3, Init::kGlorotUniform, rng);
}

std::vector<int> SoftLstmModel::encode(const std::string& text) const {
  return tokenizer_.encode_plain(preprocess(text, preprocess_), cfg_.max_sequence_length);
}

Var SoftLstmModel::logits(const std::vector<int>& ids, Rng* rng) const {
  Var x = gather_rows(embedding_, ids);
  Matrix input_mask, recurrent_mask;
  if (rng) {
    if (cfg_.spatial_dropout > 0.0) x = mul_const(x, dropout_mask(1, cfg_.embedding_dim, cfg_.spatial_dropout, *rng));
    if (cfg_.input_dropout > 0.0) input_mask = dropout_mask(1, cfg_.embedding_dim, cfg_.input_dropout, *rng);
    if (cfg_.recurrent_dropout > 0.0) recurrent_mask = dropout_mask(1, cfg_.hidden_dim, cfg_.recurrent_dropout, *rng);
  }
  return output_(lstm_.run(x, false, input_mask, recurrent_mask));
}

SoftLstmResult train_soft_lstm(const Dataset& ds, const SoftLstmConfig& cfg) {
  cfg.validate();
  if (ds.empty()) throw Error(ErrorCode::kEmptyDataset, "soft-label training needs a non-empty dataset");
  if (ds.task() != Task::kC || ds.payload_kind() != PayloadKind::kSoft) {
    throw Error(ErrorCode::kInvalidArgument, "soft-label LSTM needs a soft task-C dataset");
  }
  if (ds.size() < 2) throw Error(ErrorCode::kEmptyDataset, "need at least 2 records to split");

  TrainValSplit split = seeded_split(ds.size(), cfg.split, cfg.seed);
  const PreprocessConfig pre = make_preset(parse_preset(cfg.preprocess));
  std::vector<std::string> train_texts;
  for (size_t i : split.train) train_texts.push_back(preprocess(ds[i].text, pre));
  SoftLstmResult result{SoftLstmModel(cfg, WordTokenizer::build(train_texts, cfg.max_vocab, false)), {},
                        std::move(split)};

  auto example = [&](size_t i) {
    const auto& s = std::get<SoftScoreC>(ds[i].payload);
    internal::Example ex{result.model.encode(ds[i].text), Matrix(1, 3)};
    ex.target << s.p_ind, s.p_grp, s.p_oth;
    return ex;
  };
  std::vector<internal::Example> validation;
  for (size_t i : result.split.validation) validation.push_back(example(i));
  auto make_train = [&](size_t begin, size_t end) {
    std::vector<internal::Example> out;
    for (size_t k = begin; k < end; ++k) out.push_back(example(result.split.train[k]));
    return out;
  };
  internal::LoopOptions opt;
  opt.batch_size = cfg.batch_size;
  opt.max_epochs = cfg.max_epochs;
  opt.selection = internal::Selection::kMinValLoss;
  opt.adam = AdamConfig{cfg.learning_rate, 0.9, 0.999, cfg.adam_epsilon, 0.0, 0.0};
  opt.seed = cfg.seed;
  result.history = internal::train_loop(result.model, make_train, result.split.train.size(), validation, opt);
  return result;
}

}  // namespace ocp::nn
