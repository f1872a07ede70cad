#include "ocp/neural/finetune.h"

#include "ocp/error.h"
#include "ocp/neural/checkpoint.h"
#include "ocp/neural/optim.h"
#include "training.h"

namespace ocp::nn {

void FinetuneConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (weight_decay < 0.0) fail("weight_decay must be >= 0");
  if (max_sequence_length < 2) fail("max_sequence_length must be at least 2");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (max_epochs < 0) fail("max_epochs must be >= 0");
  if (patience < 0) fail("patience must be >= 0");
  if (!(split > 0.0 && split < 1.0)) fail("split must lie strictly between 0 and 1");
  if (!(adam_epsilon > 0.0)) fail("adam_epsilon must be positive");
  if (clip_norm < 0.0) fail("clip_norm must be >= 0");
  parse_preset(preprocess);
}

nlohmann::json to_json(const FinetuneConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"weight_decay", c.weight_decay},
          {"decay_exclusions", "bias and normalization parameters"},
          {"max_sequence_length", c.max_sequence_length},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"early_stopping", c.early_stopping},
          {"patience", c.patience},
          {"split", c.split},
          {"seed", c.seed},
          {"adam_epsilon", c.adam_epsilon},
          {"clip_norm", c.clip_norm},
          {"chunk_size", c.chunk_size},
          {"chunk_checkpoint_dir", c.chunk_checkpoint_dir},
          {"preprocess", c.preprocess}};
}

FinetuneConfig finetune_config_from_json(const nlohmann::json& j) {
  FinetuneConfig c;
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.max_sequence_length = j.value("max_sequence_length", c.max_sequence_length);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.early_stopping = j.value("early_stopping", c.early_stopping);
    c.patience = j.value("patience", c.patience);
    c.split = j.value("split", c.split);
    c.seed = j.value("seed", c.seed);
    c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
    c.clip_norm = j.value("clip_norm", c.clip_norm);
    c.chunk_size = j.value("chunk_size", c.chunk_size);
    c.chunk_checkpoint_dir = j.value("chunk_checkpoint_dir", c.chunk_checkpoint_dir);
    c.preprocess = j.value("preprocess", c.preprocess);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad finetune config: ") + e.what());
  }
  c.validate();
  return c;
}

FinetuneResult finetune(NeuralClassifier model, const Dataset& ds, const FinetuneConfig& cfg) {
  cfg.validate();
  if (ds.empty()) throw Error(ErrorCode::kEmptyDataset, "fine-tuning needs a non-empty dataset");
  if (ds.size() < 2) throw Error(ErrorCode::kEmptyDataset, "fine-tuning needs at least 2 records to split");
  std::vector<Label> labels = ds.labels();
  model.set_labels(label_set(ds.task()));
  model.set_preset(parse_preset(cfg.preprocess));
  model.set_max_sequence_length(cfg.max_sequence_length);

  FinetuneResult result{std::move(model), {}, seeded_split(ds.size(), cfg.split, cfg.seed), {}};
  NeuralClassifier& m = result.model;
  const PreprocessConfig pre = make_preset(m.preset());
  if (!m.tokenizer()) {
    std::vector<std::string> texts;
    for (size_t i : result.split.train) texts.push_back(preprocess(ds[i].text, pre));
    m.set_tokenizer(WordTokenizer::build(texts, static_cast<size_t>(m.encoder_spec().vocab_size),
                                         m.encoder_spec().cased));
  } else if (m.tokenizer()->cased() != m.encoder_spec().cased) {
    throw Error(ErrorCode::kTokenizerMismatch, "tokenizer casing differs from the encoder's");
  }

  const std::vector<Label>& order = m.labels();
  auto example = [&](size_t i) {
    internal::Example ex{m.encode(ds[i].text), Matrix::Zero(1, static_cast<long>(order.size()))};
    ex.target(0, std::find(order.begin(), order.end(), labels[i]) - order.begin()) = 1.0;
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
  opt.selection = cfg.early_stopping ? internal::Selection::kMaxValF1 : internal::Selection::kLastEpoch;
  opt.patience = cfg.early_stopping ? cfg.patience : 0;
  opt.adam = AdamConfig{cfg.learning_rate, 0.9, 0.999, cfg.adam_epsilon, cfg.weight_decay, cfg.clip_norm};
  opt.seed = cfg.seed;
  opt.chunk_size = cfg.chunk_size;
  if (cfg.chunk_size > 0 && !cfg.chunk_checkpoint_dir.empty()) {
    opt.after_chunk = [&](int epoch, size_t chunk) {
      std::filesystem::path dir = std::filesystem::path(cfg.chunk_checkpoint_dir) /
                                  ("epoch" + std::to_string(epoch) + "-chunk" + std::to_string(chunk));
      save_classifier(m, TrainingHistory{}, dir);
    };
  }
  result.decayed_parameters = AdamW(m.parameters(), opt.adam).decayed_parameters();
  result.history = internal::train_loop(m, make_train, result.split.train.size(), validation, opt);
  return result;
}

}  // namespace ocp::nn
