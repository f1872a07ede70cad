#include "ocp/neural/checkpoint.h"

#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "ocp/error.h"
#include "ocp/hash.h"

namespace ocp::nn {

static_assert(std::endian::native == std::endian::little, "weights.bin is little-endian");

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kWeightsMagic[8] = {'O', 'C', 'P', 'W', '0', '0', '0', '1'};
constexpr const char* kCheckpointFormat = "ocp-neural-v1";

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const fs::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw Error(ErrorCode::kIoFailure, path.string() + " is truncated");
  }
  return v;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIoFailure, path.string() + ": " + e.what());
  }
}

json read_config(const fs::path& dir) {
  json j = read_json(dir / "config.json");
  if (j.value("format", "") != kCheckpointFormat) {
    throw Error(ErrorCode::kSchemaVersionMismatch, (dir / "config.json").string() + " is not a " +
                                                       kCheckpointFormat + " checkpoint");
  }
  return j;
}

json labels_json(const std::vector<Label>& labels) {
  json out = json::array();
  for (Label l : labels) out.push_back(to_string(l));
  return out;
}

std::vector<Label> labels_from_json(const json& j) {
  std::vector<Label> out;
  for (const json& item : j) {
    std::string name = item.get<std::string>();
    bool found = false;
    for (Task t : {Task::kA, Task::kB, Task::kC}) {
      for (Label l : label_set(t)) {
        if (to_string(l) == name) {
          out.push_back(l);
          found = true;
        }
      }
    }
    if (!found) throw Error(ErrorCode::kUnknownLabel, "unknown label '" + name + "' in checkpoint");
  }
  return out;
}

void assign_weights(const std::vector<Parameter>& params, const std::map<std::string, Matrix>& weights,
                    const fs::path& dir) {
  for (const Parameter& p : params) {
    auto it = weights.find(p.name);
    if (it == weights.end()) {
      throw Error(ErrorCode::kIncompatibleDims, dir.string() + " lacks weight " + p.name);
    }
    if (it->second.rows() != p.var->value.rows() || it->second.cols() != p.var->value.cols()) {
      throw Error(ErrorCode::kIncompatibleDims, dir.string() + ": weight " + p.name + " has the wrong shape");
    }
    p.var->value = it->second;
  }
}

void write_common(const std::vector<Parameter>& params, const TrainingHistory& history, const fs::path& dir) {
  write_weights(params, dir / "weights.bin");
  write_history_csv(history, dir / "history.csv");
}

TrainingHistory read_history_if_present(const fs::path& dir, int best_epoch) {
  TrainingHistory h;
  if (fs::exists(dir / "history.csv")) h = read_history_csv(dir / "history.csv");
  h.best_epoch = best_epoch;
  return h;
}

}  // namespace

void write_weights(const std::vector<Parameter>& params, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out.write(kWeightsMagic, sizeof kWeightsMagic);
  put<uint64_t>(out, params.size());
  for (const Parameter& p : params) {
    put<uint32_t>(out, static_cast<uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put<uint64_t>(out, static_cast<uint64_t>(p.var->value.rows()));
    put<uint64_t>(out, static_cast<uint64_t>(p.var->value.cols()));
    out.write(reinterpret_cast<const char*>(p.var->value.data()),
              static_cast<std::streamsize>(p.var->value.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

std::map<std::string, Matrix> read_weights(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kWeightsMagic, sizeof magic) != 0) {
    throw Error(ErrorCode::kSchemaVersionMismatch, path.string() + " is not a weights file");
  }
  uint64_t count = get<uint64_t>(in, path);
  std::map<std::string, Matrix> out;
  for (uint64_t k = 0; k < count; ++k) {
    uint32_t len = get<uint32_t>(in, path);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw Error(ErrorCode::kIoFailure, path.string() + " is truncated");
    uint64_t rows = get<uint64_t>(in, path);
    uint64_t cols = get<uint64_t>(in, path);
    Matrix m(static_cast<long>(rows), static_cast<long>(cols));
    if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)))) {
      throw Error(ErrorCode::kIoFailure, path.string() + " is truncated");
    }
    out.emplace(std::move(name), std::move(m));
  }
  return out;
}

void save_classifier(const NeuralClassifier& model, const TrainingHistory& history, const fs::path& dir) {
  if (!model.tokenizer()) throw Error(ErrorCode::kTokenizerMismatch, "cannot save a model without a tokenizer");
  fs::create_directories(dir);
  json cfg{{"format", kCheckpointFormat},
           {"family", "finetune"},
           {"encoder", to_json(model.encoder_spec())},
           {"head", to_json(model.head_spec())},
           {"n_classes", model.n_classes()},
           {"labels", labels_json(model.labels())},
           {"max_sequence_length", model.max_sequence_length()},
           {"preprocess", to_string(model.preset())},
           {"best_epoch", history.best_epoch}};
  write_json(cfg, dir / "config.json");
  model.tokenizer()->save(dir / "vocab.txt");
  write_common(model.parameters(), history, dir);
}

NeuralClassifier load_classifier(const fs::path& dir) {
  json cfg = read_config(dir);
  if (cfg.value("family", "") != "finetune") {
    throw Error(ErrorCode::kSchemaVersionMismatch, dir.string() + " is not a fine-tuned classifier");
  }
  try {
    EncoderSpec enc = encoder_spec_from_json(cfg.at("encoder"));
    HeadSpec head = head_spec_from_json(cfg.at("head"));
    NeuralClassifier model(enc, head, cfg.at("n_classes").get<size_t>(), 0);
    assign_weights(model.parameters(), read_weights(dir / "weights.bin"), dir);
    model.set_tokenizer(WordTokenizer::load(dir / "vocab.txt", enc.cased));
    model.set_labels(labels_from_json(cfg.at("labels")));
    model.set_max_sequence_length(cfg.at("max_sequence_length").get<size_t>());
    model.set_preset(parse_preset(cfg.at("preprocess").get<std::string>()));
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaVersionMismatch, dir.string() + ": " + e.what());
  }
}

void save_soft_lstm(const SoftLstmModel& model, const TrainingHistory& history, const fs::path& dir) {
  fs::create_directories(dir);
  json cfg{{"format", kCheckpointFormat},
           {"family", "soft_lstm"},
           {"config", to_json(model.config())},
           {"labels", labels_json(model.labels())},
           {"best_epoch", history.best_epoch}};
  write_json(cfg, dir / "config.json");
  model.tokenizer().save(dir / "vocab.txt");
  write_common(model.parameters(), history, dir);
}

SoftLstmModel load_soft_lstm(const fs::path& dir) {
  json cfg = read_config(dir);
  if (cfg.value("family", "") != "soft_lstm") {
    throw Error(ErrorCode::kSchemaVersionMismatch, dir.string() + " is not a soft-label LSTM");
  }
  try {
    SoftLstmModel model(soft_lstm_config_from_json(cfg.at("config")), WordTokenizer::load(dir / "vocab.txt", false));
    assign_weights(model.parameters(), read_weights(dir / "weights.bin"), dir);
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaVersionMismatch, dir.string() + ": " + e.what());
  }
}

bool is_neural_checkpoint(const fs::path& dir) {
  return fs::is_directory(dir) && fs::exists(dir / "config.json") && fs::exists(dir / "weights.bin");
}

std::unique_ptr<NeuralModel> load_neural_model(const fs::path& dir) {
  std::string family = read_config(dir).value("family", "");
  if (family == "finetune") return std::make_unique<NeuralClassifier>(load_classifier(dir));
  if (family == "soft_lstm") return std::make_unique<SoftLstmModel>(load_soft_lstm(dir));
  throw Error(ErrorCode::kSchemaVersionMismatch, dir.string() + ": unknown model family '" + family + "'");
}

fs::path model_registry_dir() {
  const char* env = std::getenv("OCP_MODEL_REGISTRY");
  return env && *env ? fs::path(env) : fs::path("models");
}

namespace {

fs::path registry_entry_dir(const std::string& identifier) {
  fs::path rel(identifier);
  bool bad = identifier.empty() || rel.is_absolute();
  for (const fs::path& part : rel) bad = bad || part == "..";
  if (bad) throw Error(ErrorCode::kModelNotFound, "invalid registry identifier '" + identifier + "'");
  fs::path dir = model_registry_dir() / rel;
  if (!is_neural_checkpoint(dir)) {
    throw Error(ErrorCode::kModelNotFound,
                "model '" + identifier + "' not found in registry " + model_registry_dir().string() +
                    " (set OCP_MODEL_REGISTRY or publish the encoder there first)");
  }
  return dir;
}

}  // namespace

RegistryEntry load_registry_entry(const std::string& identifier) {
  fs::path dir = registry_entry_dir(identifier);
  json cfg = read_config(dir);
  RegistryEntry entry;
  try {
    entry.encoder = encoder_spec_from_json(cfg.at("encoder"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaVersionMismatch, dir.string() + ": " + e.what());
  }
  entry.tokenizer = WordTokenizer::load(dir / "vocab.txt", entry.encoder.cased);
  entry.weights = read_weights(dir / "weights.bin");
  entry.revision = sha256_file(dir / "weights.bin");
  return entry;
}

std::string registry_revision(const std::string& identifier) {
  return sha256_file(registry_entry_dir(identifier) / "weights.bin");
}

void publish_to_registry(const NeuralClassifier& model, const std::string& identifier) {
  fs::path rel(identifier);
  for (const fs::path& part : rel) {
    if (part == ".." || rel.is_absolute()) {
      throw Error(ErrorCode::kInvalidArgument, "invalid registry identifier '" + identifier + "'");
    }
  }
  save_classifier(model, TrainingHistory{}, model_registry_dir() / rel);
}

}  // namespace ocp::nn
