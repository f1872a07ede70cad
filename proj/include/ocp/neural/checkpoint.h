#ifndef OCP_NEURAL_CHECKPOINT_H_
#define OCP_NEURAL_CHECKPOINT_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "ocp/neural/classifier.h"
#include "ocp/neural/model.h"
#include "ocp/neural/soft_lstm.h"

namespace ocp::nn {

// Checkpoint directory layout: config.json, weights.bin, vocab.txt and
// history.csv.
void write_weights(const std::vector<Parameter>& params, const std::filesystem::path& path);
std::map<std::string, Matrix> read_weights(const std::filesystem::path& path);

void save_classifier(const NeuralClassifier& model, const TrainingHistory& history,
                     const std::filesystem::path& dir);
NeuralClassifier load_classifier(const std::filesystem::path& dir);
void save_soft_lstm(const SoftLstmModel& model, const TrainingHistory& history,
                    const std::filesystem::path& dir);
SoftLstmModel load_soft_lstm(const std::filesystem::path& dir);
// Either family, chosen by config.json.
std::unique_ptr<NeuralModel> load_neural_model(const std::filesystem::path& dir);
bool is_neural_checkpoint(const std::filesystem::path& dir);

// Local model registry: one classifier checkpoint directory per
// identifier under $OCP_MODEL_REGISTRY (default ./models).
std::filesystem::path model_registry_dir();
struct RegistryEntry {
  EncoderSpec encoder;
  WordTokenizer tokenizer;
  std::map<std::string, Matrix> weights;
  std::string revision;  // SHA-256 of weights.bin
};
// Throws ModelNotFound naming the directory searched.
RegistryEntry load_registry_entry(const std::string& identifier);
std::string registry_revision(const std::string& identifier);
void publish_to_registry(const NeuralClassifier& model, const std::string& identifier);

}  // namespace ocp::nn

#endif  // OCP_NEURAL_CHECKPOINT_H_
