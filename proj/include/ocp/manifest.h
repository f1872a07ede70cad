#ifndef OCP_MANIFEST_H_
#define OCP_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace ocp {

// UTC ISO-8601 time; SOURCE_DATE_EPOCH, when set, replaces the clock so
// repeated runs produce byte-identical manifests.
std::string utc_timestamp();

// Run record written next to every training, evaluation, conversion and
// augmentation output.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> invocation);

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_seed(uint64_t seed) { seed_ = seed; }
  void add_input(const std::filesystem::path& path);
  // Files are hashed when the manifest is finished; directories contribute
  // every regular file inside them.
  void add_output(const std::filesystem::path& path);
  void set_metric(const std::string& key, nlohmann::json value) { metrics_[key] = std::move(value); }
  void add_note(const std::string& note) { notes_.push_back(note); }
  void fail(const std::string& message, int exit_code);

  nlohmann::json finish();
  void write(const std::filesystem::path& path);

  const nlohmann::json& config() const { return config_; }

 private:
  std::string command_;
  std::vector<std::string> invocation_;
  std::string working_directory_;
  nlohmann::json config_ = nlohmann::json::object();
  uint64_t seed_ = 0;
  nlohmann::json inputs_ = nlohmann::json::array();
  std::vector<std::filesystem::path> outputs_;
  nlohmann::json metrics_ = nlohmann::json::object();
  std::vector<std::string> notes_;
  std::string started_at_;
  std::string status_ = "ok";
  std::string error_;
  int exit_code_ = 0;
};

}  // namespace ocp

#endif  // OCP_MANIFEST_H_
