#include "ocp/manifest.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "ocp/error.h"
#include "ocp/hash.h"

namespace ocp {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_timestamp() {
  std::time_t t;
  const char* sde = std::getenv("SOURCE_DATE_EPOCH");
  if (sde && *sde) {
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> invocation)
    : command_(std::move(command)),
      invocation_(std::move(invocation)),
      working_directory_(fs::current_path().string()),
      started_at_(utc_timestamp()) {}

void RunManifest::add_input(const fs::path& path) {
  json entry{{"path", path.string()}};
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) {
    entry["sha256"] = sha256_file(path);
    entry["bytes"] = fs::file_size(path);
  } else {
    entry["sha256"] = nullptr;
  }
  inputs_.push_back(entry);
}

void RunManifest::add_output(const fs::path& path) { outputs_.push_back(path); }

void RunManifest::fail(const std::string& message, int exit_code) {
  status_ = "failed";
  error_ = message;
  exit_code_ = exit_code;
}

json RunManifest::finish() {
  json outputs = json::array();
  for (const fs::path& p : outputs_) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& f : files) outputs.push_back({{"path", f.string()}, {"sha256", sha256_file(f)}});
    } else if (fs::is_regular_file(p, ec)) {
      outputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    } else {
      outputs.push_back({{"path", p.string()}, {"sha256", nullptr}, {"missing", true}});
    }
  }
  json j{{"manifest_version", 1},
         {"command", command_},
         {"invocation", invocation_},
         {"working_directory", working_directory_},
         {"config", config_},
         {"seed", seed_},
         {"inputs", inputs_},
         {"code_version", OCP_VERSION},
         {"started_at", started_at_},
         {"finished_at", utc_timestamp()},
         {"outputs", outputs},
         {"metrics", metrics_},
         {"status", status_},
         {"exit_code", exit_code_}};
  if (!notes_.empty()) j["notes"] = notes_;
  if (!error_.empty()) j["error"] = error_;
  return j;
}

void RunManifest::write(const fs::path& path) {
  json j = finish();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

}  // namespace ocp
