#include "ocp/augment.h"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <unordered_set>

#include "httplib.h"
#include "json.hpp"
#include "ocp/error.h"

namespace ocp {

using nlohmann::json;

std::string StubClient::translate(const std::string& text, Language, Language target) {
  return "[" + std::string(to_string(target)) + "] " + text;
}

HttpClientConfig HttpClientConfig::from_env() {
  HttpClientConfig cfg;
  if (const char* key = std::getenv("OCP_TRANSLATE_API_KEY")) cfg.api_key = key;
  if (const char* endpoint = std::getenv("OCP_TRANSLATE_ENDPOINT"); endpoint && *endpoint) {
    cfg.endpoint = endpoint;
  }
  return cfg;
}

namespace {

std::string percent_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

}  // namespace

HttpTranslationClient::HttpTranslationClient(HttpClientConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.api_key.empty()) {
    throw Error(ErrorCode::kConfiguration,
                "no translation API key; set OCP_TRANSLATE_API_KEY (and OCP_TRANSLATE_ENDPOINT for a "
                "non-default service)");
  }
  if (!(cfg_.requests_per_second > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "requests_per_second must be positive");
  }
  auto scheme_end = cfg_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfiguration, "translation endpoint '" + cfg_.endpoint + "' has no scheme");
  }
  auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
  base_ = cfg_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);
}

std::string HttpTranslationClient::identity() const { return "http:" + cfg_.endpoint; }

void HttpTranslationClient::wait_for_slot() {
  using clock = std::chrono::steady_clock;
  clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto now = clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + std::chrono::duration_cast<clock::duration>(
                            std::chrono::duration<double>(1.0 / cfg_.requests_per_second));
  }
  std::this_thread::sleep_until(slot);
}

std::string HttpTranslationClient::translate(const std::string& text, Language source, Language target) {
  wait_for_slot();
  httplib::Client client(base_);
  client.set_connection_timeout(cfg_.timeout_seconds);
  client.set_read_timeout(cfg_.timeout_seconds);
  json body{{"q", text},
            {"source", std::string(to_string(source))},
            {"target", std::string(to_string(target))},
            {"format", "text"}};
  std::string path = path_ + (path_.find('?') == std::string::npos ? "?" : "&") + "key=" +
                     percent_encode(cfg_.api_key);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kTranslationFailure, "request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kTranslationFailure, "HTTP status " + std::to_string(res->status));
  }
  try {
    json reply = json::parse(res->body);
    std::string out = reply.at("data").at("translations").at(0).at("translatedText").get<std::string>();
    if (out.empty()) throw Error(ErrorCode::kTranslationFailure, "empty translation");
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kTranslationFailure, std::string("unexpected response: ") + e.what());
  }
}

Dataset select_offensive(const Dataset& ds) {
  if (ds.task() != Task::kA) {
    throw Error(ErrorCode::kInvalidArgument, "offensive selection needs a sub-task A dataset");
  }
  std::vector<size_t> keep;
  for (size_t i = 0; i < ds.size(); ++i) {
    if (ds.label(i) == Label::kOff) keep.push_back(i);
  }
  return ds.subset(keep);
}

TranslationResult translate_dataset(const Dataset& ds, TranslationClient& client, Language target,
                                    const AugmentOptions& options) {
  if (target == ds.language()) {
    throw Error(ErrorCode::kInvalidArgument, "target language equals the source language");
  }
  if (options.max_retries < 0) throw Error(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
  const std::string suffix = "-aug-" + std::string(to_string(target));
  const std::string identity = client.identity();

  struct Outcome {
    bool ok = false;
    std::string text;
    std::string reason;
    int attempts = 0;
  };
  std::vector<Outcome> outcomes(ds.size());
  auto work = [&](size_t i) {
    Outcome& out = outcomes[i];
    double delay = options.backoff_seconds;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
      if (attempt > 0 && delay > 0.0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        delay *= 2.0;
      }
      ++out.attempts;
      try {
        std::string t = client.translate(ds[i].text, ds.language(), target);
        if (t.empty()) throw Error(ErrorCode::kTranslationFailure, "empty translation");
        out.ok = true;
        out.text = std::move(t);
        return;
      } catch (const std::exception& e) {
        out.reason = e.what();
      }
    }
  };
  size_t workers = std::max<size_t>(1, std::min(options.workers, ds.size()));
  if (workers == 1) {
    for (size_t i = 0; i < ds.size(); ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < ds.size(); i = next++) work(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  std::vector<TweetRecord> records;
  std::vector<AugmentationRecord> provenance;
  std::vector<SkippedRecord> skipped;
  for (size_t i = 0; i < ds.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (!o.ok) {
      skipped.push_back({ds[i].id, o.reason, o.attempts});
      continue;
    }
    TweetRecord r{ds[i].id + suffix, o.text, target, ds[i].payload};
    provenance.push_back({ds[i].id, r.id, ds.language(), target, o.text, identity, o.attempts});
    records.push_back(std::move(r));
  }
  std::string note = ds.provenance();
  if (!note.empty()) note += "; ";
  note += "translated " + std::string(to_string(ds.language())) + "->" + std::string(to_string(target)) +
          " by " + identity;
  return {Dataset(ds.task(), target, ds.payload_kind(), std::move(records), note), std::move(provenance),
          std::move(skipped)};
}

Dataset merge_augmented(const Dataset& base, const Dataset& aug) {
  if (aug.empty()) return base;
  if (base.task() != aug.task()) throw Error(ErrorCode::kInvalidArgument, "merged datasets differ in task");
  if (base.language() != aug.language()) {
    throw Error(ErrorCode::kInvalidArgument, "augmentation language " + std::string(to_string(aug.language())) +
                                                 " differs from base " + std::string(to_string(base.language())));
  }
  if (base.payload_kind() != aug.payload_kind()) {
    throw Error(ErrorCode::kInvalidArgument, "merged datasets differ in payload kind");
  }
  std::unordered_set<std::string> ids;
  for (const TweetRecord& r : base.records()) ids.insert(r.id);
  std::vector<TweetRecord> records = base.records();
  for (size_t i = 0; i < aug.size(); ++i) {
    const TweetRecord& r = aug[i];
    if (!ids.insert(r.id).second) throw Error(ErrorCode::kIdCollision, "id '" + r.id + "' already present");
    if (aug.task() == Task::kA && aug.label(i) != Label::kOff) {
      throw Error(ErrorCode::kInvalidArgument, "augmentation record '" + r.id + "' is not OFF");
    }
    records.push_back(r);
  }
  std::string note = base.provenance();
  if (!aug.provenance().empty()) note += (note.empty() ? "" : " + ") + aug.provenance();
  return Dataset(base.task(), base.language(), base.payload_kind(), std::move(records), note);
}

void write_provenance_jsonl(const std::vector<AugmentationRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  for (const AugmentationRecord& r : records) {
    out << json{{"original_id", r.original_id},
                {"id", r.new_id},
                {"source_language", to_string(r.source_language)},
                {"target_language", to_string(r.target_language)},
                {"translated_text", r.translated_text},
                {"client", r.client},
                {"attempts", r.attempts}}
               .dump()
        << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

void write_skip_report(const std::vector<SkippedRecord>& skipped, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  for (const SkippedRecord& s : skipped) {
    out << json{{"id", s.id}, {"reason", s.reason}, {"attempts", s.attempts}}.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

}  // namespace ocp
