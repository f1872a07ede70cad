#ifndef OCP_AUGMENT_H_
#define OCP_AUGMENT_H_

#include <chrono>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "ocp/corpus.h"

namespace ocp {

// translate() returns a non-empty string or throws. Implementations must
// tolerate concurrent calls.
class TranslationClient {
 public:
  virtual ~TranslationClient() = default;
  virtual std::string translate(const std::string& text, Language source, Language target) = 0;
  virtual std::string identity() const = 0;
};

// Offline stand-in: "[xx] text" for target language xx.
class StubClient : public TranslationClient {
 public:
  std::string translate(const std::string& text, Language source, Language target) override;
  std::string identity() const override { return "stub"; }
};

struct HttpClientConfig {
  std::string endpoint = "https://translation.googleapis.com/language/translate/v2";
  std::string api_key;
  double requests_per_second = 5.0;
  int timeout_seconds = 30;

  // OCP_TRANSLATE_API_KEY and OCP_TRANSLATE_ENDPOINT.
  static HttpClientConfig from_env();
};

// JSON-over-HTTPS client for v2-style translation endpoints: POST
// {q, source, target, format} with the key as a query parameter, reading
// data.translations[0].translatedText. Calls are spaced to respect the
// rate cap.
class HttpTranslationClient : public TranslationClient {
 public:
  // Throws Configuration when the key or endpoint is unusable.
  explicit HttpTranslationClient(HttpClientConfig cfg);

  std::string translate(const std::string& text, Language source, Language target) override;
  std::string identity() const override;

 private:
  void wait_for_slot();

  HttpClientConfig cfg_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point next_slot_{};
};

struct AugmentationRecord {
  std::string original_id;
  std::string new_id;
  Language source_language = Language::kEn;
  Language target_language = Language::kEn;
  std::string translated_text;
  std::string client;
  int attempts = 0;
};

struct SkippedRecord {
  std::string id;
  std::string reason;
  int attempts = 0;
};

struct AugmentOptions {
  int max_retries = 3;           // extra attempts after the first
  double backoff_seconds = 0.0;  // first retry delay, doubled each time
  size_t workers = 1;
};

struct TranslationResult {
  Dataset dataset;
  std::vector<AugmentationRecord> provenance;
  std::vector<SkippedRecord> skipped;
};

// Sub-task A records labelled OFF, order kept.
Dataset select_offensive(const Dataset& ds);

// Translates every text into `target`; ids gain a "-aug-<target>" suffix
// and payloads are carried over. Records that still fail after the retry
// cap are reported in `skipped`. Output order follows input order.
TranslationResult translate_dataset(const Dataset& ds, TranslationClient& client, Language target,
                                    const AugmentOptions& options = {});

// base followed by aug. Throws IdCollision, and InvalidArgument when the
// task or language differ or a sub-task A record in aug is not OFF.
Dataset merge_augmented(const Dataset& base, const Dataset& aug);

void write_provenance_jsonl(const std::vector<AugmentationRecord>& records,
                            const std::filesystem::path& path);
void write_skip_report(const std::vector<SkippedRecord>& skipped, const std::filesystem::path& path);

}  // namespace ocp

#endif  // OCP_AUGMENT_H_
