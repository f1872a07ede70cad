#ifndef OCP_CORPUS_H_
#define OCP_CORPUS_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ocp {

enum class Task { kA, kB, kC };
enum class Language { kEn, kDa, kEl, kTr, kAr };
enum class Label { kOff, kNot, kTin, kUnt, kInd, kGrp, kOth };

std::string_view to_string(Task task);
std::string_view to_string(Language language);
std::string_view to_string(Label label);
Task parse_task(std::string_view text);
Language parse_language(std::string_view text);
// Throws UnknownLabel when `text` is not in the task's label set.
Label parse_label(Task task, std::string_view text);

// Label sets in priority order: A {OFF, NOT}, B {TIN, UNT},
// C {IND, GRP, OTH}. The order doubles as the argmax tie-break priority.
const std::vector<Label>& label_set(Task task);
Task task_of(Label label);

struct HardLabel {
  Task task;
  Label value;
  bool operator==(const HardLabel&) const = default;
};

// Sub-task A: mean offensiveness.
struct SoftScoreA {
  double mean = 0.0;
  double std = 0.0;
  bool operator==(const SoftScoreA&) const = default;
};

// Sub-task B: closeness to UNT.
struct SoftScoreB {
  double mean = 0.0;
  double std = 0.0;
  bool operator==(const SoftScoreB&) const = default;
};

// Sub-task C: distribution over IND, GRP, OTH.
struct SoftScoreC {
  double p_ind = 0.0;
  double p_grp = 0.0;
  double p_oth = 0.0;
  bool operator==(const SoftScoreC&) const = default;
};

using Payload =
    std::variant<std::monostate, HardLabel, SoftScoreA, SoftScoreB, SoftScoreC>;

enum class PayloadKind { kNone, kHard, kSoft };

struct TweetRecord {
  std::string id;
  std::string text;
  Language language = Language::kEn;
  Payload payload;
  bool operator==(const TweetRecord&) const = default;
};

// Ordered, validated, immutable collection of records for one task and one
// language. All records carry the same payload kind.
class Dataset {
 public:
  // Validates id uniqueness, non-empty text, language and payload
  // consistency; throws ocp::Error.
  Dataset(Task task, Language language, PayloadKind kind,
          std::vector<TweetRecord> records, std::string provenance = {});

  Task task() const { return task_; }
  Language language() const { return language_; }
  PayloadKind payload_kind() const { return kind_; }
  const std::string& provenance() const { return provenance_; }
  const std::vector<TweetRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const TweetRecord& operator[](size_t i) const { return records_[i]; }

  // Hard label of record i; throws UnlabeledRecord if it has none.
  Label label(size_t i) const;
  std::vector<Label> labels() const;
  std::vector<std::string> texts() const;
  Dataset subset(const std::vector<size_t>& indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  Task task_;
  Language language_;
  PayloadKind kind_;
  std::vector<TweetRecord> records_;
  std::string provenance_;
};

// OLID-style file: header with id, tweet and subtask_{a,b,c}. Rows whose
// label for `task` is NULL are skipped.
Dataset load_hard_tsv(const std::filesystem::path& path, Task task,
                      Language language);
// Same layout without a label column (test releases).
Dataset load_unlabeled_tsv(const std::filesystem::path& path, Task task,
                           Language language);
// Distant-supervision file: id, text, then average/std (A, B) or three
// per-label means (C), optionally followed by per-label std columns.
Dataset load_soft_tsv(const std::filesystem::path& path, Task task,
                      Language language);
// Attaches gold labels from an `id,label` CSV.
Dataset join_gold(const Dataset& test, const std::filesystem::path& labels);

constexpr std::string_view kCanonicalMagic = "#ocp-v1";

void save_canonical(const Dataset& ds, const std::filesystem::path& path);
Dataset load_canonical(const std::filesystem::path& path);
// Loads canonical files, falling back to OLID-style hard or unlabeled TSV
// depending on the header.
Dataset load_any(const std::filesystem::path& path, Task task,
                 Language language);

std::string escape_field(std::string_view text);
std::string unescape_field(std::string_view text);

}  // namespace ocp

#endif  // OCP_CORPUS_H_
