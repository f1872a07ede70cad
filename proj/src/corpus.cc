#include "ocp/corpus.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ocp/error.h"
#include "ocp/utf8.h"

namespace ocp {

namespace {

constexpr double kStochasticTolerance = 1e-3;

struct Line {
  int number;
  std::string text;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Splits on LF, strips a trailing CR and drops blank lines.
std::vector<Line> read_lines(const std::filesystem::path& path) {
  std::string content = read_file(path);
  std::vector<Line> lines;
  size_t start = 0;
  int number = 0;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++number;
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back({number, std::move(line)});
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t end = line.find(sep, start);
    if (end == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, end - start));
    start = end + 1;
  }
}

int find_column(const std::vector<std::string>& header,
                std::initializer_list<std::string_view> names) {
  for (size_t i = 0; i < header.size(); ++i) {
    std::string folded = utf8::fold_case(utf8::trim(header[i]));
    for (std::string_view name : names) {
      if (folded == name) return static_cast<int>(i);
    }
  }
  return -1;
}

int require_column(const std::vector<std::string>& header,
                   std::initializer_list<std::string_view> names,
                   const std::filesystem::path& path) {
  int col = find_column(header, names);
  if (col < 0) {
    throw Error(ErrorCode::kMissingColumn,
                std::string(*names.begin()) + " missing from header of " +
                    path.string(),
                1);
  }
  return col;
}

double parse_real(std::string_view text, int line) {
  std::string_view t = utf8::trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() ||
      !std::isfinite(value)) {
    throw Error(ErrorCode::kMalformedRow,
                "not a number: '" + std::string(text) + "'", line);
  }
  return value;
}

std::string format_real(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void check_text(const std::string& text, int line) {
  if (utf8::trim(text).empty()) {
    throw Error(ErrorCode::kEmptyText, "empty tweet text", line);
  }
}

std::string_view subtask_column(Task task) {
  switch (task) {
    case Task::kA: return "subtask_a";
    case Task::kB: return "subtask_b";
    case Task::kC: return "subtask_c";
  }
  return "";
}

std::string provenance_for(const std::filesystem::path& path) {
  return path.filename().string();
}

// Shared by the labeled and unlabeled OLID-style loaders.
Dataset load_olid(const std::filesystem::path& path, Task task,
                  Language language, bool labeled) {
  std::vector<Line> lines = read_lines(path);
  if (lines.empty()) {
    throw Error(ErrorCode::kMissingColumn, "no header in " + path.string(), 1);
  }
  std::vector<std::string> header = split(lines[0].text, '\t');
  int id_col = require_column(header, {"id"}, path);
  int text_col = require_column(header, {"tweet", "text"}, path);
  int label_col = -1;
  if (labeled) {
    std::string_view name = subtask_column(task);
    label_col = require_column(header, {name}, path);
  }
  std::vector<TweetRecord> records;
  std::unordered_set<std::string> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    std::vector<std::string> fields = split(line.text, '\t');
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()),
                  line.number);
    }
    TweetRecord record;
    record.id = std::string(utf8::trim(fields[id_col]));
    record.text = fields[text_col];
    record.language = language;
    if (labeled) {
      std::string_view cell = utf8::trim(fields[label_col]);
      if (cell == "NULL") continue;
      try {
        record.payload = HardLabel{task, parse_label(task, cell)};
      } catch (const Error& e) {
        throw Error(e.code(), std::string(cell) + " is not a label of sub-task " +
                                  std::string(to_string(task)),
                    line.number);
      }
    }
    if (record.id.empty()) {
      throw Error(ErrorCode::kMalformedRow, "empty id", line.number);
    }
    check_text(record.text, line.number);
    if (!seen.insert(record.id).second) {
      throw Error(ErrorCode::kDuplicateId, "id " + record.id, line.number);
    }
    records.push_back(std::move(record));
  }
  return Dataset(task, language, labeled ? PayloadKind::kHard : PayloadKind::kNone,
                 std::move(records), provenance_for(path));
}

void check_unit_interval(double value, std::string_view what, int line) {
  if (value < 0.0 || value > 1.0) {
    throw Error(ErrorCode::kOutOfRangeScore,
                std::string(what) + " " + format_real(value) +
                    " outside [0, 1]",
                line);
  }
}

void check_payload(const Payload& payload, Task task, PayloadKind kind,
                   const std::string& id) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, "record " + id + ": " + why);
  };
  switch (kind) {
    case PayloadKind::kNone:
      if (!std::holds_alternative<std::monostate>(payload)) {
        fail("unlabeled dataset carries a payload");
      }
      break;
    case PayloadKind::kHard: {
      const auto* hard = std::get_if<HardLabel>(&payload);
      if (hard == nullptr) fail("missing hard label");
      if (hard->task != task || task_of(hard->value) != task) {
        fail("label belongs to another sub-task");
      }
      break;
    }
    case PayloadKind::kSoft: {
      bool ok = (task == Task::kA && std::holds_alternative<SoftScoreA>(payload)) ||
                (task == Task::kB && std::holds_alternative<SoftScoreB>(payload)) ||
                (task == Task::kC && std::holds_alternative<SoftScoreC>(payload));
      if (!ok) fail("soft payload does not match the sub-task");
      break;
    }
  }
}

std::string_view kind_name(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kNone: return "none";
    case PayloadKind::kHard: return "hard";
    case PayloadKind::kSoft: return "soft";
  }
  return "";
}

PayloadKind parse_kind(std::string_view text, int line) {
  if (text == "none") return PayloadKind::kNone;
  if (text == "hard") return PayloadKind::kHard;
  if (text == "soft") return PayloadKind::kSoft;
  throw Error(ErrorCode::kMalformedRow, "unknown payload kind " + std::string(text),
              line);
}

std::vector<std::string> payload_columns(Task task, PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kNone: return {};
    case PayloadKind::kHard: return {"label"};
    case PayloadKind::kSoft:
      switch (task) {
        case Task::kA: return {"soft_a_mean", "soft_a_std"};
        case Task::kB: return {"soft_b_mean", "soft_b_std"};
        case Task::kC: return {"p_ind", "p_grp", "p_oth"};
      }
  }
  return {};
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kA: return "A";
    case Task::kB: return "B";
    case Task::kC: return "C";
  }
  return "?";
}

std::string_view to_string(Language language) {
  switch (language) {
    case Language::kEn: return "en";
    case Language::kDa: return "da";
    case Language::kEl: return "el";
    case Language::kTr: return "tr";
    case Language::kAr: return "ar";
  }
  return "?";
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kOff: return "OFF";
    case Label::kNot: return "NOT";
    case Label::kTin: return "TIN";
    case Label::kUnt: return "UNT";
    case Label::kInd: return "IND";
    case Label::kGrp: return "GRP";
    case Label::kOth: return "OTH";
  }
  return "?";
}

Task parse_task(std::string_view text) {
  if (text == "A" || text == "a") return Task::kA;
  if (text == "B" || text == "b") return Task::kB;
  if (text == "C" || text == "c") return Task::kC;
  throw Error(ErrorCode::kInvalidArgument, "unknown task " + std::string(text));
}

Language parse_language(std::string_view text) {
  for (Language l : {Language::kEn, Language::kDa, Language::kEl,
                     Language::kTr, Language::kAr}) {
    if (text == to_string(l)) return l;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown language " + std::string(text));
}

const std::vector<Label>& label_set(Task task) {
  static const std::vector<Label> kA = {Label::kOff, Label::kNot};
  static const std::vector<Label> kB = {Label::kTin, Label::kUnt};
  static const std::vector<Label> kC = {Label::kInd, Label::kGrp, Label::kOth};
  switch (task) {
    case Task::kA: return kA;
    case Task::kB: return kB;
    case Task::kC: return kC;
  }
  return kA;
}

Task task_of(Label label) {
  switch (label) {
    case Label::kOff:
    case Label::kNot: return Task::kA;
    case Label::kTin:
    case Label::kUnt: return Task::kB;
    default: return Task::kC;
  }
}

Label parse_label(Task task, std::string_view text) {
  for (Label l : label_set(task)) {
    if (text == to_string(l)) return l;
  }
  throw Error(ErrorCode::kUnknownLabel,
              "'" + std::string(text) + "' is not a label of sub-task " +
                  std::string(to_string(task)));
}

Dataset::Dataset(Task task, Language language, PayloadKind kind,
                 std::vector<TweetRecord> records, std::string provenance)
    : task_(task),
      language_(language),
      kind_(kind),
      records_(std::move(records)),
      provenance_(std::move(provenance)) {
  std::unordered_set<std::string_view> ids;
  ids.reserve(records_.size());
  for (const TweetRecord& r : records_) {
    if (r.id.empty()) throw Error(ErrorCode::kInvalidArgument, "empty id");
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::kDuplicateId, "id " + r.id);
    }
    if (utf8::trim(r.text).empty()) {
      throw Error(ErrorCode::kEmptyText, "record " + r.id);
    }
    if (r.language != language_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "record " + r.id + " has language " +
                      std::string(to_string(r.language)) + ", dataset is " +
                      std::string(to_string(language_)));
    }
    check_payload(r.payload, task_, kind_, r.id);
  }
}

Label Dataset::label(size_t i) const {
  const auto* hard = std::get_if<HardLabel>(&records_.at(i).payload);
  if (hard == nullptr) {
    throw Error(ErrorCode::kUnlabeledRecord, "record " + records_[i].id);
  }
  return hard->value;
}

std::vector<Label> Dataset::labels() const {
  std::vector<Label> out;
  out.reserve(records_.size());
  for (size_t i = 0; i < records_.size(); ++i) out.push_back(label(i));
  return out;
}

std::vector<std::string> Dataset::texts() const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const TweetRecord& r : records_) out.push_back(r.text);
  return out;
}

Dataset Dataset::subset(const std::vector<size_t>& indices) const {
  std::vector<TweetRecord> picked;
  picked.reserve(indices.size());
  for (size_t i : indices) picked.push_back(records_.at(i));
  return Dataset(task_, language_, kind_, std::move(picked), provenance_);
}

Dataset load_hard_tsv(const std::filesystem::path& path, Task task,
                      Language language) {
  return load_olid(path, task, language, /*labeled=*/true);
}

Dataset load_unlabeled_tsv(const std::filesystem::path& path, Task task,
                           Language language) {
  return load_olid(path, task, language, /*labeled=*/false);
}

Dataset load_soft_tsv(const std::filesystem::path& path, Task task,
                      Language language) {
  std::vector<Line> lines = read_lines(path);
  if (lines.empty()) {
    throw Error(ErrorCode::kMissingColumn, "no header in " + path.string(), 1);
  }
  std::vector<std::string> header = split(lines[0].text, '\t');
  int id_col = require_column(header, {"id"}, path);
  int text_col = require_column(header, {"text", "tweet"}, path);
  std::vector<int> score_cols;
  if (task == Task::kC) {
    int ind = find_column(header, {"average_ind", "avg_ind", "mean_ind", "ind"});
    int grp = find_column(header, {"average_grp", "avg_grp", "mean_grp", "grp"});
    int oth = find_column(header, {"average_oth", "avg_oth", "mean_oth", "oth"});
    if (ind >= 0 && grp >= 0 && oth >= 0) {
      score_cols = {ind, grp, oth};
    } else {
      // Positional fallback: the three means follow id and text, with an
      // optional block of three std columns after them.
      size_t numeric = header.size() - 2;
      if (id_col != 0 || text_col != 1 || (numeric != 3 && numeric != 6)) {
        throw Error(ErrorCode::kMissingColumn,
                    "task C file needs IND/GRP/OTH mean columns: " +
                        path.string(),
                    1);
      }
      score_cols = {2, 3, 4};
    }
  } else {
    score_cols.push_back(
        require_column(header, {"average", "avg", "mean"}, path));
    score_cols.push_back(require_column(header, {"std", "stddev"}, path));
  }

  std::vector<TweetRecord> records;
  std::unordered_set<std::string> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    std::vector<std::string> fields = split(line.text, '\t');
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()),
                  line.number);
    }
    TweetRecord record;
    record.id = std::string(utf8::trim(fields[id_col]));
    record.text = fields[text_col];
    record.language = language;
    if (record.id.empty()) {
      throw Error(ErrorCode::kMalformedRow, "empty id", line.number);
    }
    check_text(record.text, line.number);
    if (task == Task::kC) {
      double p[3];
      for (int k = 0; k < 3; ++k) {
        p[k] = parse_real(fields[score_cols[k]], line.number);
        check_unit_interval(p[k], "mean", line.number);
      }
      double sum = p[0] + p[1] + p[2];
      if (std::abs(sum - 1.0) > kStochasticTolerance) {
        throw Error(ErrorCode::kNonStochasticVector,
                    "means of record " + record.id + " sum to " +
                        format_real(sum),
                    line.number);
      }
      record.payload = SoftScoreC{p[0] / sum, p[1] / sum, p[2] / sum};
    } else {
      double mean = parse_real(fields[score_cols[0]], line.number);
      double std = parse_real(fields[score_cols[1]], line.number);
      check_unit_interval(mean, "mean", line.number);
      if (std < 0.0) {
        throw Error(ErrorCode::kOutOfRangeScore,
                    "negative std " + format_real(std), line.number);
      }
      if (task == Task::kA) {
        record.payload = SoftScoreA{mean, std};
      } else {
        record.payload = SoftScoreB{mean, std};
      }
    }
    if (!seen.insert(record.id).second) {
      throw Error(ErrorCode::kDuplicateId, "id " + record.id, line.number);
    }
    records.push_back(std::move(record));
  }
  return Dataset(task, language, PayloadKind::kSoft, std::move(records),
                 provenance_for(path));
}

Dataset join_gold(const Dataset& test, const std::filesystem::path& labels) {
  std::vector<Line> lines = read_lines(labels);
  std::unordered_map<std::string, Label> gold;
  for (const Line& line : lines) {
    size_t comma = line.text.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kMalformedRow, "expected id,label", line.number);
    }
    std::string id(utf8::trim(std::string_view(line.text).substr(0, comma)));
    std::string_view cell =
        utf8::trim(std::string_view(line.text).substr(comma + 1));
    Label label;
    try {
      label = parse_label(test.task(), cell);
    } catch (const Error& e) {
      throw Error(ErrorCode::kUnknownLabel,
                  "'" + std::string(cell) + "' for id " + id, line.number);
    }
    if (!gold.emplace(id, label).second) {
      throw Error(ErrorCode::kDuplicateId, "id " + id + " in gold labels",
                  line.number);
    }
  }
  std::vector<TweetRecord> records = test.records();
  for (TweetRecord& r : records) {
    auto it = gold.find(r.id);
    if (it == gold.end()) {
      throw Error(ErrorCode::kUnmatchedId,
                  "test id " + r.id + " has no gold label");
    }
    r.payload = HardLabel{test.task(), it->second};
  }
  return Dataset(test.task(), test.language(), PayloadKind::kHard,
                 std::move(records), test.provenance());
}

std::string escape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_field(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '\\' || i + 1 == text.size()) {
      out.push_back(c);
      continue;
    }
    char next = text[++i];
    switch (next) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case '\\': out.push_back('\\'); break;
      default:
        out.push_back('\\');
        out.push_back(next);
    }
  }
  return out;
}

void save_canonical(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << kCanonicalMagic << "\tid\ttext";
  for (const std::string& col : payload_columns(ds.task(), ds.payload_kind())) {
    out << '\t' << col;
  }
  out << "\n#meta\ttask=" << to_string(ds.task())
      << "\tlanguage=" << to_string(ds.language())
      << "\tkind=" << kind_name(ds.payload_kind())
      << "\tprovenance=" << escape_field(ds.provenance()) << '\n';
  for (const TweetRecord& r : ds.records()) {
    out << escape_field(r.id) << '\t' << escape_field(r.text);
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, HardLabel>) {
            out << '\t' << to_string(p.value);
          } else if constexpr (std::is_same_v<T, SoftScoreA> ||
                               std::is_same_v<T, SoftScoreB>) {
            out << '\t' << format_real(p.mean) << '\t' << format_real(p.std);
          } else if constexpr (std::is_same_v<T, SoftScoreC>) {
            out << '\t' << format_real(p.p_ind) << '\t' << format_real(p.p_grp)
                << '\t' << format_real(p.p_oth);
          }
        },
        r.payload);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

Dataset load_canonical(const std::filesystem::path& path) {
  std::string content = read_file(path);
  std::vector<std::string> lines;
  {
    size_t start = 0;
    while (start < content.size()) {
      size_t end = content.find('\n', start);
      if (end == std::string::npos) end = content.size();
      lines.push_back(content.substr(start, end - start));
      start = end + 1;
    }
  }
  if (lines.size() < 2) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                "truncated canonical file " + path.string(), 1);
  }
  std::vector<std::string> header = split(lines[0], '\t');
  if (header[0] != kCanonicalMagic) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                "expected " + std::string(kCanonicalMagic) + ", found '" +
                    header[0] + "' in " + path.string(),
                1);
  }
  std::vector<std::string> meta = split(lines[1], '\t');
  if (meta.empty() || meta[0] != "#meta") {
    throw Error(ErrorCode::kSchemaVersionMismatch, "missing #meta line", 2);
  }
  std::unordered_map<std::string, std::string> kv;
  for (size_t i = 1; i < meta.size(); ++i) {
    size_t eq = meta[i].find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kMalformedRow, "bad meta field " + meta[i], 2);
    }
    kv[meta[i].substr(0, eq)] = meta[i].substr(eq + 1);
  }
  for (const char* key : {"task", "language", "kind", "provenance"}) {
    if (!kv.count(key)) {
      throw Error(ErrorCode::kMissingColumn, std::string("meta ") + key, 2);
    }
  }
  Task task = parse_task(kv["task"]);
  Language language = parse_language(kv["language"]);
  PayloadKind kind = parse_kind(kv["kind"], 2);
  std::vector<std::string> expected = {std::string(kCanonicalMagic), "id", "text"};
  for (std::string& c : payload_columns(task, kind)) expected.push_back(c);
  if (header != expected) {
    throw Error(ErrorCode::kMissingColumn,
                "header does not match payload kind " +
                    std::string(kind_name(kind)),
                1);
  }

  std::vector<TweetRecord> records;
  for (size_t i = 2; i < lines.size(); ++i) {
    int number = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    std::vector<std::string> f = split(lines[i], '\t');
    if (f.size() != expected.size() - 1) {
      throw Error(ErrorCode::kMalformedRow,
                  "expected " + std::to_string(expected.size() - 1) +
                      " fields, found " + std::to_string(f.size()),
                  number);
    }
    TweetRecord r;
    r.id = unescape_field(f[0]);
    r.text = unescape_field(f[1]);
    r.language = language;
    if (kind == PayloadKind::kHard) {
      r.payload = HardLabel{task, parse_label(task, f[2])};
    } else if (kind == PayloadKind::kSoft) {
      if (task == Task::kA) {
        r.payload = SoftScoreA{parse_real(f[2], number), parse_real(f[3], number)};
      } else if (task == Task::kB) {
        r.payload = SoftScoreB{parse_real(f[2], number), parse_real(f[3], number)};
      } else {
        r.payload = SoftScoreC{parse_real(f[2], number), parse_real(f[3], number),
                               parse_real(f[4], number)};
      }
    }
    records.push_back(std::move(r));
  }
  return Dataset(task, language, kind, std::move(records),
                 unescape_field(kv["provenance"]));
}

Dataset load_any(const std::filesystem::path& path, Task task,
                 Language language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  if (first.rfind("#ocp-", 0) == 0) return load_canonical(path);
  std::vector<std::string> header = split(first, '\t');
  if (find_column(header, {subtask_column(task)}) >= 0) {
    return load_hard_tsv(path, task, language);
  }
  return load_unlabeled_tsv(path, task, language);
}

}  // namespace ocp
