#include "ocp/neural/tokenizer.h"

#include <algorithm>
#include <fstream>
#include <map>

#include "ocp/error.h"
#include "ocp/features.h"
#include "ocp/utf8.h"

namespace ocp::nn {

namespace {
const char* const kSpecialNames[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
}

WordTokenizer::WordTokenizer(std::vector<std::string> tokens, bool cased) : cased_(cased) {
  vocab_.assign(std::begin(kSpecialNames), std::end(kSpecialNames));
  for (std::string& t : tokens) vocab_.push_back(std::move(t));
  for (size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate vocabulary entry '" + vocab_[i] + "'");
    }
  }
}

WordTokenizer WordTokenizer::build(const std::vector<std::string>& texts, size_t max_size,
                                   bool cased) {
  WordTokenizer probe({}, cased);
  std::map<std::string, size_t> counts;
  for (const std::string& text : texts) {
    for (std::string& w : probe.split(text)) ++counts[std::move(w)];
  }
  for (const char* s : kSpecialNames) counts.erase(s);
  std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  size_t keep = ranked.size();
  if (max_size > 0) keep = std::min(keep, max_size > kSpecials ? max_size - kSpecials : 0);
  std::vector<std::string> tokens;
  for (size_t i = 0; i < keep; ++i) tokens.push_back(ranked[i].first);
  return WordTokenizer(std::move(tokens), cased);
}

int WordTokenizer::id(const std::string& token) const {
  auto it = index_.find(cased_ ? token : utf8::fold_case(token));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::string> WordTokenizer::split(const std::string& text) const {
  std::vector<std::string> words = whitespace_split(text);
  if (!cased_) {
    for (std::string& w : words) w = utf8::fold_case(w);
  }
  return words;
}

std::vector<int> WordTokenizer::encode_marked(const std::string& text, size_t max_length) const {
  if (max_length < 2) throw Error(ErrorCode::kInvalidArgument, "max_length must be at least 2");
  std::vector<int> ids{kCls};
  for (const std::string& w : split(text)) {
    if (ids.size() + 1 >= max_length) break;
    ids.push_back(id(w));
  }
  ids.push_back(kSep);
  return ids;
}

std::vector<int> WordTokenizer::encode_plain(const std::string& text, size_t max_length) const {
  std::vector<int> ids;
  for (const std::string& w : split(text)) {
    if (ids.size() >= max_length) break;
    ids.push_back(id(w));
  }
  if (ids.empty()) ids.push_back(kUnk);
  return ids;
}

void WordTokenizer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  for (const std::string& t : vocab_) out << t << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

WordTokenizer WordTokenizer::load(const std::filesystem::path& path, bool cased) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  for (int i = 0; i < kSpecials; ++i) {
    if (static_cast<int>(lines.size()) <= i || lines[i] != kSpecialNames[i]) {
      throw Error(ErrorCode::kTokenizerMismatch, path.string() + " does not start with the special tokens");
    }
  }
  return WordTokenizer(std::vector<std::string>(lines.begin() + kSpecials, lines.end()), cased);
}

}  // namespace ocp::nn
