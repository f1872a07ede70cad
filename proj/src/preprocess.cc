#include "ocp/preprocess.h"

#include <cstdlib>
#include <fstream>

#include "ocp/error.h"
#include "ocp/utf8.h"

namespace ocp {

namespace {

bool is_shortname(std::string_view s) {
  if (s.size() < 3 || s.front() != ':' || s.back() != ':') return false;
  for (size_t i = 1; i + 1 < s.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c >= 0x80 || c == ':' || c <= 0x20) return false;
  }
  return true;
}

bool is_url(std::u32string_view chunk) {
  auto starts = [&](std::u32string_view prefix) {
    return chunk.substr(0, prefix.size()) == prefix;
  };
  return chunk == U"URL" || starts(U"http://") || starts(U"https://") ||
         starts(U"www.");
}

void push_codepoint_token(TokenSequence& out, char32_t cp) {
  std::string token;
  utf8::append(token, cp);
  out.push_back(std::move(token));
}

void tokenize_chunk(std::u32string_view chunk, TokenSequence& out) {
  std::string whole = utf8::encode(chunk);
  if (is_shortname(whole) || is_url(chunk)) {
    out.push_back(std::move(whole));
    return;
  }
  size_t begin = 0, end = chunk.size();
  bool mention = chunk.size() > 1 && chunk[0] == U'@';
  if (!mention) {
    while (begin < end && utf8::is_punctuation(chunk[begin])) ++begin;
  }
  size_t word_end = end;
  // Mentions keep underscores, which are legal handle characters.
  while (word_end > begin && utf8::is_punctuation(chunk[word_end - 1]) &&
         !(mention && chunk[word_end - 1] == U'_')) {
    --word_end;
  }
  if (mention && word_end <= 1) {
    // "@" followed only by punctuation is not a mention.
    begin = 0;
    word_end = 0;
    for (char32_t cp : chunk) push_codepoint_token(out, cp);
    return;
  }
  for (size_t i = 0; i < begin; ++i) push_codepoint_token(out, chunk[i]);
  if (word_end > begin) {
    out.push_back(utf8::encode(chunk.substr(begin, word_end - begin)));
  }
  for (size_t i = std::max(word_end, begin); i < end; ++i) {
    push_codepoint_token(out, chunk[i]);
  }
}

}  // namespace

void EmojiLexicon::add(std::u32string sequence, std::string shortname) {
  if (sequence.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty emoji sequence");
  }
  if (!is_shortname(shortname)) {
    throw Error(ErrorCode::kInvalidArgument,
                "shortname must be ASCII and colon-delimited: " + shortname);
  }
  first_codepoints_.insert(sequence[0]);
  max_length_ = std::max(max_length_, sequence.size());
  entries_[std::move(sequence)] = std::move(shortname);
}

size_t EmojiLexicon::match(std::u32string_view text, size_t pos,
                           const std::string** shortname) const {
  if (pos >= text.size() || !first_codepoints_.count(text[pos])) return 0;
  size_t longest = std::min(max_length_, text.size() - pos);
  for (size_t len = longest; len > 0; --len) {
    auto it = entries_.find(text.substr(pos, len));
    if (it != entries_.end()) {
      *shortname = &it->second;
      return len;
    }
  }
  return 0;
}

EmojiLexicon load_emoji_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  EmojiLexicon lexicon;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kMalformedRow, "expected emoji<TAB>shortname",
                  number);
    }
    lexicon.add(utf8::decode(std::string_view(line).substr(0, tab)),
                line.substr(tab + 1));
  }
  return lexicon;
}

std::unordered_set<std::string> load_stopwords(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view word = utf8::trim(line);
    if (!word.empty()) words.insert(utf8::fold_case(word));
  }
  return words;
}

void PreprocessConfig::validate() const {
  if (remove_stopwords && stopword_set.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "stopword removal enabled with an empty stopword set");
  }
  if (replace_emoji && (!emoji_lexicon || emoji_lexicon->size() == 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "emoji replacement enabled without a lexicon");
  }
}

std::string replace_emoji(std::string_view text, const EmojiLexicon& lexicon) {
  std::u32string cps = utf8::decode(text);
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < cps.size()) {
    const std::string* name = nullptr;
    size_t len = lexicon.match(cps, i, &name);
    if (len == 0) {
      utf8::append(out, cps[i]);
      ++i;
      continue;
    }
    // Pad with a single space on each side unless whitespace or a text
    // boundary is already there.
    if (!out.empty() && out.back() != ' ' &&
        !utf8::is_whitespace(cps[i - 1])) {
      out.push_back(' ');
    }
    out += *name;
    i += len;
    if (i < cps.size() && !utf8::is_whitespace(cps[i])) out.push_back(' ');
  }
  return out;
}

TokenSequence tokenize(std::string_view text) {
  std::u32string cps = utf8::decode(text);
  TokenSequence out;
  size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && utf8::is_whitespace(cps[i])) ++i;
    size_t start = i;
    while (i < cps.size() && !utf8::is_whitespace(cps[i])) ++i;
    if (i > start) {
      tokenize_chunk(std::u32string_view(cps).substr(start, i - start), out);
    }
  }
  return out;
}

TokenSequence collapse_consecutive_duplicates(const TokenSequence& seq) {
  TokenSequence out;
  out.reserve(seq.size());
  for (const std::string& token : seq) {
    if (out.empty() || out.back() != token) out.push_back(token);
  }
  return out;
}

bool is_punctuation_token(std::string_view token) {
  std::u32string cps = utf8::decode(token);
  if (cps.empty()) return false;
  for (char32_t cp : cps) {
    if (!utf8::is_punctuation(cp)) return false;
  }
  return true;
}

TokenSequence remove_stopwords_punct(const TokenSequence& seq,
                                     const PreprocessConfig& cfg) {
  TokenSequence out;
  out.reserve(seq.size());
  for (const std::string& token : seq) {
    if (cfg.remove_punctuation && is_punctuation_token(token)) continue;
    if (cfg.remove_stopwords && cfg.stopword_set.count(utf8::fold_case(token))) {
      continue;
    }
    out.push_back(token);
  }
  return out;
}

std::string preprocess(std::string_view text, const PreprocessConfig& cfg) {
  std::string replaced;
  if (cfg.replace_emoji && cfg.emoji_lexicon) {
    replaced = replace_emoji(text, *cfg.emoji_lexicon);
    text = replaced;
  }
  TokenSequence tokens = tokenize(text);
  if (cfg.collapse_duplicates) tokens = collapse_consecutive_duplicates(tokens);
  if (cfg.remove_stopwords || cfg.remove_punctuation) {
    tokens = remove_stopwords_punct(tokens, cfg);
  }
  std::string out;
  for (const std::string& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

namespace {

struct PresetInfo {
  Preset preset;
  std::string_view name;
};

constexpr PresetInfo kPresets[] = {
    {Preset::kNone, "none"},       {Preset::kGreek, "greek"},
    {Preset::kArabic, "arabic"},   {Preset::kTurkish, "turkish"},
    {Preset::kDanish, "danish"},   {Preset::kEnglish, "english"},
    {Preset::kEnglishSoftC, "english_soft_c"},
};

}  // namespace

Preset parse_preset(std::string_view name) {
  for (const PresetInfo& p : kPresets) {
    if (p.name == name) return p.preset;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown preset " + std::string(name));
}

std::string_view to_string(Preset preset) {
  for (const PresetInfo& p : kPresets) {
    if (p.preset == preset) return p.name;
  }
  return "?";
}

Preset default_preset(Language language) {
  switch (language) {
    case Language::kEl: return Preset::kGreek;
    case Language::kAr: return Preset::kArabic;
    case Language::kTr: return Preset::kTurkish;
    case Language::kDa: return Preset::kDanish;
    case Language::kEn: return Preset::kEnglish;
  }
  return Preset::kNone;
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("OCP_DATA_DIR"); env && *env) return env;
  return OCP_DATA_DIR;
}

PreprocessConfig make_preset(Preset preset,
                             const std::filesystem::path& data_dir) {
  std::filesystem::path dir = data_dir.empty() ? data_directory() : data_dir;
  PreprocessConfig cfg;
  auto lexicon = [&] {
    return std::make_shared<const EmojiLexicon>(
        load_emoji_lexicon(dir / "emoji_lexicon.tsv"));
  };
  switch (preset) {
    case Preset::kNone:
    case Preset::kEnglish:
      break;
    case Preset::kGreek:
      cfg.replace_emoji = true;
      cfg.remove_stopwords = true;
      cfg.remove_punctuation = true;
      cfg.emoji_lexicon = lexicon();
      cfg.stopword_set = load_stopwords(dir / "stopwords" / "el.txt");
      break;
    case Preset::kArabic:
    case Preset::kTurkish:
      cfg.replace_emoji = true;
      cfg.collapse_duplicates = true;
      cfg.emoji_lexicon = lexicon();
      break;
    case Preset::kDanish:
      cfg.collapse_duplicates = true;
      break;
    case Preset::kEnglishSoftC:
      cfg.collapse_duplicates = true;
      cfg.remove_stopwords = true;
      cfg.remove_punctuation = true;
      cfg.stopword_set = load_stopwords(dir / "stopwords" / "en.txt");
      break;
  }
  cfg.validate();
  return cfg;
}

}  // namespace ocp
