#ifndef OCP_PREPROCESS_H_
#define OCP_PREPROCESS_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ocp/corpus.h"

namespace ocp {

// Emoji codepoint sequence -> ":shortname:". Lookup is greedy longest match.
class EmojiLexicon {
 public:
  EmojiLexicon() = default;
  // Throws InvalidArgument for non-ASCII or undelimited shortnames.
  void add(std::u32string sequence, std::string shortname);
  // Longest entry starting at `pos`; returns the matched length (0 if none).
  size_t match(std::u32string_view text, size_t pos,
               const std::string** shortname) const;
  size_t size() const { return entries_.size(); }

 private:
  std::map<std::u32string, std::string, std::less<>> entries_;
  std::unordered_set<char32_t> first_codepoints_;
  size_t max_length_ = 0;
};

// TSV `emoji<TAB>shortname`, one entry per line.
EmojiLexicon load_emoji_lexicon(const std::filesystem::path& path);
// One token per line; tokens are case-folded on load.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

struct PreprocessConfig {
  bool replace_emoji = false;
  bool collapse_duplicates = false;
  bool remove_stopwords = false;
  bool remove_punctuation = false;
  std::unordered_set<std::string> stopword_set;  // case-folded
  std::shared_ptr<const EmojiLexicon> emoji_lexicon;

  // Throws InvalidArgument when an enabled step lacks its resource.
  void validate() const;
};

using TokenSequence = std::vector<std::string>;

std::string replace_emoji(std::string_view text, const EmojiLexicon& lexicon);
TokenSequence tokenize(std::string_view text);
TokenSequence collapse_consecutive_duplicates(const TokenSequence& seq);
TokenSequence remove_stopwords_punct(const TokenSequence& seq,
                                     const PreprocessConfig& cfg);
std::string preprocess(std::string_view text, const PreprocessConfig& cfg);

bool is_punctuation_token(std::string_view token);

// Named presets: none, greek, arabic, turkish, danish, english, english_soft_c.
enum class Preset { kNone, kGreek, kArabic, kTurkish, kDanish, kEnglish, kEnglishSoftC };

Preset parse_preset(std::string_view name);
std::string_view to_string(Preset preset);
// Preset used for a language's sub-task A models.
Preset default_preset(Language language);
// Loads lexicon and stopword resources from `data_dir` (defaults to the
// bundled data directory, overridable with OCP_DATA_DIR).
PreprocessConfig make_preset(Preset preset,
                             const std::filesystem::path& data_dir = {});
std::filesystem::path data_directory();

}  // namespace ocp

#endif  // OCP_PREPROCESS_H_
