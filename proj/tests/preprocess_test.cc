#include "doctest.h"
#include "ocp/error.h"
#include "ocp/preprocess.h"
#include "ocp/rng.h"

using namespace ocp;

namespace {

const char* kJoy = "\xF0\x9F\x98\x82";  // U+1F602

EmojiLexicon joy_lexicon() {
  EmojiLexicon lex;
  lex.add(U"\U0001F602", ":face_with_tears_of_joy:");
  return lex;
}

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("replace_emoji") {
  EmojiLexicon lex = joy_lexicon();
  CHECK(replace_emoji(std::string("ok ") + kJoy, lex) == "ok :face_with_tears_of_joy:");
  CHECK(replace_emoji("no emoji here", lex) == "no emoji here");
  CHECK(replace_emoji(std::string(kJoy) + kJoy, lex) ==
        ":face_with_tears_of_joy: :face_with_tears_of_joy:");
  // unknown emoji stays
  CHECK(replace_emoji("\xF0\x9F\x90\xB1", lex) == "\xF0\x9F\x90\xB1");
}

TEST_CASE("lexicon rejects bad shortnames") {
  EmojiLexicon lex;
  CHECK_THROWS_AS(lex.add(U"\U0001F602", "no_colons"), Error);
  CHECK_THROWS_AS(lex.add(U"\U0001F602", ":caf\xC3\xA9:"), Error);
}

TEST_CASE("tokenize") {
  CHECK(tokenize("@USER hi!") == TokenSequence{"@USER", "hi", "!"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("don't stop") == TokenSequence{"don't", "stop"});
  CHECK(tokenize("(URL) ok.") == TokenSequence{"(", "URL", ")", "ok", "."});
  CHECK(tokenize("@USER, URL!") == TokenSequence{"@USER", ",", "URL", "!"});
}

TEST_CASE("collapse_consecutive_duplicates") {
  CHECK(collapse_consecutive_duplicates({"@USER", "@USER", "go"}) == TokenSequence{"@USER", "go"});
  CHECK(collapse_consecutive_duplicates({}).empty());
  CHECK(collapse_consecutive_duplicates({"a", "a", "b", "a"}) == TokenSequence{"a", "b", "a"});
}

TEST_CASE("remove_stopwords_punct") {
  PreprocessConfig cfg;
  cfg.remove_stopwords = true;
  cfg.remove_punctuation = true;
  cfg.stopword_set = {"το"};
  CHECK(remove_stopwords_punct({"το", "σπίτι", "!"}, cfg) == TokenSequence{"σπίτι"});
  CHECK(remove_stopwords_punct({"Το", "σπίτι"}, cfg) == TokenSequence{"σπίτι"});
  PreprocessConfig off;
  TokenSequence any = {"το", "!", "x"};
  CHECK(remove_stopwords_punct(any, off) == any);
  PreprocessConfig punct;
  punct.remove_punctuation = true;
  CHECK(remove_stopwords_punct({"!", "?"}, punct).empty());
}

TEST_CASE("validate requires resources") {
  PreprocessConfig cfg;
  cfg.remove_stopwords = true;
  CHECK_THROWS_AS(cfg.validate(), Error);
  PreprocessConfig emoji;
  emoji.replace_emoji = true;
  CHECK_THROWS_AS(emoji.validate(), Error);
}

TEST_CASE("preprocess compositions") {
  PreprocessConfig greek;
  greek.replace_emoji = true;
  greek.remove_stopwords = true;
  greek.remove_punctuation = true;
  greek.stopword_set = {"το"};
  greek.emoji_lexicon = std::make_shared<EmojiLexicon>(joy_lexicon());
  CHECK(preprocess(std::string("το σπίτι! ") + kJoy, greek) == "σπίτι :face_with_tears_of_joy:");

  PreprocessConfig arabic;
  arabic.replace_emoji = true;
  arabic.collapse_duplicates = true;
  arabic.emoji_lexicon = greek.emoji_lexicon;
  CHECK(preprocess(std::string("@USER @USER ") + kJoy, arabic) == "@USER :face_with_tears_of_joy:");

  PreprocessConfig none;
  CHECK(preprocess("  hi   there!  ", none) == "hi there !");
  PreprocessConfig punct;
  punct.remove_punctuation = true;
  CHECK(preprocess("!!! ...", punct) == "");
}

TEST_CASE("bundled presets") {
  PreprocessConfig greek = make_preset(Preset::kGreek);
  CHECK(greek.replace_emoji);
  CHECK(greek.remove_stopwords);
  CHECK(greek.remove_punctuation);
  CHECK_FALSE(greek.collapse_duplicates);
  CHECK(greek.stopword_set.count("το") == 1);
  CHECK(preprocess(std::string("το σπίτι! ") + kJoy, greek) == "σπίτι :face_with_tears_of_joy:");

  PreprocessConfig turkish = make_preset(Preset::kTurkish);
  CHECK(preprocess(std::string("@USER @USER ") + kJoy, turkish) == "@USER :face_with_tears_of_joy:");
  PreprocessConfig danish = make_preset(Preset::kDanish);
  CHECK(danish.collapse_duplicates);
  CHECK_FALSE(danish.replace_emoji);
  PreprocessConfig soft_c = make_preset(Preset::kEnglishSoftC);
  CHECK(soft_c.collapse_duplicates);
  CHECK(soft_c.remove_stopwords);
  CHECK(soft_c.remove_punctuation);
  CHECK_FALSE(soft_c.replace_emoji);

  CHECK(default_preset(Language::kEl) == Preset::kGreek);
  CHECK(default_preset(Language::kAr) == Preset::kArabic);
  CHECK(default_preset(Language::kTr) == Preset::kTurkish);
  CHECK(default_preset(Language::kDa) == Preset::kDanish);
  for (Preset p : {Preset::kNone, Preset::kGreek, Preset::kArabic, Preset::kTurkish, Preset::kDanish,
                   Preset::kEnglish, Preset::kEnglishSoftC}) {
    CHECK(parse_preset(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_preset("klingon"), Error);
}

TEST_CASE("property: collapse is idempotent and leaves no equal neighbours") {
  Rng rng(5);
  const std::vector<std::string> alphabet = {"a", "b", "c", "@USER"};
  for (int trial = 0; trial < 500; ++trial) {
    TokenSequence seq;
    size_t n = rng.uniform_int(12);
    for (size_t i = 0; i < n; ++i) seq.push_back(alphabet[rng.uniform_int(alphabet.size())]);
    TokenSequence once = collapse_consecutive_duplicates(seq);
    CHECK(collapse_consecutive_duplicates(once) == once);
    for (size_t i = 1; i < once.size(); ++i) CHECK(once[i] != once[i - 1]);
    CHECK(once.size() <= seq.size());
  }
}

TEST_CASE("property: preprocess is deterministic and never adds tokens") {
  Rng rng(9);
  PreprocessConfig cfg = make_preset(Preset::kGreek);
  PreprocessConfig none;
  PreprocessConfig soft_c = make_preset(Preset::kEnglishSoftC);
  const std::vector<std::string> pieces = {"το", "σπίτι", "!", "@USER", "και", "\xF0\x9F\x98\x82", "URL", "ok,",
                                           "δεν"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    size_t n = rng.uniform_int(10);
    for (size_t i = 0; i < n; ++i) text += pieces[rng.uniform_int(pieces.size())] + " ";
    std::string out = preprocess(text, cfg);
    CHECK(out == preprocess(text, cfg));
    CHECK(tokenize(preprocess(text, soft_c)).size() <= tokenize(text).size());
    std::string plain = preprocess(text, none);
    std::string joined;
    for (const auto& t : tokenize(text)) joined += (joined.empty() ? "" : " ") + t;
    CHECK(plain == joined);
  }
}

}  // TEST_SUITE
