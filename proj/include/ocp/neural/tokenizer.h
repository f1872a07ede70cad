#ifndef OCP_NEURAL_TOKENIZER_H_
#define OCP_NEURAL_TOKENIZER_H_

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace ocp::nn {

// Whitespace word tokenizer with a fixed vocabulary. Ids 0-3 are the
// special tokens [PAD], [UNK], [CLS], [SEP].
class WordTokenizer {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;
  static constexpr int kSpecials = 4;

  WordTokenizer() : WordTokenizer(std::vector<std::string>{}, false) {}
  // `tokens` excludes the specials.
  WordTokenizer(std::vector<std::string> tokens, bool cased);

  // Most frequent tokens first, ties by byte order, until `max_size`
  // entries including the specials (0 for no limit).
  static WordTokenizer build(const std::vector<std::string>& texts, size_t max_size, bool cased);

  size_t size() const { return vocab_.size(); }
  bool cased() const { return cased_; }
  const std::string& token(size_t id) const { return vocab_[id]; }
  int id(const std::string& token) const;

  std::vector<std::string> split(const std::string& text) const;
  // [CLS] w1 .. wk [SEP], truncated so the whole sequence fits `max_length`
  // (at least 2).
  std::vector<int> encode_marked(const std::string& text, size_t max_length) const;
  // Word ids only, at most `max_length` of them, at least one ([UNK] for an
  // empty text).
  std::vector<int> encode_plain(const std::string& text, size_t max_length) const;

  void save(const std::filesystem::path& path) const;
  static WordTokenizer load(const std::filesystem::path& path, bool cased);

  bool operator==(const WordTokenizer& other) const {
    return cased_ == other.cased_ && vocab_ == other.vocab_;
  }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  bool cased_ = false;
};

}  // namespace ocp::nn

#endif  // OCP_NEURAL_TOKENIZER_H_
