#ifndef OCP_FEATURES_H_
#define OCP_FEATURES_H_

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace ocp {

// Sparse row: strictly increasing indices, nonzero values, all < dimension.
struct SparseVector {
  size_t dimension = 0;
  std::vector<uint32_t> indices;
  std::vector<double> values;

  size_t nnz() const { return indices.size(); }
  double dot(const SparseVector& other) const;
  double squared_norm() const;
  // Throws InvalidArgument if the invariants do not hold.
  void validate() const;
  bool operator==(const SparseVector&) const = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // Terms are indexed in byte-lexicographic order.
  Vocabulary(std::vector<std::string> terms, std::vector<size_t> df);

  size_t size() const { return terms_.size(); }
  // -1 when out of vocabulary.
  long index(const std::string& term) const;
  const std::string& term(size_t i) const { return terms_[i]; }
  size_t document_frequency(size_t i) const { return df_[i]; }
  const std::vector<std::string>& terms() const { return terms_; }

 private:
  std::vector<std::string> terms_;
  std::vector<size_t> df_;
  std::unordered_map<std::string, size_t> index_;
};

// Smooth idf: ln((1 + n) / (1 + df)) + 1, raw tf, L2-normalised rows.
struct TfidfModel {
  Vocabulary vocabulary;
  std::vector<double> idf;
  size_t n_documents = 0;

  size_t dimension() const { return vocabulary.size(); }
};

// Whitespace unigrams. Throws EmptyCorpus for an empty list.
TfidfModel fit_tfidf(const std::vector<std::string>& corpus);
SparseVector transform(const TfidfModel& model, const std::string& text);
std::vector<SparseVector> transform_all(const TfidfModel& model,
                                        const std::vector<std::string>& texts);

void save_tfidf(const TfidfModel& model, const std::filesystem::path& path);
TfidfModel load_tfidf(const std::filesystem::path& path);

std::vector<std::string> whitespace_split(const std::string& text);

}  // namespace ocp

#endif  // OCP_FEATURES_H_
