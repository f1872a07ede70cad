#include "ocp/features.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ocp/error.h"
#include "ocp/utf8.h"

namespace ocp {

double SparseVector::dot(const SparseVector& other) const {
  double sum = 0.0;
  size_t i = 0, j = 0;
  while (i < indices.size() && j < other.indices.size()) {
    if (indices[i] < other.indices[j]) {
      ++i;
    } else if (indices[i] > other.indices[j]) {
      ++j;
    } else {
      sum += values[i++] * other.values[j++];
    }
  }
  return sum;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return sum;
}

void SparseVector::validate() const {
  if (indices.size() != values.size()) {
    throw Error(ErrorCode::kInvalidArgument, "index/value length mismatch");
  }
  for (size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= dimension || values[k] == 0.0 ||
        (k > 0 && indices[k] <= indices[k - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "malformed sparse vector");
    }
  }
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<size_t> df)
    : terms_(std::move(terms)), df_(std::move(df)) {
  if (terms_.size() != df_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "terms/df length mismatch");
  }
  index_.reserve(terms_.size());
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (df_[i] == 0) {
      throw Error(ErrorCode::kInvalidArgument, "term with zero df: " + terms_[i]);
    }
    if (!index_.emplace(terms_[i], i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate term " + terms_[i]);
    }
  }
}

long Vocabulary::index(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

std::vector<std::string> whitespace_split(const std::string& text) {
  std::vector<std::string> out;
  std::u32string cps = utf8::decode(text);
  size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && utf8::is_whitespace(cps[i])) ++i;
    size_t start = i;
    while (i < cps.size() && !utf8::is_whitespace(cps[i])) ++i;
    if (i > start) {
      out.push_back(utf8::encode(std::u32string_view(cps).substr(start, i - start)));
    }
  }
  return out;
}

TfidfModel fit_tfidf(const std::vector<std::string>& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no documents");
  std::map<std::string, size_t> df;
  for (const std::string& doc : corpus) {
    std::vector<std::string> tokens = whitespace_split(doc);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const std::string& t : unique) ++df[t];
  }
  std::vector<std::string> terms;
  std::vector<size_t> counts;
  terms.reserve(df.size());
  for (auto& [term, n] : df) {
    terms.push_back(term);
    counts.push_back(n);
  }
  TfidfModel model;
  model.n_documents = corpus.size();
  double n = static_cast<double>(corpus.size());
  model.idf.reserve(counts.size());
  for (size_t c : counts) {
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(c))) + 1.0);
  }
  model.vocabulary = Vocabulary(std::move(terms), std::move(counts));
  return model;
}

SparseVector transform(const TfidfModel& model, const std::string& text) {
  std::map<uint32_t, double> counts;
  for (const std::string& token : whitespace_split(text)) {
    long idx = model.vocabulary.index(token);
    if (idx >= 0) counts[static_cast<uint32_t>(idx)] += 1.0;
  }
  SparseVector out;
  out.dimension = model.dimension();
  double norm = 0.0;
  for (auto& [idx, tf] : counts) {
    double w = tf * model.idf[idx];
    out.indices.push_back(idx);
    out.values.push_back(w);
    norm += w * w;
  }
  if (norm > 0.0) {
    double inv = 1.0 / std::sqrt(norm);
    for (double& v : out.values) v *= inv;
  }
  return out;
}

std::vector<SparseVector> transform_all(const TfidfModel& model,
                                        const std::vector<std::string>& texts) {
  std::vector<SparseVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(transform(model, t));
  return out;
}

void save_tfidf(const TfidfModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << "#ocp-tfidf-v1\tn_documents=" << model.n_documents << '\n';
  char buffer[64];
  for (size_t i = 0; i < model.dimension(); ++i) {
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), model.idf[i]);
    out << model.vocabulary.term(i) << '\t' << i << '\t'
        << model.vocabulary.document_frequency(i) << '\t'
        << std::string_view(buffer, ptr - buffer) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

TfidfModel load_tfidf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const std::string prefix = "#ocp-tfidf-v1\tn_documents=";
  if (line.rfind(prefix, 0) != 0) {
    throw Error(ErrorCode::kSchemaVersionMismatch, "not a tf-idf model file", 1);
  }
  TfidfModel model;
  model.n_documents = std::stoul(line.substr(prefix.size()));
  std::vector<std::string> terms;
  std::vector<size_t> df;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string term, index, count, idf;
    if (!std::getline(row, term, '\t') || !std::getline(row, index, '\t') ||
        !std::getline(row, count, '\t') || !std::getline(row, idf, '\t')) {
      throw Error(ErrorCode::kMalformedRow, "expected 4 fields", number);
    }
    if (std::stoul(index) != terms.size()) {
      throw Error(ErrorCode::kMalformedRow, "indices must be dense", number);
    }
    double value = 0.0;
    std::from_chars(idf.data(), idf.data() + idf.size(), value);
    terms.push_back(term);
    df.push_back(std::stoul(count));
    model.idf.push_back(value);
  }
  model.vocabulary = Vocabulary(std::move(terms), std::move(df));
  return model;
}

}  // namespace ocp
