#include "ocp/neural/model.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ocp/error.h"
#include "ocp/labels.h"

namespace ocp::nn {

double soft_cross_entropy(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "p has " + std::to_string(p.size()) + " entries, q has " + std::to_string(q.size()));
  }
  double loss = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] != 0.0) loss -= p[i] * std::log(std::max(q[i], kProbabilityFloor));
  }
  return loss;
}

std::vector<double> soft_cross_entropy_grad(const std::vector<double>& p,
                                            const std::vector<double>& logits) {
  if (p.size() != logits.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "p and logits differ in length");
  }
  Matrix z(1, static_cast<long>(logits.size()));
  for (size_t i = 0; i < logits.size(); ++i) z(0, static_cast<long>(i)) = logits[i];
  Matrix q = softmax_rows(z);
  double mass = 0.0;
  for (double v : p) mass += v;
  std::vector<double> g(p.size());
  for (size_t i = 0; i < p.size(); ++i) g[i] = q(0, static_cast<long>(i)) * mass - p[i];
  return g;
}

std::vector<Prediction> predict_neural(const NeuralModel& model, const std::vector<std::string>& texts) {
  std::vector<Prediction> out;
  out.reserve(texts.size());
  if (texts.empty()) return out;
  if (model.labels().empty()) {
    throw Error(ErrorCode::kConfiguration, "model has no label set; train it on a dataset first");
  }
  for (const std::string& text : texts) {
    Matrix q = softmax_rows(model.logits(model.encode(text), nullptr)->value);
    Prediction p;
    p.probabilities.assign(q.data(), q.data() + q.size());
    p.label = model.labels()[argmax_first(p.probabilities)];
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::filesystem::path& path, int line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kMalformedRow, path.string() + ": bad number '" + s + "'", line);
  }
  return v;
}

constexpr const char* kHistoryHeader = "epoch,train_loss,val_loss,val_f1_batchavg,val_acc_batchavg";

}  // namespace

void write_history_csv(const TrainingHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << kHistoryHeader << '\n';
  for (const EpochRecord& e : history.epochs) {
    out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_loss) << ','
        << format_double(e.val_f1_batchavg) << ',' << format_double(e.val_acc_batchavg) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

TrainingHistory read_history_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHistoryHeader) {
    throw Error(ErrorCode::kMissingColumn, path.string() + ": unexpected history header", 1);
  }
  TrainingHistory h;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw Error(ErrorCode::kMalformedRow, path.string() + ": expected 5 fields", line_no);
    EpochRecord e;
    e.epoch = static_cast<int>(parse_double(cells[0], path, line_no));
    e.train_loss = parse_double(cells[1], path, line_no);
    e.val_loss = parse_double(cells[2], path, line_no);
    e.val_f1_batchavg = parse_double(cells[3], path, line_no);
    e.val_acc_batchavg = parse_double(cells[4], path, line_no);
    h.epochs.push_back(e);
  }
  return h;
}

std::vector<Matrix> snapshot(const std::vector<Parameter>& params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (const Parameter& p : params) out.push_back(p.var->value);
  return out;
}

void restore(const std::vector<Parameter>& params, const std::vector<Matrix>& values) {
  for (size_t i = 0; i < params.size(); ++i) params[i].var->value = values[i];
}

}  // namespace ocp::nn
