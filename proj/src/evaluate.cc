#include "ocp/evaluate.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ocp/error.h"

namespace ocp {

namespace {

void check_lengths(size_t a, size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a) + " true labels vs " + std::to_string(b) +
                    " predictions");
  }
}

size_t position(const std::vector<Label>& order, Label label) {
  auto it = std::find(order.begin(), order.end(), label);
  if (it == order.end()) {
    throw Error(ErrorCode::kUnknownLabel,
                std::string(to_string(label)) + " not in label set");
  }
  return static_cast<size_t>(it - order.begin());
}

bool all_digits(const std::string& s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool id_less(const std::string& a, const std::string& b) {
  if (all_digits(a) && all_digits(b) && a.size() != b.size()) {
    return a.size() < b.size();
  }
  return a < b;
}

}  // namespace

size_t ConfusionMatrix::total() const {
  size_t sum = 0;
  for (const auto& row : counts) sum += std::accumulate(row.begin(), row.end(), size_t{0});
  return sum;
}

size_t ConfusionMatrix::trace() const {
  size_t sum = 0;
  for (size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
  return sum;
}

size_t ConfusionMatrix::row_sum(size_t i) const {
  return std::accumulate(counts[i].begin(), counts[i].end(), size_t{0});
}

size_t ConfusionMatrix::col_sum(size_t j) const {
  size_t sum = 0;
  for (const auto& row : counts) sum += row[j];
  return sum;
}

std::map<Label, ClassScores> class_scores(const ConfusionMatrix& cm) {
  std::map<Label, ClassScores> out;
  for (size_t k = 0; k < cm.label_order.size(); ++k) {
    double tp = static_cast<double>(cm.counts[k][k]);
    double predicted = static_cast<double>(cm.col_sum(k));
    double actual = static_cast<double>(cm.row_sum(k));
    ClassScores s;
    s.support = cm.row_sum(k);
    s.precision = predicted > 0 ? tp / predicted : 0.0;
    s.recall = actual > 0 ? tp / actual : 0.0;
    s.f1 = (s.precision + s.recall) > 0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    out[cm.label_order[k]] = s;
  }
  return out;
}

ConfusionMatrix confusion(const std::vector<Label>& y_true,
                          const std::vector<Label>& y_pred,
                          const std::vector<Label>& label_order) {
  check_lengths(y_true.size(), y_pred.size());
  ConfusionMatrix cm;
  cm.label_order = label_order;
  cm.counts.assign(label_order.size(), std::vector<size_t>(label_order.size(), 0));
  for (size_t i = 0; i < y_true.size(); ++i) {
    ++cm.counts[position(label_order, y_true[i])][position(label_order, y_pred[i])];
  }
  return cm;
}

double macro_f1(const std::vector<Label>& y_true,
                const std::vector<Label>& y_pred,
                const std::vector<Label>& label_set) {
  check_lengths(y_true.size(), y_pred.size());
  if (y_true.empty()) throw Error(ErrorCode::kEmptyList, "no predictions");
  if (label_set.empty()) throw Error(ErrorCode::kEmptyList, "empty label set");
  auto scores = class_scores(confusion(y_true, y_pred, label_set));
  double sum = 0.0;
  for (Label l : label_set) sum += scores[l].f1;
  return sum / static_cast<double>(label_set.size());
}

double accuracy(const std::vector<Label>& y_true,
                const std::vector<Label>& y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  if (y_true.empty()) throw Error(ErrorCode::kEmptyList, "no predictions");
  size_t hits = 0;
  for (size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double batch_averaged(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyList, "no batch values");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

ErrorReport error_report(const Dataset& ds, const std::vector<Label>& y_pred) {
  check_lengths(ds.size(), y_pred.size());
  ErrorReport report;
  for (size_t i = 0; i < ds.size(); ++i) {
    Label truth = ds.label(i);
    if (truth == y_pred[i]) continue;
    report[{truth, y_pred[i]}].push_back({ds[i].id, ds[i].text, truth, y_pred[i]});
  }
  for (auto& [cell, entries] : report) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Misclassification& a, const Misclassification& b) {
                       return id_less(a.id, b.id);
                     });
  }
  return report;
}

EvalReport evaluate(const Dataset& ds, const std::vector<Label>& y_pred) {
  check_lengths(ds.size(), y_pred.size());
  std::vector<Label> y_true = ds.labels();
  const std::vector<Label>& labels = label_set(ds.task());
  EvalReport report;
  report.confusion = confusion(y_true, y_pred, labels);
  report.per_class = class_scores(report.confusion);
  if (!y_true.empty()) {
    double sum = 0.0;
    for (Label l : labels) sum += report.per_class[l].f1;
    report.macro_f1 = sum / static_cast<double>(labels.size());
    report.accuracy = accuracy(y_true, y_pred);
  }
  for (auto& [cell, entries] : error_report(ds, y_pred)) {
    report.misclassified.insert(report.misclassified.end(), entries.begin(),
                                entries.end());
  }
  return report;
}

std::string_view to_string(MetricConvention convention) {
  return convention == MetricConvention::kCorpus ? "corpus" : "batch_averaged";
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["macro_f1"] = report.macro_f1;
  j["accuracy"] = report.accuracy;
  j["metric_convention"] = to_string(report.metric_convention);
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [label, s] : report.per_class) {
    per_class[std::string(to_string(label))] = {{"precision", s.precision},
                                                {"recall", s.recall},
                                                {"f1", s.f1},
                                                {"support", s.support}};
  }
  j["per_class"] = per_class;
  nlohmann::json order = nlohmann::json::array();
  for (Label l : report.confusion.label_order) order.push_back(to_string(l));
  j["confusion"] = {{"label_order", order}, {"counts", report.confusion.counts}};
  nlohmann::json mis = nlohmann::json::array();
  for (const Misclassification& m : report.misclassified) {
    mis.push_back({{"id", m.id},
                   {"text", m.text},
                   {"true", to_string(m.truth)},
                   {"predicted", to_string(m.predicted)}});
  }
  j["misclassified"] = mis;
  return j;
}

nlohmann::json to_json(const ErrorReport& report) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& [cell, entries] : report) {
    nlohmann::json items = nlohmann::json::array();
    for (const Misclassification& m : entries) {
      items.push_back({{"id", m.id}, {"text", m.text}});
    }
    groups.push_back({{"true", to_string(cell.first)},
                      {"predicted", to_string(cell.second)},
                      {"count", entries.size()},
                      {"records", items}});
  }
  return groups;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport report;
  report.macro_f1 = j.at("macro_f1").get<double>();
  report.accuracy = j.at("accuracy").get<double>();
  report.metric_convention = j.at("metric_convention") == "corpus"
                                 ? MetricConvention::kCorpus
                                 : MetricConvention::kBatchAveraged;
  std::vector<std::string> order = j.at("confusion").at("label_order");
  if (order.empty()) throw Error(ErrorCode::kInvalidArgument, "empty label order");
  Task task = Task::kA;
  bool found = false;
  for (Task t : {Task::kA, Task::kB, Task::kC}) {
    const auto& set = label_set(t);
    if (std::any_of(set.begin(), set.end(),
                    [&](Label l) { return to_string(l) == order[0]; })) {
      task = t;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::kUnknownLabel, order[0]);
  for (const std::string& name : order) {
    report.confusion.label_order.push_back(parse_label(task, name));
  }
  report.confusion.counts =
      j.at("confusion").at("counts").get<std::vector<std::vector<size_t>>>();
  for (const auto& [name, s] : j.at("per_class").items()) {
    ClassScores cs;
    cs.precision = s.at("precision");
    cs.recall = s.at("recall");
    cs.f1 = s.at("f1");
    cs.support = s.at("support");
    report.per_class[parse_label(task, name)] = cs;
  }
  for (const auto& m : j.at("misclassified")) {
    report.misclassified.push_back({m.at("id"), m.at("text"),
                                    parse_label(task, m.at("true").get<std::string>()),
                                    parse_label(task, m.at("predicted").get<std::string>())});
  }
  return report;
}

void write_confusion_csv(const ConfusionMatrix& cm,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << "true\\predicted";
  for (Label l : cm.label_order) out << ',' << to_string(l);
  out << '\n';
  for (size_t i = 0; i < cm.label_order.size(); ++i) {
    out << to_string(cm.label_order[i]);
    for (size_t c : cm.counts[i]) out << ',' << c;
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path,
                                   Task task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  ConfusionMatrix cm;
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header = split(line);
  for (size_t k = 1; k < header.size(); ++k) {
    cm.label_order.push_back(parse_label(task, header[k]));
  }
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRow, "wrong cell count", number);
    }
    std::vector<size_t> row;
    for (size_t k = 1; k < cells.size(); ++k) row.push_back(std::stoul(cells[k]));
    cm.counts.push_back(std::move(row));
  }
  return cm;
}

}  // namespace ocp
