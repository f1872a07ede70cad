#ifndef OCP_EVALUATE_H_
#define OCP_EVALUATE_H_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ocp/corpus.h"
#include "json.hpp"

namespace ocp {

// Rows are true labels, columns predicted labels, both in `label_order`.
struct ConfusionMatrix {
  std::vector<Label> label_order;
  std::vector<std::vector<size_t>> counts;

  size_t total() const;
  size_t trace() const;
  size_t row_sum(size_t i) const;
  size_t col_sum(size_t j) const;
};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t support = 0;
};

struct Misclassification {
  std::string id;
  std::string text;
  Label truth;
  Label predicted;
};

enum class MetricConvention { kCorpus, kBatchAveraged };

struct EvalReport {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::map<Label, ClassScores> per_class;
  ConfusionMatrix confusion;
  std::vector<Misclassification> misclassified;
  MetricConvention metric_convention = MetricConvention::kCorpus;
};

// Per-class precision/recall/F1 from a confusion matrix; zero denominators
// give 0.
std::map<Label, ClassScores> class_scores(const ConfusionMatrix& cm);

double macro_f1(const std::vector<Label>& y_true,
                const std::vector<Label>& y_pred,
                const std::vector<Label>& label_set);
double accuracy(const std::vector<Label>& y_true,
                const std::vector<Label>& y_pred);
// Arithmetic mean of per-batch values. Throws EmptyList.
double batch_averaged(const std::vector<double>& values);
ConfusionMatrix confusion(const std::vector<Label>& y_true,
                          const std::vector<Label>& y_pred,
                          const std::vector<Label>& label_order);

// Misclassified records grouped by (true, predicted), ids ascending within
// each group.
using ErrorReport =
    std::map<std::pair<Label, Label>, std::vector<Misclassification>>;
ErrorReport error_report(const Dataset& ds, const std::vector<Label>& y_pred);

// Corpus-level report over a labeled dataset.
EvalReport evaluate(const Dataset& ds, const std::vector<Label>& y_pred);

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const ErrorReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);
std::string_view to_string(MetricConvention convention);

// Writes `<stem>.png` (heatmap with counts) and `<stem>.csv` (header row of
// predicted labels, leading column of true labels).
void emit_confusion_figure(const ConfusionMatrix& cm,
                           const std::filesystem::path& stem);
void write_confusion_csv(const ConfusionMatrix& cm,
                         const std::filesystem::path& path);
ConfusionMatrix read_confusion_csv(const std::filesystem::path& path,
                                   Task task);

}  // namespace ocp

#endif  // OCP_EVALUATE_H_
