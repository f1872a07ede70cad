#ifndef OCP_LABELS_H_
#define OCP_LABELS_H_

#include <map>
#include <vector>

#include "ocp/corpus.h"

namespace ocp {

// OFF iff mean > 0.5 (strict).
HardLabel soft_to_hard_a(const SoftScoreA& score);
// UNT iff mean >= 0.5 (inclusive).
HardLabel soft_to_hard_b(const SoftScoreB& score);
// Argmax over (IND, GRP, OTH); ties resolve to the earlier label.
HardLabel soft_to_hard_c(const SoftScoreC& score);

// Index of the maximum entry, first index winning ties. Shared by every
// argmax over a task's label order.
size_t argmax_first(const std::vector<double>& values);

struct ClassStats {
  Task task = Task::kA;
  std::map<Label, size_t> counts;
  std::map<Label, double> fractions;  // empty when total == 0
  size_t total = 0;
  bool fractions_defined() const { return total > 0; }
};

struct ClassWeights {
  std::map<Label, double> weights;
  double at(Label label) const { return weights.at(label); }
};

ClassStats class_distribution(const Dataset& ds);
ClassStats class_distribution(Task task, const std::vector<Label>& labels);
ClassStats stats_from_counts(Task task, const std::map<Label, size_t>& counts);
// weights[c] = n_total / (n_classes * counts[c]) over the classes in
// `stats`; throws EmptyClass if any count is zero.
ClassWeights balanced_weights(const ClassStats& stats);
// Same formula over an arbitrary label list; classes are those present.
ClassWeights balanced_weights_for(const std::vector<Label>& labels);

// Converts a soft dataset to hard labels record-wise.
Dataset convert_dataset(const Dataset& ds);

}  // namespace ocp

#endif  // OCP_LABELS_H_
