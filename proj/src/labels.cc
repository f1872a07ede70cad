#include "ocp/labels.h"

#include <string>

#include "ocp/error.h"

namespace ocp {

namespace {

void check_mean(double mean) {
  if (!(mean >= 0.0 && mean <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange,
                "soft mean " + std::to_string(mean) + " outside [0, 1]");
  }
}

}  // namespace

HardLabel soft_to_hard_a(const SoftScoreA& score) {
  check_mean(score.mean);
  return {Task::kA, score.mean > 0.5 ? Label::kOff : Label::kNot};
}

HardLabel soft_to_hard_b(const SoftScoreB& score) {
  check_mean(score.mean);
  return {Task::kB, score.mean >= 0.5 ? Label::kUnt : Label::kTin};
}

size_t argmax_first(const std::vector<double>& values) {
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

HardLabel soft_to_hard_c(const SoftScoreC& score) {
  size_t k = argmax_first({score.p_ind, score.p_grp, score.p_oth});
  return {Task::kC, label_set(Task::kC)[k]};
}

ClassStats stats_from_counts(Task task, const std::map<Label, size_t>& counts) {
  ClassStats stats;
  stats.task = task;
  for (Label l : label_set(task)) stats.counts[l] = 0;
  for (const auto& [label, n] : counts) {
    if (task_of(label) != task) {
      throw Error(ErrorCode::kUnknownLabel,
                  std::string(to_string(label)) + " not in sub-task " +
                      std::string(to_string(task)));
    }
    stats.counts[label] = n;
    stats.total += n;
  }
  if (stats.total > 0) {
    for (const auto& [label, n] : stats.counts) {
      stats.fractions[label] =
          static_cast<double>(n) / static_cast<double>(stats.total);
    }
  }
  return stats;
}

ClassStats class_distribution(Task task, const std::vector<Label>& labels) {
  std::map<Label, size_t> counts;
  for (Label l : labels) ++counts[l];
  return stats_from_counts(task, counts);
}

ClassStats class_distribution(const Dataset& ds) {
  return class_distribution(ds.task(), ds.labels());
}

ClassWeights balanced_weights(const ClassStats& stats) {
  ClassWeights out;
  double n_classes = static_cast<double>(stats.counts.size());
  for (const auto& [label, n] : stats.counts) {
    if (n == 0) {
      throw Error(ErrorCode::kEmptyClass,
                  std::string(to_string(label)) + " has no examples");
    }
    out.weights[label] = static_cast<double>(stats.total) /
                         (n_classes * static_cast<double>(n));
  }
  return out;
}

ClassWeights balanced_weights_for(const std::vector<Label>& labels) {
  std::map<Label, size_t> counts;
  for (Label l : labels) ++counts[l];
  ClassStats stats;
  stats.counts = counts;
  stats.total = labels.size();
  return balanced_weights(stats);
}

Dataset convert_dataset(const Dataset& ds) {
  std::vector<TweetRecord> records = ds.records();
  for (TweetRecord& r : records) {
    try {
      std::visit(
          [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SoftScoreA>) {
              if (ds.task() != Task::kA) throw Error(ErrorCode::kInvalidArgument, "task mismatch");
              r.payload = soft_to_hard_a(p);
            } else if constexpr (std::is_same_v<T, SoftScoreB>) {
              if (ds.task() != Task::kB) throw Error(ErrorCode::kInvalidArgument, "task mismatch");
              r.payload = soft_to_hard_b(p);
            } else if constexpr (std::is_same_v<T, SoftScoreC>) {
              if (ds.task() != Task::kC) throw Error(ErrorCode::kInvalidArgument, "task mismatch");
              r.payload = soft_to_hard_c(p);
            } else {
              throw Error(ErrorCode::kInvalidArgument, "record has no soft score");
            }
          },
          r.payload);
    } catch (const Error& e) {
      throw Error(e.code(), "record " + r.id + ": " + e.what());
    }
  }
  return Dataset(ds.task(), ds.language(), PayloadKind::kHard,
                 std::move(records), ds.provenance());
}

}  // namespace ocp
