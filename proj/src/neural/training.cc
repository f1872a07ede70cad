#include "training.h"

#include <algorithm>
#include <limits>

#include "ocp/evaluate.h"
#include "ocp/labels.h"

namespace ocp::nn::internal {

namespace {

size_t row_argmax(const Matrix& m) {
  std::vector<double> v(m.data(), m.data() + m.size());
  return argmax_first(v);
}

// Macro F1 over the labels that occur in the batch, either as truth or as
// prediction.
double batch_f1(const std::vector<Label>& truth, const std::vector<Label>& predicted) {
  std::vector<Label> present;
  for (const auto* side : {&truth, &predicted}) {
    for (Label l : *side) {
      if (std::find(present.begin(), present.end(), l) == present.end()) present.push_back(l);
    }
  }
  std::sort(present.begin(), present.end());
  return macro_f1(truth, predicted, present);
}

}  // namespace

ValidationStats validate(const NeuralModel& model, const std::vector<Example>& examples, int batch_size) {
  ValidationStats stats;
  if (examples.empty()) return stats;
  std::vector<double> f1s, accs;
  double loss_sum = 0.0;
  const size_t bs = static_cast<size_t>(batch_size);
  for (size_t start = 0; start < examples.size(); start += bs) {
    size_t end = std::min(examples.size(), start + bs);
    std::vector<Label> truth, predicted;
    for (size_t i = start; i < end; ++i) {
      Var z = model.logits(examples[i].ids, nullptr);
      loss_sum += soft_cross_entropy_logits(z, examples[i].target)->value(0, 0);
      truth.push_back(model.labels()[row_argmax(examples[i].target)]);
      predicted.push_back(model.labels()[row_argmax(z->value)]);
    }
    f1s.push_back(batch_f1(truth, predicted));
    accs.push_back(accuracy(truth, predicted));
  }
  stats.loss = loss_sum / static_cast<double>(examples.size());
  stats.f1_batchavg = batch_averaged(f1s);
  stats.acc_batchavg = batch_averaged(accs);
  return stats;
}

TrainingHistory train_loop(NeuralModel& model,
                           const std::function<std::vector<Example>(size_t, size_t)>& make_train,
                           size_t n_train, const std::vector<Example>& validation,
                           const LoopOptions& options) {
  TrainingHistory history;
  if (options.max_epochs <= 0) return history;
  std::vector<Parameter> params = model.parameters();
  AdamW optimizer(params, options.adam);
  Rng rng(options.seed);
  const size_t chunk = options.chunk_size == 0 ? std::max<size_t>(n_train, 1) : options.chunk_size;
  const size_t bs = static_cast<size_t>(options.batch_size);

  std::vector<Matrix> best = snapshot(params);
  double best_score = -std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<Example> cached;  // kept when everything fits in one chunk

  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    for (size_t begin = 0, chunk_no = 0; begin < n_train; begin += chunk, ++chunk_no) {
      size_t end = std::min(n_train, begin + chunk);
      std::vector<Example> fresh;
      if (chunk >= n_train) {
        if (cached.empty()) cached = make_train(begin, end);
      } else {
        fresh = make_train(begin, end);
      }
      const std::vector<Example>& examples = chunk >= n_train ? cached : fresh;
      std::vector<size_t> order = rng.permutation(examples.size());
      for (size_t start = 0; start < order.size(); start += bs) {
        size_t stop = std::min(order.size(), start + bs);
        std::vector<Var> rows;
        Matrix targets(static_cast<long>(stop - start), examples[order[start]].target.cols());
        for (size_t k = start; k < stop; ++k) {
          const Example& ex = examples[order[k]];
          rows.push_back(model.logits(ex.ids, &rng));
          targets.row(static_cast<long>(k - start)) = ex.target;
        }
        Var loss = soft_cross_entropy_logits(concat_rows(rows), targets);
        loss_sum += loss->value(0, 0) * static_cast<double>(stop - start);
        optimizer.zero_grad();
        backward(loss);
        optimizer.step();
      }
      if (options.after_chunk) options.after_chunk(epoch, chunk_no);
    }
    ValidationStats val = validate(model, validation, options.batch_size);
    EpochRecord record{epoch, n_train ? loss_sum / static_cast<double>(n_train) : 0.0, val.loss,
                       val.f1_batchavg, val.acc_batchavg};
    history.epochs.push_back(record);

    double score = 0.0;
    switch (options.selection) {
      case Selection::kLastEpoch:
        score = static_cast<double>(epoch);
        break;
      case Selection::kMinValLoss:
        score = -val.loss;
        break;
      case Selection::kMaxValF1:
        score = val.f1_batchavg;
        break;
    }
    if (score > best_score) {
      best_score = score;
      best = snapshot(params);
      history.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
      if (options.patience > 0 && since_best >= options.patience) break;
    }
  }
  optimizer.zero_grad();
  restore(params, best);
  return history;
}

}  // namespace ocp::nn::internal
