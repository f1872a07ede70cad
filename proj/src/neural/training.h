#ifndef OCP_SRC_NEURAL_TRAINING_H_
#define OCP_SRC_NEURAL_TRAINING_H_

#include <functional>
#include <vector>

#include "ocp/neural/model.h"
#include "ocp/neural/optim.h"

namespace ocp::nn::internal {

struct Example {
  std::vector<int> ids;
  Matrix target;  // 1 x n_classes, on the simplex
};

enum class Selection { kLastEpoch, kMinValLoss, kMaxValF1 };

struct LoopOptions {
  int batch_size = 32;
  int max_epochs = 3;
  Selection selection = Selection::kLastEpoch;
  int patience = 0;  // epochs without improvement before stopping; 0 never stops
  AdamConfig adam;
  uint64_t seed = 0;
  size_t chunk_size = 0;  // 0: the whole training fold is one chunk
  std::function<void(int epoch, size_t chunk)> after_chunk;
};

// Trains `model` in place and leaves it holding the selected epoch's
// weights. `make_train(begin, end)` materialises training examples
// [begin, end) so large folds can be encoded one chunk at a time.
TrainingHistory train_loop(NeuralModel& model,
                           const std::function<std::vector<Example>(size_t, size_t)>& make_train,
                           size_t n_train, const std::vector<Example>& validation,
                           const LoopOptions& options);

// Mean loss, batch-averaged macro F1 and accuracy over `examples` in
// evaluation mode.
struct ValidationStats {
  double loss = 0.0;
  double f1_batchavg = 0.0;
  double acc_batchavg = 0.0;
};
ValidationStats validate(const NeuralModel& model, const std::vector<Example>& examples, int batch_size);

}  // namespace ocp::nn::internal

#endif  // OCP_SRC_NEURAL_TRAINING_H_
