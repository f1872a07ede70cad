#ifndef OCP_SRC_TREES_H_
#define OCP_SRC_TREES_H_

#include <vector>

#include "ocp/baselines.h"

namespace ocp::internal {

// Bootstrap forest of gini trees; `classes` holds class indices in
// [0, n_classes) and `sample_weight` the per-row loss weights.
ForestParams train_forest(const std::vector<SparseVector>& x,
                          const std::vector<uint32_t>& classes,
                          size_t n_classes,
                          const std::vector<double>& sample_weight,
                          const BaselineHyperparams& hp);

// Second-order boosting of logistic loss with exact greedy splits and
// learned default directions for absent entries. `targets` are 0/1.
BoostParams train_boosting(const std::vector<SparseVector>& x,
                           const std::vector<double>& targets,
                           const std::vector<double>& sample_weight,
                           const BaselineHyperparams& hp);

}  // namespace ocp::internal

#endif  // OCP_SRC_TREES_H_
