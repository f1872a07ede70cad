#ifndef OCP_SPLIT_H_
#define OCP_SPLIT_H_

#include <cstdint>
#include <vector>

namespace ocp {

struct TrainValSplit {
  std::vector<size_t> train;
  std::vector<size_t> validation;
};

// Seeded shuffle of 0..n-1; the first floor(n * train_fraction) indices go
// to training. Both folds are non-empty whenever n >= 2.
TrainValSplit seeded_split(size_t n, double train_fraction, uint64_t seed);

}  // namespace ocp

#endif  // OCP_SPLIT_H_
