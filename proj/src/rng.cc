#include "ocp/rng.h"

#include "ocp/error.h"
#include "ocp/split.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ocp {

uint64_t Rng::uniform_int(uint64_t bound) {
  // Rejection sampling removes modulo bias.
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

std::vector<size_t> Rng::permutation(size_t n) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  shuffle(std::span<size_t>(order));
  return order;
}

TrainValSplit seeded_split(size_t n, double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "split ratio must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<size_t> order = rng.permutation(n);
  size_t n_train = static_cast<size_t>(static_cast<double>(n) * train_fraction);
  if (n >= 2) n_train = std::clamp<size_t>(n_train, 1, n - 1);
  TrainValSplit split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.validation.assign(order.begin() + n_train, order.end());
  return split;
}

}  // namespace ocp
