#ifndef OCP_RNG_H_
#define OCP_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ocp {

// Seeded generator whose derived distributions are defined here rather than
// by the standard library, so a seed gives the same stream on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }
  // Uniform integer in [0, bound). bound must be > 0.
  uint64_t uniform_int(uint64_t bound);
  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = uniform_int(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  std::vector<size_t> permutation(size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ocp

#endif  // OCP_RNG_H_
