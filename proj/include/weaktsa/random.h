// Seeded randomness.  Every random decision in the pipeline goes through Rng
// so that results depend only on the seed and not on the standard library's
// distribution implementations.

#ifndef WEAKTSA_RANDOM_H_
#define WEAKTSA_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace weaktsa {

// Mixes a root seed with a stage name and an index into an independent seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage,
                          std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n); n > 0.
  std::size_t uniform(std::size_t n);

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices from [0, n), returned in ascending order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace weaktsa

#endif  // WEAKTSA_RANDOM_H_
