#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace emtl {

// splitmix64 counter stream keyed by (seed, name). Independent named streams
// make initialization reproducible regardless of the order in which layers
// are constructed: the stream for "init/embedding" is the same whether or not
// an auxiliary head exists in the model.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view name) : state_(mix(seed ^ fnv1a(name))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0,n), n > 0
  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

// Deterministic in-place Fisher-Yates shuffle driven by a named stream.
template <typename T>
void seeded_shuffle(std::vector<T>& items, RngStream& rng) {
  for (int i = static_cast<int>(items.size()) - 1; i > 0; --i) {
    int j = rng.uniform_int(i + 1);
    std::swap(items[static_cast<std::size_t>(i)], items[static_cast<std::size_t>(j)]);
  }
}

}  // namespace emtl
