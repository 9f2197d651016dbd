#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace condex {

// Seed for substream `index` of master seed `master` (SplitMix64 finaliser
// over the pair). Substreams are indexed by fixed-size blocks of draws, so
// output does not depend on how blocks are spread across workers.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

  // Uniform on the open interval (0, 1), 53 random bits.
  double uniform();
  double exponential();
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Draws per substream block for all block-parallel generators.
inline constexpr std::size_t kBlockSize = 1u << 14;

// Worker count: explicit value if non-zero, else CONDEX_WORKERS, else the
// hardware concurrency.
unsigned resolve_workers(unsigned requested);

// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
// executed exactly once; callers write to disjoint slots.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace condex
