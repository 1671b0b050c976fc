#pragma once

#include <cstdint>
#include <random>

namespace qpec {

/// Seedable stream of randomness. Substreams are derived from a master seed
/// and a stream index via splitmix64, so trial k of a run is reproducible
/// independently of how trials are scheduled across threads.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(splitmix64(seed)) {}

    static Rng substream(uint64_t master_seed, uint64_t index) {
        return Rng(splitmix64(master_seed) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 1));
    }

    uint64_t next() { return gen_(); }

    /// uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// uniform in [0, n)
    uint64_t below(uint64_t n) {
        std::uniform_int_distribution<uint64_t> d(0, n - 1);
        return d(gen_);
    }

    std::mt19937_64& engine() { return gen_; }

  private:
    static uint64_t splitmix64(uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace qpec
