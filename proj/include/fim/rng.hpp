#pragma once

#include <cstdint>

namespace fim {

// Counter-based generator with explicit state and independent substreams.
// Stream k is a splitmix64 sequence started at a key mixed from (seed, k),
// so per-path draws are reproducible regardless of scheduling.
class Rng {
  public:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
        Rng r;
        r.state_ = mix(mix(seed) ^ (stream * 0xD2B74407B1CE6E93ULL + 0x8BB84B93962EACC9ULL));
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on (0,1), never exactly 0 or 1.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double next_normal(); // inverse-CDF; one uniform per draw

  private:
    std::uint64_t state_ = 0;
};

} // namespace fim
