#pragma once

#include <cstdint>

namespace hamlearn {

/// Minimal counter-based generator (splitmix64). Used everywhere a seeded
/// stream is needed so results are reproducible bit-for-bit across platforms,
/// unlike the standard-library distributions whose algorithms are
/// implementation-defined.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-scale, scale).
    double uniform_symmetric(double scale) { return scale * (2.0 * uniform01() - 1.0); }

  private:
    std::uint64_t state_;
};

/// Derives an independent sub-seed from (seed, index). Restart runs and
/// simulation rows each get their own stream so results are independent of
/// evaluation order and thread schedule.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0xd1b54a32d192ed03ULL * (index + 1)));
    return mixer.next();
}

} // namespace hamlearn
