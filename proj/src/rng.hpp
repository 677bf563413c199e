#pragma once

#include <cstdint>

namespace hpk {

// splitmix64; self-contained so streams are bit-identical across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform01() { return (double)(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) {
        if (lo == hi) return lo;
        return lo + uniform01() * (hi - lo);
    }

    std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : next() % n; }

private:
    std::uint64_t state_;
};

// Stream seed for run `index` of a batch seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0xA0761D6478BD642Full * (index + 1)));
    return mix.next();
}

} // namespace hpk
