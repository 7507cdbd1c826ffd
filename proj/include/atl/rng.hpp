#pragma once

#include <cstdint>
#include <random>

namespace atl {

// All randomness in the project flows through one 64-bit config seed; ops mix
// in a tag so independent operations draw independent streams. Uniforms are
// built from raw engine output so results do not depend on the standard
// library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
        std::uint64_t z = seed ^ (tag + 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    // Symmetric in [-1, 1].
    double sym() { return uniform(-1.0, 1.0); }

private:
    std::mt19937_64 eng_;
};

}  // namespace atl
