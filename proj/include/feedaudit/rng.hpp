#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace feedaudit {

// All randomness in the project flows through this wrapper: a named engine
// (std::mt19937_64, whose output sequence is pinned by the C++ standard)
// plus explicit inverse-CDF transforms, so "same algorithm id + same seed"
// reproduces the same stream on any platform. The id is recorded in dataset
// manifests.
inline constexpr char kRngAlgorithmId[] = "mt19937_64+invcdf";

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Exponential inter-arrival time; rate must be > 0.
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // Uniform integer in [0, n); rejection sampling, exactly unbiased.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

private:
    std::mt19937_64 engine_;
};

// Independent sub-stream seed for replicate/run `stream` (splitmix64 mix).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + (stream + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace feedaudit
