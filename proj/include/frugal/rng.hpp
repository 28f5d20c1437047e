#pragma once

#include <cstdint>
#include <string_view>

namespace frugal {

// Abstract source of uniform draws in [0,1). Learners and the game loop
// consume randomness exclusively through this interface, one draw at a
// time, so tests can inject a fixed u-stream and replay decisions.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual double uniform01() = 0;
};

// SplitMix64: counter-based 64-bit generator (Steele, Lea, Vigna).
// State advances by a fixed odd constant; each output is a finalizer
// of the state, so streams are reproducible across languages from the
// seed alone. Family tag: "splitmix64/v1".
class SplitMix64 final : public RandomSource {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // 53-bit mantissa uniform in [0,1).
    double uniform01() override {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// floor(u * n) with a clamp guarding the (impossible in exact
// arithmetic) u*n == n rounding case.
std::size_t uniform_index(RandomSource& rng, std::size_t n);

// Stable 64-bit seed derivation, pinned so that any implementation can
// reproduce the streams:
//   mix(z)        = splitmix64 finalizer of (z + 0x9E3779B97F4A7C15)
//   fnv1a64(s)    = FNV-1a over the bytes of s
//   derive(seed, label, index) = mix(mix(seed ^ fnv1a64(label)) ^ mix(index + 1))
std::uint64_t mix64(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

// Generator metadata echoed in experiment output.
inline constexpr std::string_view kGeneratorFamily = "splitmix64";
inline constexpr int kGeneratorVersion = 1;

} // namespace frugal
