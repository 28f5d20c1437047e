#include "frugal/rng.hpp"

namespace frugal {

std::size_t uniform_index(RandomSource& rng, std::size_t n) {
    const double u = rng.uniform01();
    auto k = static_cast<std::size_t>(u * static_cast<double>(n));
    return k < n ? k : n - 1;
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index) {
    return mix64(mix64(seed ^ fnv1a64(label)) ^ mix64(index + 1));
}

} // namespace frugal
