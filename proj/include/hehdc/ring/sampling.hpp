#pragma once

#include <array>
#include <cstdint>

// Deterministic randomness. Wire formats include PRNG seeds, so generation
// must be stable across compilers and standard libraries; std::mt19937 and
// std::normal_distribution are not, hence the self-contained generator.

namespace hehdc::ring {

using u64 = std::uint64_t;

class Prng {
public:
    explicit Prng(u64 seed);
    explicit Prng(const std::array<std::uint8_t, 32>& seed_bytes);

    u64 next_u64();
    // Unbiased draw from [0, bound) by rejection.
    u64 uniform_below(u64 bound);
    // [0, 1) with 53 bits of precision.
    double next_double();
    // Standard normal via Box-Muller.
    double next_gaussian();
    // Uniform over {-1, 0, 1}.
    int next_ternary();

    std::array<std::uint8_t, 32> state_bytes() const;

private:
    std::array<u64, 4> s_;
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

// Fresh 32-byte seed derived from a counter and a base seed; used where a
// ciphertext stores its mask as a seed instead of a full polynomial.
std::array<std::uint8_t, 32> derive_seed(u64 base_seed, u64 counter);

}  // namespace hehdc::ring
