#include "hehdc/ring/sampling.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

namespace hehdc::ring {

namespace {

u64 splitmix64(u64& x) {
    x += 0x9e3779b97f4a7c15ULL;
    u64 z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline u64 rotl(u64 x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Prng::Prng(u64 seed) {
    u64 x = seed;
    for (auto& w : s_) w = splitmix64(x);
}

Prng::Prng(const std::array<std::uint8_t, 32>& seed_bytes) {
    std::memcpy(s_.data(), seed_bytes.data(), 32);
    // xoshiro must not start from the all-zero state.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;
}

u64 Prng::next_u64() {
    // xoshiro256++
    const u64 result = rotl(s_[0] + s_[3], 23) + s_[0];
    const u64 t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

u64 Prng::uniform_below(u64 bound) {
    // Reject draws from the final partial bucket.
    const u64 threshold = (0 - bound) % bound;
    for (;;) {
        u64 r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

double Prng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Prng::next_gaussian() {
    if (has_cached_gaussian_) {
        has_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_gaussian_ = r * std::sin(theta);
    has_cached_gaussian_ = true;
    return r * std::cos(theta);
}

int Prng::next_ternary() {
    return static_cast<int>(uniform_below(3)) - 1;
}

std::array<std::uint8_t, 32> Prng::state_bytes() const {
    std::array<std::uint8_t, 32> out{};
    std::memcpy(out.data(), s_.data(), 32);
    return out;
}

std::array<std::uint8_t, 32> derive_seed(u64 base_seed, u64 counter) {
    u64 x = base_seed ^ (0xd6e8feb86659fd93ULL * (counter + 1));
    std::array<std::uint8_t, 32> out{};
    for (int i = 0; i < 4; ++i) {
        const u64 w = splitmix64(x);
        std::memcpy(out.data() + 8 * i, &w, 8);
    }
    return out;
}

}  // namespace hehdc::ring
