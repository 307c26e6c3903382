#pragma once

#include <cstdint>
#include <stdexcept>

// Scalar 64-bit modular arithmetic for NTT-friendly primes up to 60 bits.
// All residues are kept fully reduced in [0, q); q < 2^62 everywhere.

namespace hehdc::ring {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr u64 add_mod(u64 a, u64 b, u64 q) {
    u64 r = a + b;
    return r >= q ? r - q : r;
}

inline constexpr u64 sub_mod(u64 a, u64 b, u64 q) {
    return a >= b ? a - b : a + q - b;
}

inline constexpr u64 neg_mod(u64 a, u64 q) {
    return a == 0 ? 0 : q - a;
}

inline u64 mul_hi64(u64 a, u64 b) {
    return static_cast<u64>((static_cast<u128>(a) * b) >> 64);
}

inline u64 mul_mod(u64 a, u64 b, u64 q) {
    return static_cast<u64>(static_cast<u128>(a) * b % q);
}

// Shoup multiplication: multiply by a constant s whose quotient
// s_shoup = floor(s * 2^64 / q) has been precomputed. Requires s < q.
inline u64 shoup_precompute(u64 s, u64 q) {
    return static_cast<u64>((static_cast<u128>(s) << 64) / q);
}

inline u64 mul_mod_shoup(u64 a, u64 s, u64 s_shoup, u64 q) {
    u64 hi = mul_hi64(a, s_shoup);
    u64 r = s * a - hi * q;  // in [0, 2q)
    return r >= q ? r - q : r;
}

// Barrett constants for variable x variable multiplication mod q.
// shift = bitlen(q) - 1, mu = floor(2^(64+shift) / q).
// The quotient estimate undershoots by at most 2, so two conditional
// subtractions make the result exact.
struct BarrettConst {
    u64 mu = 0;
    unsigned shift = 0;
};

inline unsigned bit_length(u64 v) {
    unsigned bits = 0;
    while (v != 0) {
        ++bits;
        v >>= 1;
    }
    return bits;
}

inline BarrettConst barrett_precompute(u64 q) {
    if (q < 3) throw std::invalid_argument("modulus too small");
    BarrettConst c;
    c.shift = bit_length(q) - 1;
    c.mu = static_cast<u64>((static_cast<u128>(1) << (64 + c.shift)) / q);
    return c;
}

inline u64 mul_mod_barrett(u64 a, u64 b, u64 q, const BarrettConst& c) {
    u128 p = static_cast<u128>(a) * b;
    u64 lo = static_cast<u64>(p);
    u64 hi = static_cast<u64>(p >> 64);
    u64 t = (hi << (64 - c.shift)) | (lo >> c.shift);
    u64 u = mul_hi64(t, c.mu);
    u64 r = lo - u * q;
    if (r >= q) r -= q;
    if (r >= q) r -= q;
    return r;
}

inline u64 pow_mod(u64 base, u64 exp, u64 q) {
    u64 r = 1 % q;
    u64 b = base % q;
    while (exp != 0) {
        if (exp & 1) r = mul_mod(r, b, q);
        b = mul_mod(b, b, q);
        exp >>= 1;
    }
    return r;
}

// Modular inverse for prime q.
inline u64 inv_mod(u64 a, u64 q) {
    if (a == 0) throw std::invalid_argument("inverse of zero");
    return pow_mod(a, q - 2, q);
}

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime(u64 n);

// Largest prime p < upper with p = 1 (mod modulo_step). Throws if none.
u64 find_prime_below(u64 upper, u64 modulo_step);

// Primitive 2n-th root of unity mod q (q = 1 mod 2n, n a power of two).
u64 find_primitive_root(u64 q, u64 two_n);

}  // namespace hehdc::ring
