#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hehdc/ring/kernels.hpp"
#include "hehdc/ring/modmath.hpp"
#include "hehdc/ring/sampling.hpp"

// Elements of Z_Q[X]/(X^n + 1) in residue form: one row of n coefficients
// per prime in the chain. Negacyclic NTT per row gives pointwise products.

namespace hehdc::ring {

struct RingContext {
    std::size_t n = 0;
    unsigned log2n = 0;
    std::vector<u64> primes;
    std::vector<kernels::NttTables> tables;
    std::vector<BarrettConst> barrett;
};

// Distinct NTT primes (q = 1 mod 2n), one per requested bit width, chosen
// by downward search so the same widths always yield the same chain.
std::vector<u64> find_chain_primes(unsigned log2n, const std::vector<unsigned>& bit_widths);

RingContext make_ring_context(unsigned log2n, const std::vector<u64>& primes);

enum class Domain : std::uint8_t { Coefficient = 0, Ntt = 1 };

struct RnsPoly {
    std::size_t n = 0;
    std::size_t rows = 0;
    Domain domain = Domain::Coefficient;
    std::vector<u64> data;

    u64* row(std::size_t i) { return data.data() + i * n; }
    const u64* row(std::size_t i) const { return data.data() + i * n; }
};

RnsPoly make_poly(const RingContext& ctx, std::size_t rows, Domain d);

void ntt_forward(const RingContext& ctx, RnsPoly& p);
void ntt_inverse(const RingContext& ctx, RnsPoly& p);

// Elementwise ring ops; operands must agree in rows and domain.
void poly_add(const RingContext& ctx, const RnsPoly& a, const RnsPoly& b, RnsPoly& out);
void poly_sub(const RingContext& ctx, const RnsPoly& a, const RnsPoly& b, RnsPoly& out);
void poly_negate(const RingContext& ctx, const RnsPoly& a, RnsPoly& out);
// Pointwise product; both operands must be in the NTT domain.
void poly_mul(const RingContext& ctx, const RnsPoly& a, const RnsPoly& b, RnsPoly& out);
// Per-row scalar multiply (the scalar differs per prime, e.g. q_l^{-1} mod q_i).
void poly_mul_scalar(const RingContext& ctx, const RnsPoly& a, const std::vector<u64>& s,
                     RnsPoly& out);

// X -> X^g for odd g, acting on coefficients with negacyclic sign wrap.
RnsPoly galois_automorphism(const RingContext& ctx, const RnsPoly& a, u64 g);

// The same map applied directly to NTT-domain values: a permutation of the
// evaluation points. perm[i] gives the source index for output slot i.
std::vector<std::uint32_t> galois_ntt_permutation(unsigned log2n, u64 g);
RnsPoly apply_ntt_permutation(const RingContext& ctx, const RnsPoly& a,
                              const std::vector<std::uint32_t>& perm);

// Samplers. Gaussian and ternary draw one signed integer per coefficient
// and reduce it into every residue row; uniform draws each row independently.
void sample_uniform(const RingContext& ctx, Prng& prng, RnsPoly& p);
void sample_gaussian(const RingContext& ctx, Prng& prng, double sigma, RnsPoly& p);
void sample_ternary(const RingContext& ctx, Prng& prng, RnsPoly& p);

inline std::uint32_t bit_reverse(std::uint32_t v, unsigned bits) {
    std::uint32_t r = 0;
    for (unsigned i = 0; i < bits; ++i) {
        r = (r << 1) | (v & 1);
        v >>= 1;
    }
    return r;
}

}  // namespace hehdc::ring
