#include "hehdc/ring/rns_poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hehdc::ring {

std::vector<u64> find_chain_primes(unsigned log2n, const std::vector<unsigned>& bit_widths) {
    const u64 two_n = 2ULL << log2n;
    std::vector<u64> primes;
    for (unsigned w : bit_widths) {
        if (w < log2n + 2 || w > 60) throw std::invalid_argument("prime width out of range");
        u64 upper = 1ULL << w;
        for (;;) {
            u64 p = find_prime_below(upper, two_n);
            if (std::find(primes.begin(), primes.end(), p) == primes.end()) {
                primes.push_back(p);
                break;
            }
            upper = p;
        }
    }
    return primes;
}

RingContext make_ring_context(unsigned log2n, const std::vector<u64>& primes) {
    RingContext ctx;
    ctx.log2n = log2n;
    ctx.n = 1ULL << log2n;
    ctx.primes = primes;
    const u64 two_n = 2 * ctx.n;
    for (u64 q : primes) {
        if (q % two_n != 1) throw std::invalid_argument("prime not 1 mod 2n");
        u64 psi = find_primitive_root(q, two_n);
        ctx.tables.push_back(kernels::make_ntt_tables(ctx.n, q, psi));
        ctx.barrett.push_back(barrett_precompute(q));
    }
    return ctx;
}

RnsPoly make_poly(const RingContext& ctx, std::size_t rows, Domain d) {
    RnsPoly p;
    p.n = ctx.n;
    p.rows = rows;
    p.domain = d;
    p.data.assign(rows * ctx.n, 0);
    return p;
}

namespace {

void check_binary(const RnsPoly& a, const RnsPoly& b) {
    if (a.n != b.n || a.rows != b.rows || a.domain != b.domain)
        throw std::invalid_argument("operand shape mismatch");
}

// Reallocates only on shape change, so out may alias an input: the kernels
// are elementwise and safe in place.
void ensure_shape(const RingContext& ctx, RnsPoly& out, std::size_t rows, Domain d) {
    if (out.n != ctx.n || out.rows != rows) {
        out.n = ctx.n;
        out.rows = rows;
        out.data.assign(rows * ctx.n, 0);
    }
    out.domain = d;
}

}  // namespace

void ntt_forward(const RingContext& ctx, RnsPoly& p) {
    if (p.domain != Domain::Coefficient) throw std::logic_error("already in NTT domain");
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < p.rows; ++i) k.ntt_forward(p.row(i), ctx.tables[i]);
    p.domain = Domain::Ntt;
}

void ntt_inverse(const RingContext& ctx, RnsPoly& p) {
    if (p.domain != Domain::Ntt) throw std::logic_error("already in coefficient domain");
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < p.rows; ++i) k.ntt_inverse(p.row(i), ctx.tables[i]);
    p.domain = Domain::Coefficient;
}

void poly_add(const RingContext& ctx, const RnsPoly& a, const RnsPoly& b, RnsPoly& out) {
    check_binary(a, b);
    ensure_shape(ctx, out, a.rows, a.domain);
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < a.rows; ++i)
        k.add_mod_n(out.row(i), a.row(i), b.row(i), ctx.primes[i], a.n);
}

void poly_sub(const RingContext& ctx, const RnsPoly& a, const RnsPoly& b, RnsPoly& out) {
    check_binary(a, b);
    ensure_shape(ctx, out, a.rows, a.domain);
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < a.rows; ++i)
        k.sub_mod_n(out.row(i), a.row(i), b.row(i), ctx.primes[i], a.n);
}

void poly_negate(const RingContext& ctx, const RnsPoly& a, RnsPoly& out) {
    ensure_shape(ctx, out, a.rows, a.domain);
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < a.rows; ++i)
        k.neg_mod_n(out.row(i), a.row(i), ctx.primes[i], a.n);
}

void poly_mul(const RingContext& ctx, const RnsPoly& a, const RnsPoly& b, RnsPoly& out) {
    check_binary(a, b);
    if (a.domain != Domain::Ntt) throw std::logic_error("pointwise product needs NTT domain");
    ensure_shape(ctx, out, a.rows, Domain::Ntt);
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < a.rows; ++i)
        k.mul_mod_n(out.row(i), a.row(i), b.row(i), ctx.primes[i], ctx.barrett[i], a.n);
}

void poly_mul_scalar(const RingContext& ctx, const RnsPoly& a, const std::vector<u64>& s,
                     RnsPoly& out) {
    if (s.size() < a.rows) throw std::invalid_argument("scalar per row required");
    ensure_shape(ctx, out, a.rows, a.domain);
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < a.rows; ++i) {
        const u64 sh = shoup_precompute(s[i] % ctx.primes[i], ctx.primes[i]);
        k.mul_scalar_mod_n(out.row(i), a.row(i), s[i] % ctx.primes[i], sh, ctx.primes[i], a.n);
    }
}

RnsPoly galois_automorphism(const RingContext& ctx, const RnsPoly& a, u64 g) {
    if (a.domain != Domain::Coefficient)
        throw std::logic_error("coefficient-domain automorphism on NTT input");
    if ((g & 1) == 0) throw std::invalid_argument("galois element must be odd");
    const u64 two_n = 2 * ctx.n;
    RnsPoly out = make_poly(ctx, a.rows, Domain::Coefficient);
    for (std::size_t r = 0; r < a.rows; ++r) {
        const u64 q = ctx.primes[r];
        const u64* src = a.row(r);
        u64* dst = out.row(r);
        for (std::size_t i = 0; i < ctx.n; ++i) {
            const u64 j = (i * g) % two_n;
            if (j < ctx.n) {
                dst[j] = src[i];
            } else {
                dst[j - ctx.n] = neg_mod(src[i], q);
            }
        }
    }
    return out;
}

std::vector<std::uint32_t> galois_ntt_permutation(unsigned log2n, u64 g) {
    const std::uint32_t n = 1u << log2n;
    const u64 two_n = 2ULL * n;
    std::vector<std::uint32_t> perm(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        // Output slot i holds the evaluation at psi^(2*brv(i)+1); the
        // automorphism pulls in the evaluation at that exponent times g.
        const u64 e = ((2ULL * bit_reverse(i, log2n) + 1) * g) % two_n;
        perm[i] = bit_reverse(static_cast<std::uint32_t>((e - 1) / 2), log2n);
    }
    return perm;
}

RnsPoly apply_ntt_permutation(const RingContext& ctx, const RnsPoly& a,
                              const std::vector<std::uint32_t>& perm) {
    if (a.domain != Domain::Ntt) throw std::logic_error("permutation needs NTT domain");
    RnsPoly out = make_poly(ctx, a.rows, Domain::Ntt);
    for (std::size_t r = 0; r < a.rows; ++r) {
        const u64* src = a.row(r);
        u64* dst = out.row(r);
        for (std::size_t i = 0; i < ctx.n; ++i) dst[i] = src[perm[i]];
    }
    return out;
}

void sample_uniform(const RingContext& ctx, Prng& prng, RnsPoly& p) {
    for (std::size_t r = 0; r < p.rows; ++r) {
        u64* dst = p.row(r);
        const u64 q = ctx.primes[r];
        for (std::size_t i = 0; i < ctx.n; ++i) dst[i] = prng.uniform_below(q);
    }
}

void sample_gaussian(const RingContext& ctx, Prng& prng, double sigma, RnsPoly& p) {
    if (p.domain != Domain::Coefficient) throw std::logic_error("noise is sampled on coefficients");
    for (std::size_t i = 0; i < ctx.n; ++i) {
        const auto e = static_cast<long long>(std::llround(prng.next_gaussian() * sigma));
        for (std::size_t r = 0; r < p.rows; ++r) {
            const u64 q = ctx.primes[r];
            p.row(r)[i] = e >= 0 ? static_cast<u64>(e) % q
                                 : q - (static_cast<u64>(-e) % q);
        }
    }
}

void sample_ternary(const RingContext& ctx, Prng& prng, RnsPoly& p) {
    if (p.domain != Domain::Coefficient) throw std::logic_error("secrets are sampled on coefficients");
    for (std::size_t i = 0; i < ctx.n; ++i) {
        const int t = prng.next_ternary();
        for (std::size_t r = 0; r < p.rows; ++r) {
            const u64 q = ctx.primes[r];
            p.row(r)[i] = t == 0 ? 0 : (t > 0 ? 1 : q - 1);
        }
    }
}

}  // namespace hehdc::ring
