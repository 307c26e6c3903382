#include "hehdc/ckks/keys.hpp"

#include <cstring>
#include <stdexcept>

namespace hehdc::ckks {

namespace {

// First `rows` residue rows of a key polynomial, as an operand for
// prefix-modulus arithmetic.
RnsPoly prefix_rows(const RnsPoly& p, std::size_t rows) {
    RnsPoly out;
    out.n = p.n;
    out.rows = rows;
    out.domain = p.domain;
    out.data.assign(p.data.begin(), p.data.begin() + rows * p.n);
    return out;
}

RnsPoly ternary_to_rows(const ring::RingContext& rc, const std::vector<int>& coeffs) {
    RnsPoly p = ring::make_poly(rc, rc.primes.size(), ring::Domain::Coefficient);
    for (std::size_t r = 0; r < p.rows; ++r) {
        const u64 q = rc.primes[r];
        for (std::size_t i = 0; i < rc.n; ++i) {
            const int v = coeffs[i];
            p.row(r)[i] = v == 0 ? 0 : (v > 0 ? 1 : q - 1);
        }
    }
    return p;
}

std::array<std::uint8_t, 32> draw_seed(ring::Prng& rng) {
    std::array<std::uint8_t, 32> s{};
    for (int i = 0; i < 4; ++i) {
        const u64 w = rng.next_u64();
        std::memcpy(s.data() + 8 * i, &w, 8);
    }
    return s;
}

}  // namespace

std::vector<std::size_t> power_of_two_steps(const CkksContext& ctx) {
    std::vector<std::size_t> steps;
    for (std::size_t s = 1; s <= ctx.slot_count() / 2; s <<= 1) steps.push_back(s);
    return steps;
}

u64 galois_elt_for_step(const CkksContext& ctx, std::size_t step) {
    const u64 two_n = 2 * ctx.n();
    u64 g = 1;
    for (std::size_t i = 0; i < step; ++i) g = (g * 5) % two_n;
    return g;
}

KeyMaterial keygen(const CkksContext& ctx, u64 seed, const std::vector<std::size_t>& steps) {
    KeyMaterial km;
    km.seed = seed;
    ring::Prng rng(seed);

    km.sk.s_coeff.resize(ctx.n());
    for (auto& c : km.sk.s_coeff) c = rng.next_ternary();
    km.sk.s_ntt = ternary_to_rows(ctx.ring(), km.sk.s_coeff);
    ring::ntt_forward(ctx.ring(), km.sk.s_ntt);

    // Secret over the key-switch modulus [q0, special].
    RnsPoly s_ks = ternary_to_rows(ctx.ks_ring(), km.sk.s_coeff);
    ring::ntt_forward(ctx.ks_ring(), s_ks);

    const u64 two_n = 2 * ctx.n();
    for (std::size_t step : steps) {
        GaloisKey gk;
        gk.step = step;
        gk.galois_elt = galois_elt_for_step(ctx, step);
        gk.perm = ring::galois_ntt_permutation(ctx.params().log2n, gk.galois_elt);

        // s composed with X -> X^g, exactly on the ternary coefficients.
        std::vector<int> sg(ctx.n(), 0);
        for (std::size_t i = 0; i < ctx.n(); ++i) {
            const u64 e = (i * gk.galois_elt) % two_n;
            if (e < ctx.n())
                sg[e] = km.sk.s_coeff[i];
            else
                sg[e - ctx.n()] = -km.sk.s_coeff[i];
        }
        RnsPoly sg_rows = ternary_to_rows(ctx.ks_ring(), sg);
        ring::ntt_forward(ctx.ks_ring(), sg_rows);
        // P * sigma(s): the special-prime row vanishes.
        RnsPoly psg;
        ring::poly_mul_scalar(ctx.ks_ring(), sg_rows,
                              {ctx.special_prime() % ctx.ct_prime(0), 0}, psg);

        gk.a = ring::make_poly(ctx.ks_ring(), 2, ring::Domain::Ntt);
        ring::sample_uniform(ctx.ks_ring(), rng, gk.a);

        RnsPoly e_noise = ring::make_poly(ctx.ks_ring(), 2, ring::Domain::Coefficient);
        ring::sample_gaussian(ctx.ks_ring(), rng, kNoiseStddev, e_noise);
        ring::ntt_forward(ctx.ks_ring(), e_noise);

        RnsPoly as;
        ring::poly_mul(ctx.ks_ring(), gk.a, s_ks, as);
        ring::poly_negate(ctx.ks_ring(), as, gk.b);
        ring::poly_add(ctx.ks_ring(), gk.b, e_noise, gk.b);
        ring::poly_add(ctx.ks_ring(), gk.b, psg, gk.b);

        km.gks.by_step.emplace(step, std::move(gk));
    }
    return km;
}

Ciphertext encrypt(const CkksContext& ctx, const Plaintext& pt, const SecretKey& sk,
                   ring::Prng& rng) {
    if (pt.poly.domain != ring::Domain::Ntt) throw std::logic_error("plaintext must be in NTT domain");
    const std::size_t rows = ctx.rows_at(pt.level);

    Ciphertext ct;
    ct.scale_log2 = pt.scale_log2;
    ct.level = pt.level;
    ct.seed_compressed = true;
    ct.c1_seed = draw_seed(rng);

    ring::Prng mask_rng(ct.c1_seed);
    ct.c1 = ring::make_poly(ctx.ring(), rows, ring::Domain::Ntt);
    ring::sample_uniform(ctx.ring(), mask_rng, ct.c1);

    RnsPoly e = ring::make_poly(ctx.ring(), rows, ring::Domain::Coefficient);
    ring::sample_gaussian(ctx.ring(), rng, kNoiseStddev, e);
    ring::ntt_forward(ctx.ring(), e);

    const RnsPoly s = prefix_rows(sk.s_ntt, rows);
    RnsPoly c1s;
    ring::poly_mul(ctx.ring(), ct.c1, s, c1s);
    ring::poly_negate(ctx.ring(), c1s, ct.c0);
    ring::poly_add(ctx.ring(), ct.c0, pt.poly, ct.c0);
    ring::poly_add(ctx.ring(), ct.c0, e, ct.c0);
    return ct;
}

void expand_c1(const CkksContext& ctx, Ciphertext& ct) {
    if (!ct.seed_compressed) return;
    ring::Prng mask_rng(ct.c1_seed);
    ct.c1 = ring::make_poly(ctx.ring(), ctx.rows_at(ct.level), ring::Domain::Ntt);
    ring::sample_uniform(ctx.ring(), mask_rng, ct.c1);
}

RnsPoly decrypt(const CkksContext& ctx, const Ciphertext& ct, const SecretKey& sk) {
    const std::size_t rows = ctx.rows_at(ct.level);
    const RnsPoly s = prefix_rows(sk.s_ntt, rows);
    RnsPoly m;
    ring::poly_mul(ctx.ring(), ct.c1, s, m);
    ring::poly_add(ctx.ring(), m, ct.c0, m);
    ring::ntt_inverse(ctx.ring(), m);
    return m;
}

std::vector<double> decrypt_values(const CkksContext& ctx, const Ciphertext& ct,
                                   const SecretKey& sk) {
    return decode(ctx, decrypt(ctx, ct, sk), ct.scale_log2);
}

}  // namespace hehdc::ckks
