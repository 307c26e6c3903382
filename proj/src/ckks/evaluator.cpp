#include "hehdc/ckks/evaluator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "hehdc/errors.hpp"

namespace hehdc::ckks {

namespace {

// Centered representative of v (mod from_q) reduced into to_q.
inline u64 recenter(u64 v, u64 from_q, u64 to_q) {
    if (v <= from_q / 2) return v % to_q;
    const u64 m = (from_q - v) % to_q;
    return m == 0 ? 0 : to_q - m;
}

}  // namespace

void Evaluator::add_inplace(Ciphertext& a, const Ciphertext& b) {
    if (a.level != b.level || a.scale_log2 != b.scale_log2)
        throw ScaleMismatch("ciphertext addition needs matching level and scale");
    ring::poly_add(ctx_.ring(), a.c0, b.c0, a.c0);
    ring::poly_add(ctx_.ring(), a.c1, b.c1, a.c1);
    a.seed_compressed = false;
    ++counts_.add_ct;
}

void Evaluator::add_plain_inplace(Ciphertext& a, const Plaintext& pt) {
    if (a.level != pt.level || a.scale_log2 != pt.scale_log2)
        throw ScaleMismatch("plaintext addition needs matching level and scale");
    ring::poly_add(ctx_.ring(), a.c0, pt.poly, a.c0);
    ++counts_.add_pt;
}

void Evaluator::mul_plain_inplace(Ciphertext& a, const Plaintext& pt) {
    if (a.level != pt.level)
        throw ScaleMismatch("plaintext multiply needs matching level");
    const unsigned new_scale = a.scale_log2 + pt.scale_log2;
    if (new_scale >= ctx_.params().ct_modulus_bits(a.level))
        throw OverflowRisk("product scale 2^" + std::to_string(new_scale) +
                           " reaches the ciphertext modulus at level " +
                           std::to_string(a.level));
    ring::poly_mul(ctx_.ring(), a.c0, pt.poly, a.c0);
    ring::poly_mul(ctx_.ring(), a.c1, pt.poly, a.c1);
    a.scale_log2 = new_scale;
    a.seed_compressed = false;
    ++counts_.mul_ct_pt;
}

void Evaluator::rescale_inplace(Ciphertext& a) {
    if (a.level == 0) throw NoLevelLeft("rescale at the bottom of the modulus chain");
    const unsigned level = a.level;
    const u64 dropped = ctx_.ct_prime(level);
    const auto& inv = ctx_.drop_prime_inv(level);

    for (RnsPoly* poly : {&a.c0, &a.c1}) {
        ring::ntt_inverse(ctx_.ring(), *poly);
        for (std::size_t i = 0; i < level; ++i) {
            const u64 qi = ctx_.ct_prime(i);
            const u64 inv_shoup = ring::shoup_precompute(inv[i], qi);
            const u64* last = poly->row(level);
            u64* row = poly->row(i);
            for (std::size_t j = 0; j < poly->n; ++j) {
                const u64 r = recenter(last[j], dropped, qi);
                row[j] = ring::mul_mod_shoup(ring::sub_mod(row[j], r, qi), inv[i], inv_shoup, qi);
            }
        }
        poly->rows = level;
        poly->data.resize(level * poly->n);
        ring::ntt_forward(ctx_.ring(), *poly);
    }
    a.level = level - 1;
    a.scale_log2 -= ctx_.params().prime_bits[level];
    a.seed_compressed = false;
    ++counts_.rescales;
}

void Evaluator::rotate_inplace(Ciphertext& a, std::size_t step, const GaloisKeySet& gks) {
    const std::size_t slots = ctx_.slot_count();
    step %= slots;
    if (step == 0) return;
    if (a.level != 0)
        throw std::logic_error(
            "slot rotation needs a level-0 ciphertext; rescale down before rotating");
    const auto it = gks.by_step.find(step);
    if (it == gks.by_step.end())
        throw MissingGaloisKey("no rotation key for step " + std::to_string(step));

    a.c0 = ring::apply_ntt_permutation(ctx_.ring(), a.c0, it->second.perm);
    a.c1 = ring::apply_ntt_permutation(ctx_.ring(), a.c1, it->second.perm);
    key_switch(a, it->second);
    a.seed_compressed = false;
    ++counts_.rotations;
}

void Evaluator::key_switch(Ciphertext& a, const GaloisKey& gk) {
    const auto& ks = ctx_.ks_ring();
    const u64 q0 = ctx_.ct_prime(0);
    const u64 sp = ctx_.special_prime();

    // Lift the rotated mask to the extended modulus [q0, special]. The q0
    // row keeps its evaluation form; the special row needs the centered
    // coefficients.
    RnsPoly coeff = a.c1;
    ring::ntt_inverse(ctx_.ring(), coeff);

    RnsPoly u = ring::make_poly(ks, 2, ring::Domain::Coefficient);
    for (std::size_t j = 0; j < u.n; ++j) {
        const u64 v = coeff.row(0)[j];
        u.row(1)[j] = recenter(v, q0, sp);
    }
    // Transform only the special row; the q0 row is copied from the
    // existing evaluation form.
    ring::kernels::active().ntt_forward(u.row(1), ks.tables[1]);
    std::copy(a.c1.row(0), a.c1.row(0) + u.n, u.row(0));
    u.domain = ring::Domain::Ntt;

    RnsPoly tb, ta;
    ring::poly_mul(ks, u, gk.b, tb);
    ring::poly_mul(ks, u, gk.a, ta);
    ring::ntt_inverse(ks, tb);
    ring::ntt_inverse(ks, ta);

    // Divide by the special prime with centered rounding; the result lives
    // on the single q0 row.
    const u64 p_inv = ctx_.p_inv_mod_q0();
    const u64 p_inv_shoup = ring::shoup_precompute(p_inv, q0);
    RnsPoly db = ring::make_poly(ctx_.ring(), 1, ring::Domain::Coefficient);
    RnsPoly da = ring::make_poly(ctx_.ring(), 1, ring::Domain::Coefficient);
    for (std::size_t j = 0; j < u.n; ++j) {
        const u64 rb = recenter(tb.row(1)[j], sp, q0);
        const u64 ra = recenter(ta.row(1)[j], sp, q0);
        db.row(0)[j] = ring::mul_mod_shoup(ring::sub_mod(tb.row(0)[j], rb, q0), p_inv,
                                           p_inv_shoup, q0);
        da.row(0)[j] = ring::mul_mod_shoup(ring::sub_mod(ta.row(0)[j], ra, q0), p_inv,
                                           p_inv_shoup, q0);
    }
    ring::ntt_forward(ctx_.ring(), db);
    ring::ntt_forward(ctx_.ring(), da);

    ring::poly_add(ctx_.ring(), a.c0, db, a.c0);
    a.c1 = std::move(da);
    ++counts_.key_switches;
}

void Evaluator::reduce_sum_inplace(Ciphertext& a, std::size_t width, const GaloisKeySet& gks) {
    if (width == 0 || (width & (width - 1)) != 0 || width > ctx_.slot_count())
        throw std::invalid_argument("reduction width must be a power of two within the slots");
    for (std::size_t step = width / 2; step >= 1; step >>= 1) {
        Ciphertext shifted = a;
        rotate_inplace(shifted, step, gks);
        add_inplace(a, shifted);
    }
}

}  // namespace hehdc::ckks
