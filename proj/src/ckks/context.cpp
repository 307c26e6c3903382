#include "hehdc/ckks/context.hpp"

#include <cmath>
#include <numbers>

namespace hehdc::ckks {

namespace {

CkksContext build(const CkksParams& p) {
    return CkksContext::create_unchecked(p);
}

}  // namespace

CkksContext CkksContext::create(const CkksParams& p) {
    validate(p);
    return build(p);
}

CkksContext CkksContext::create_unchecked(const CkksParams& p) {
    CkksContext ctx;
    ctx.params_ = p;
    const auto primes = ring::find_chain_primes(p.log2n, p.prime_bits);
    ctx.ring_ = ring::make_ring_context(p.log2n, primes);
    ctx.ks_ring_ = ring::make_ring_context(p.log2n, {primes.front(), primes.back()});

    const u64 q0 = primes.front();
    const u64 sp = primes.back();
    ctx.p_mod_q0_ = sp % q0;
    ctx.p_inv_mod_q0_ = ring::inv_mod(sp % q0, q0);

    const std::size_t ct_count = p.ct_prime_count();
    ctx.drop_inv_.resize(ct_count);
    for (std::size_t level = 1; level < ct_count; ++level) {
        const u64 dropped = primes[level];
        std::vector<u64> inv(level);
        for (std::size_t i = 0; i < level; ++i)
            inv[i] = ring::inv_mod(dropped % primes[i], primes[i]);
        ctx.drop_inv_[level] = std::move(inv);
    }

    const std::size_t two_n = 2 * p.n();
    ctx.ksi_.resize(two_n + 1);
    for (std::size_t k = 0; k <= two_n; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                             static_cast<double>(two_n);
        ctx.ksi_[k] = {std::cos(angle), std::sin(angle)};
    }
    ctx.rot_group_.resize(p.slot_count());
    u64 g = 1;
    for (std::size_t j = 0; j < p.slot_count(); ++j) {
        ctx.rot_group_[j] = static_cast<std::uint32_t>(g);
        g = (g * 5) % two_n;
    }
    return ctx;
}

}  // namespace hehdc::ckks
