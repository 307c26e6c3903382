#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hehdc/ckks/params.hpp"
#include "hehdc/ring/rns_poly.hpp"

namespace hehdc::ckks {

using ring::u64;

// Precomputed state shared by every operation under one parameter set.
class CkksContext {
public:
    // Validates the parameter set first.
    static CkksContext create(const CkksParams& p);
    // Skips validation; for reduced-size internal testing only.
    static CkksContext create_unchecked(const CkksParams& p);

    const CkksParams& params() const { return params_; }
    const ring::RingContext& ring() const { return ring_; }
    // Two-row context [q0, special] used by key switching.
    const ring::RingContext& ks_ring() const { return ks_ring_; }

    std::size_t n() const { return params_.n(); }
    std::size_t slot_count() const { return params_.slot_count(); }
    std::size_t rows_at(unsigned level) const { return level + 1; }
    std::size_t key_rows() const { return ring_.primes.size(); }
    u64 ct_prime(std::size_t i) const { return ring_.primes[i]; }
    u64 special_prime() const { return ring_.primes.back(); }

    // Key-switch constants over q0.
    u64 p_mod_q0() const { return p_mod_q0_; }
    u64 p_inv_mod_q0() const { return p_inv_mod_q0_; }
    // Rescale constants: inverse of q_level modulo each lower prime.
    const std::vector<u64>& drop_prime_inv(unsigned level) const {
        return drop_inv_[level];
    }

    // Embedding tables.
    const std::vector<std::complex<double>>& ksi() const { return ksi_; }
    const std::vector<std::uint32_t>& rot_group() const { return rot_group_; }

private:
    CkksContext() = default;

    CkksParams params_;
    ring::RingContext ring_;
    ring::RingContext ks_ring_;
    u64 p_mod_q0_ = 0;
    u64 p_inv_mod_q0_ = 0;
    std::vector<std::vector<u64>> drop_inv_;
    std::vector<std::complex<double>> ksi_;
    std::vector<std::uint32_t> rot_group_;
};

}  // namespace hehdc::ckks
