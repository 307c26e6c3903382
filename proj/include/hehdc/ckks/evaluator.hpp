#pragma once

#include <cstddef>

#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/objects.hpp"

namespace hehdc::ckks {

struct OpCounts {
    std::size_t mul_ct_pt = 0;
    std::size_t add_ct = 0;
    std::size_t add_pt = 0;
    std::size_t rotations = 0;
    std::size_t rescales = 0;
    std::size_t key_switches = 0;
};

// Homomorphic operations on symmetric ciphertexts. There is deliberately no
// ciphertext-ciphertext multiply and no decryption here: similarity against
// plaintext class vectors needs neither, and the side holding this object
// never holds the secret key.
class Evaluator {
public:
    explicit Evaluator(const CkksContext& ctx) : ctx_(ctx) {}

    void add_inplace(Ciphertext& a, const Ciphertext& b);
    void add_plain_inplace(Ciphertext& a, const Plaintext& pt);
    // Scales add; throws OverflowRisk when the sum reaches the ciphertext
    // modulus width at the current level.
    void mul_plain_inplace(Ciphertext& a, const Plaintext& pt);
    // Drops the last prime of the ciphertext modulus; throws NoLevelLeft at
    // the bottom of the chain.
    void rescale_inplace(Ciphertext& a);
    // Rotates slots left by `step`. Only level-0 ciphertexts can rotate:
    // the single-digit switching keys are sound for one ciphertext prime.
    void rotate_inplace(Ciphertext& a, std::size_t step, const GaloisKeySet& gks);
    // Folds the first `width` slots (a power of two) into slot 0 with
    // exactly log2(width) rotation+add rounds.
    void reduce_sum_inplace(Ciphertext& a, std::size_t width, const GaloisKeySet& gks);

    const OpCounts& counts() const { return counts_; }
    void reset_counts() { counts_ = OpCounts{}; }

private:
    void key_switch(Ciphertext& a, const GaloisKey& gk);

    const CkksContext& ctx_;
    OpCounts counts_;
};

}  // namespace hehdc::ckks
