#pragma once

#include <vector>

#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/encoder.hpp"
#include "hehdc/ckks/objects.hpp"

namespace hehdc::ckks {

inline constexpr double kNoiseStddev = 3.2;

struct KeyMaterial {
    SecretKey sk;
    GaloisKeySet gks;
    u64 seed = 0;
};

// Slot steps 1, 2, 4, ..., slot_count/2: enough for any power-of-two
// rotation ladder.
std::vector<std::size_t> power_of_two_steps(const CkksContext& ctx);

// Ternary secret plus switching keys for the given slot steps, all derived
// deterministically from one seed.
KeyMaterial keygen(const CkksContext& ctx, u64 seed, const std::vector<std::size_t>& steps);

u64 galois_elt_for_step(const CkksContext& ctx, std::size_t step);

// Symmetric encryption at the plaintext's level. The uniform mask c1 is
// expanded from a 32-byte seed kept in the ciphertext, so fresh ciphertexts
// serialize to one polynomial plus the seed.
Ciphertext encrypt(const CkksContext& ctx, const Plaintext& pt, const SecretKey& sk,
                   ring::Prng& rng);

// Rebuilds c1 from the stored seed after deserialization.
void expand_c1(const CkksContext& ctx, Ciphertext& ct);

// Message polynomial c0 + c1*s, returned on coefficients.
RnsPoly decrypt(const CkksContext& ctx, const Ciphertext& ct, const SecretKey& sk);
std::vector<double> decrypt_values(const CkksContext& ctx, const Ciphertext& ct,
                                   const SecretKey& sk);

}  // namespace hehdc::ckks
