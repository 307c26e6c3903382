#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "hehdc/ring/rns_poly.hpp"

namespace hehdc::ckks {

using ring::RnsPoly;
using ring::u64;

struct Plaintext {
    RnsPoly poly;  // NTT domain
    unsigned scale_log2 = 0;
    unsigned level = 0;
};

struct Ciphertext {
    RnsPoly c0, c1;  // NTT domain, rows = level + 1
    unsigned scale_log2 = 0;
    unsigned level = 0;
    // When set, c1 is reproducible from c1_seed and is not serialized.
    bool seed_compressed = false;
    std::array<std::uint8_t, 32> c1_seed{};
};

struct SecretKey {
    RnsPoly s_ntt;             // rows over the full chain, key-switching prime last
    std::vector<int> s_coeff;  // ternary coefficients, kept for key generation
};

// Switching key for one slot rotation: rows [q0, special], NTT domain.
struct GaloisKey {
    u64 galois_elt = 0;
    std::size_t step = 0;
    RnsPoly b, a;
    std::vector<std::uint32_t> perm;
};

struct GaloisKeySet {
    std::map<std::size_t, GaloisKey> by_step;
};

}  // namespace hehdc::ckks
