#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/objects.hpp"

// Binary wire format, version 1, little-endian throughout. Every object
// starts with a four-byte magic and a u16 version, then
//   log2n u8, chain_len u8, prime widths u8[chain_len],
//   scale_log2 u16, level u8, flags u8
// followed by the residue rows as raw u64 words in NTT order. Ciphertexts
// with flags bit0 set carry a 32-byte seed in place of the mask polynomial.
// Readers throw ProtocolError on any mismatch against the context.

namespace hehdc::ckks {

void write_ciphertext(std::ostream& os, const CkksContext& ctx, const Ciphertext& ct);
Ciphertext read_ciphertext(std::istream& is, const CkksContext& ctx);

void write_plaintext(std::ostream& os, const CkksContext& ctx, const Plaintext& pt);
Plaintext read_plaintext(std::istream& is, const CkksContext& ctx);

void write_secret_key(std::ostream& os, const CkksContext& ctx, const SecretKey& sk);
SecretKey read_secret_key(std::istream& is, const CkksContext& ctx);

void write_galois_keys(std::ostream& os, const CkksContext& ctx, const GaloisKeySet& gks);
GaloisKeySet read_galois_keys(std::istream& is, const CkksContext& ctx);

std::vector<std::uint8_t> ciphertext_bytes(const CkksContext& ctx, const Ciphertext& ct);
Ciphertext ciphertext_from_bytes(const CkksContext& ctx, const std::vector<std::uint8_t>& data);

}  // namespace hehdc::ckks
