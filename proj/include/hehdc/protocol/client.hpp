#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/keys.hpp"
#include "hehdc/hdc/encoder.hpp"
#include "hehdc/protocol/messages.hpp"
#include "hehdc/protocol/transport.hpp"
#include "hehdc/ring/sampling.hpp"

namespace hehdc::protocol {

SessionSetup make_session_setup(const ckks::CkksContext& ctx, const ckks::GaloisKeySet& gks,
                                std::uint64_t encoder_id, std::size_t hv_dim);

// Splits a query hypervector into contiguous slot_count() chunks (the last
// zero-padded), encodes each at the context scale and encrypts.
QueryMessage client_encrypt_hv(const ckks::CkksContext& ctx, std::span<const double> hq,
                               const ckks::SecretKey& sk, ring::Prng& rng, unsigned level = 0);

// Full client side of one query: encode the raw input into a hypervector,
// then chunk and encrypt it.
QueryMessage client_prepare_query(const ckks::CkksContext& ctx, const std::vector<double>& x,
                                  const hdc::EncoderParams& enc, const ckks::SecretKey& sk,
                                  ring::Prng& rng, unsigned level = 0);

// Decrypts slot 0 of every score ciphertext and picks the argmax, lowest
// index on ties. The scores stay unnormalized: the query norm is a common
// positive factor and cannot change the argmax.
std::pair<int, std::vector<double>> client_finalize(const ckks::CkksContext& ctx,
                                                    const ScoreMessage& s,
                                                    const ckks::SecretKey& sk);

// One client session over a transport: generates keys, announces the
// session, and runs encrypt/send/receive/decrypt round trips. The secret
// key never leaves this object.
class ClientSession {
public:
    ClientSession(std::unique_ptr<Transport> transport, const ckks::CkksParams& params,
                  hdc::EncoderParams enc, std::uint64_t key_seed, unsigned level = 0);

    std::pair<int, std::vector<double>> classify(const std::vector<double>& x);
    std::pair<int, std::vector<double>> classify_hv(const std::vector<double>& hq);

    const ckks::CkksContext& context() const { return ctx_; }
    const hdc::EncoderParams& encoder() const { return enc_; }
    std::size_t last_query_bytes() const { return last_query_bytes_; }
    std::size_t last_scores_bytes() const { return last_scores_bytes_; }
    std::size_t setup_bytes() const { return setup_bytes_; }

private:
    std::pair<int, std::vector<double>> exchange(const QueryMessage& q);

    std::unique_ptr<Transport> transport_;
    ckks::CkksContext ctx_;
    hdc::EncoderParams enc_;
    ckks::KeyMaterial keys_;
    ring::Prng rng_;
    unsigned level_ = 0;
    std::size_t setup_bytes_ = 0;
    std::size_t last_query_bytes_ = 0;
    std::size_t last_scores_bytes_ = 0;
};

}  // namespace hehdc::protocol
