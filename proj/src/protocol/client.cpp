#include "hehdc/protocol/client.hpp"

#include <algorithm>

#include "hehdc/ckks/encoder.hpp"
#include "hehdc/errors.hpp"

namespace hehdc::protocol {

SessionSetup make_session_setup(const ckks::CkksContext& ctx, const ckks::GaloisKeySet& gks,
                                std::uint64_t encoder_id, std::size_t hv_dim) {
    SessionSetup s;
    s.params = ctx.params();
    s.gks = gks;
    s.encoder_id = encoder_id;
    s.hv_dim = static_cast<std::uint32_t>(hv_dim);
    s.chunk_count = chunk_count_for(hv_dim, ctx.params());
    return s;
}

QueryMessage client_encrypt_hv(const ckks::CkksContext& ctx, std::span<const double> hq,
                               const ckks::SecretKey& sk, ring::Prng& rng, unsigned level) {
    const std::size_t slots = ctx.slot_count();
    const std::uint32_t k = chunk_count_for(hq.size(), ctx.params());
    QueryMessage q;
    q.chunks.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        const std::size_t begin = static_cast<std::size_t>(i) * slots;
        const std::size_t len = std::min(slots, hq.size() - begin);
        const ckks::Plaintext pt =
            ckks::encode(ctx, hq.subspan(begin, len), ctx.params().scale_log2, level);
        q.chunks.push_back(ckks::encrypt(ctx, pt, sk, rng));
    }
    return q;
}

QueryMessage client_prepare_query(const ckks::CkksContext& ctx, const std::vector<double>& x,
                                  const hdc::EncoderParams& enc, const ckks::SecretKey& sk,
                                  ring::Prng& rng, unsigned level) {
    if (x.size() != enc.input_dim)
        throw ParamError("query has " + std::to_string(x.size()) + " features, encoder expects " +
                         std::to_string(enc.input_dim));
    const std::vector<double> hq = hdc::encode_sample(x, enc);
    return client_encrypt_hv(ctx, hq, sk, rng, level);
}

std::pair<int, std::vector<double>> client_finalize(const ckks::CkksContext& ctx,
                                                    const ScoreMessage& s,
                                                    const ckks::SecretKey& sk) {
    if (s.scores.empty()) throw ProtocolError("score message carries no classes");
    std::vector<double> scores;
    scores.reserve(s.scores.size());
    for (const auto& ct : s.scores) scores.push_back(ckks::decrypt_values(ctx, ct, sk)[0]);
    int best = 0;
    for (int l = 1; l < static_cast<int>(scores.size()); ++l)
        if (scores[l] > scores[best]) best = l;
    return {best, std::move(scores)};
}

ClientSession::ClientSession(std::unique_ptr<Transport> transport, const ckks::CkksParams& params,
                             hdc::EncoderParams enc, std::uint64_t key_seed, unsigned level)
    : transport_(std::move(transport)),
      ctx_(ckks::CkksContext::create(params)),
      enc_(std::move(enc)),
      keys_(ckks::keygen(ctx_, key_seed, ckks::power_of_two_steps(ctx_))),
      rng_(ring::derive_seed(key_seed, 0x9e3779b97f4a7c15ull)),
      level_(level) {
    const SessionSetup setup =
        make_session_setup(ctx_, keys_.gks, hdc::encoder_hash(enc_), enc_.hv_dim);
    const Frame f{FrameType::SessionSetup, session_setup_payload(ctx_, setup)};
    setup_bytes_ = frame_wire_size(f);
    transport_->send_frame(f);
}

std::pair<int, std::vector<double>> ClientSession::classify(const std::vector<double>& x) {
    return exchange(client_prepare_query(ctx_, x, enc_, keys_.sk, rng_, level_));
}

std::pair<int, std::vector<double>> ClientSession::classify_hv(const std::vector<double>& hq) {
    if (hq.size() != enc_.hv_dim)
        throw ParamError("hypervector length does not match the session dimension");
    return exchange(client_encrypt_hv(ctx_, hq, keys_.sk, rng_, level_));
}

std::pair<int, std::vector<double>> ClientSession::exchange(const QueryMessage& q) {
    const Frame f{FrameType::Query, query_payload(ctx_, q)};
    last_query_bytes_ = frame_wire_size(f);
    transport_->send_frame(f);
    std::optional<Frame> reply = transport_->recv_frame();
    if (!reply) throw ProtocolError("server closed the connection before replying");
    if (reply->type == FrameType::Error) {
        const ErrorInfo e = parse_error(reply->payload);
        throw ProtocolError("server error " + std::to_string(static_cast<int>(e.code)) + ": " +
                            e.message);
    }
    if (reply->type != FrameType::Scores) throw ProtocolError("unexpected reply frame");
    last_scores_bytes_ = frame_wire_size(*reply);
    return client_finalize(ctx_, parse_scores(reply->payload, ctx_), keys_.sk);
}

}  // namespace hehdc::protocol
