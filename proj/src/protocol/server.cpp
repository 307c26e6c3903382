#include "hehdc/protocol/server.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "hehdc/ckks/encoder.hpp"
#include "hehdc/errors.hpp"

namespace hehdc::protocol {

namespace {

unsigned ceil_log2_u(std::uint64_t v) {
    unsigned b = 0;
    while ((std::uint64_t{1} << b) < v) ++b;
    return b;
}

std::vector<ckks::Plaintext> encode_chunks(const ckks::CkksContext& ctx,
                                           const std::vector<double>& values,
                                           unsigned scale_log2, unsigned level, std::uint32_t k) {
    const std::size_t slots = ctx.slot_count();
    std::vector<ckks::Plaintext> chunks;
    chunks.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        const std::size_t begin = std::size_t{i} * slots;
        const std::size_t len = std::min(slots, values.size() - begin);
        chunks.push_back(ckks::encode(ctx, std::span<const double>(values.data() + begin, len),
                                      scale_log2, level));
    }
    return chunks;
}

ServerModel base_model(const ckks::CkksContext& ctx, std::size_t hv_dim,
                       std::uint64_t encoder_id, unsigned class_level) {
    ServerModel m;
    m.params = ctx.params();
    m.encoder_id = encoder_id;
    m.hv_dim = static_cast<std::uint32_t>(hv_dim);
    m.chunk_count = chunk_count_for(hv_dim, ctx.params());
    m.class_level = class_level;
    return m;
}

}  // namespace

ServerModel build_server_model(const ckks::CkksContext& ctx, const hdc::HdcModel& model,
                               std::uint64_t encoder_id, unsigned class_level) {
    if (model.classes.empty()) throw std::invalid_argument("cannot publish an empty model");
    if (!model.normalized)
        throw std::invalid_argument(
            "publish a normalized model, or use the norm-correction builder");
    ServerModel m = base_model(ctx, model.hv_dim, encoder_id, class_level);
    m.label_names = model.label_names;
    m.class_scale_log2 = hdc::class_scale_log2(ctx.params().ct_modulus_bits(class_level),
                                               ctx.params().scale_log2, model.hv_dim);
    m.classes.reserve(model.classes.size());
    for (const auto& c : model.classes)
        m.classes.push_back(encode_chunks(ctx, c, m.class_scale_log2, class_level, m.chunk_count));
    return m;
}

ServerModel build_server_model(const ckks::CkksContext& ctx, const hdc::QuantizedModel& qm,
                               std::uint64_t encoder_id, unsigned class_level) {
    ServerModel m = build_server_model(ctx, hdc::dequantize_model(qm), encoder_id, class_level);
    m.label_names = qm.label_names;
    return m;
}

ServerModel build_server_model_with_correction(const ckks::CkksContext& ctx,
                                               const hdc::HdcModel& model,
                                               std::uint64_t encoder_id, unsigned class_level) {
    if (model.classes.empty()) throw std::invalid_argument("cannot publish an empty model");
    std::vector<double> norms;
    norms.reserve(model.classes.size());
    for (const auto& c : model.classes) {
        double s = 0.0;
        for (const double v : c) s += v * v;
        const double n = std::sqrt(s);
        if (n < std::numeric_limits<double>::min())
            throw ZeroNorm("norm correction needs nonzero class vectors");
        norms.push_back(n);
    }
    const double max_norm = *std::max_element(norms.begin(), norms.end());
    const double min_norm = *std::min_element(norms.begin(), norms.end());
    const double rho = max_norm / min_norm;

    const auto& p = ctx.params();
    const unsigned delta = p.scale_log2;
    const unsigned q0 = p.prime_bits[0];
    const unsigned mod_bits = p.ct_modulus_bits(class_level);
    const unsigned drop = mod_bits - q0;
    // Budget for the final score scale delta + dc - drop + dn: the score
    // magnitude is bounded by sqrt(D) times the norm spread, and the whole
    // product must stay a bit under the bottom prime.
    const unsigned sqrtd_bits = (ceil_log2_u(model.hv_dim) + 1) / 2 + 1;
    const unsigned rho_bits = ceil_log2_u(static_cast<std::uint64_t>(std::ceil(rho))) + 1;
    // Encode rounding happens in the coefficient domain, where a spread-out
    // slot vector shrinks by sqrt(N/2); the class chunks need that embedding
    // margin on top of their slot precision, the replicated correction
    // constant does not. Split the headroom under the bottom prime so both
    // quantizations contribute equal slot-domain noise, capping the
    // correction at 14 bits where it stops mattering.
    const unsigned emb_bits = p.log2n / 2;
    const int cap = static_cast<int>(q0) - 1 - static_cast<int>(delta) -
                    static_cast<int>(sqrtd_bits) - static_cast<int>(rho_bits) +
                    static_cast<int>(drop);
    const unsigned dn =
        static_cast<unsigned>(std::clamp((cap - static_cast<int>(emb_bits)) / 2, 4, 14));
    const int avail = cap - static_cast<int>(dn);
    unsigned dc = avail < 1 ? 1 : std::min<unsigned>(static_cast<unsigned>(avail), delta + drop);
    if (delta + dc + 1 >= mod_bits) dc = mod_bits - delta - 2;

    ServerModel m = base_model(ctx, model.hv_dim, encoder_id, class_level);
    m.label_names = model.label_names;
    m.class_scale_log2 = dc;
    m.norm_scale_log2 = dn;
    m.classes.reserve(model.classes.size());
    m.norm_inv.reserve(model.classes.size());
    const std::vector<double> ones_slot(ctx.slot_count(), 1.0);
    for (std::size_t l = 0; l < model.classes.size(); ++l) {
        std::vector<double> scaled(model.classes[l]);
        for (double& v : scaled) v /= max_norm;
        m.classes.push_back(encode_chunks(ctx, scaled, dc, class_level, m.chunk_count));
        // Correction = 1 / ||C_l / max_norm||, replicated; applied at the
        // bottom of the chain, after any rescale.
        std::vector<double> corr(ctx.slot_count(), max_norm / norms[l]);
        m.norm_inv.push_back(ckks::encode(ctx, corr, dn, 0));
    }
    return m;
}

ScoreMessage server_similarity(ckks::Evaluator& ev, const ckks::CkksContext& ctx,
                               const QueryMessage& q, const ServerModel& m,
                               const ckks::GaloisKeySet& gks, const PipelineOptions& opts) {
    if (q.chunks.size() != m.chunk_count)
        throw ProtocolError("query carries " + std::to_string(q.chunks.size()) +
                            " chunks, the model expects " + std::to_string(m.chunk_count));
    for (const auto& ct : q.chunks)
        if (ct.level != m.class_level)
            throw ScaleMismatch("query level does not match the published model");

    ScoreMessage out;
    out.scores.reserve(m.classes.size());
    for (std::size_t l = 0; l < m.classes.size(); ++l) {
        // Each chunk ciphertext is consumed by exactly one multiply.
        ckks::Ciphertext acc = q.chunks[0];
        ev.mul_plain_inplace(acc, m.classes[l][0]);
        for (std::uint32_t i = 1; i < m.chunk_count; ++i) {
            ckks::Ciphertext t = q.chunks[i];
            ev.mul_plain_inplace(t, m.classes[l][i]);
            ev.add_inplace(acc, t);
        }
        if (opts.rescale_after_mul) ev.rescale_inplace(acc);
        if (!m.norm_inv.empty()) ev.mul_plain_inplace(acc, m.norm_inv[l]);
        ev.reduce_sum_inplace(acc, ctx.slot_count(), gks);
        out.scores.push_back(std::move(acc));
    }
    return out;
}

void serve_connection(Transport& transport, const ckks::CkksContext& ctx, const ServerModel& m,
                      const PipelineOptions& opts) {
    const auto send_error = [&transport](ErrorCode c, const std::string& msg) {
        try {
            transport.send_frame(Frame{FrameType::Error, error_payload(ErrorInfo{c, msg})});
        } catch (...) {
            // The peer may already be gone; the connection closes either way.
        }
    };
    ckks::Evaluator ev(ctx);
    std::optional<ckks::GaloisKeySet> session;
    for (;;) {
        std::optional<Frame> f;
        try {
            f = transport.recv_frame();
        } catch (const ProtocolError&) {
            return;  // midstream disconnect, nobody left to answer
        }
        if (!f) return;
        switch (f->type) {
            case FrameType::SessionSetup: {
                try {
                    std::istringstream is(std::string(f->payload.begin(), f->payload.end()));
                    const SessionHeader h = read_session_header(is);
                    if (ckks::format_params(h.params) != ckks::format_params(ctx.params())) {
                        send_error(ErrorCode::params_mismatch,
                                   "session parameters do not match the served model");
                        return;
                    }
                    if (h.encoder_id != m.encoder_id) {
                        send_error(ErrorCode::encoder_mismatch, "encoder hash mismatch");
                        return;
                    }
                    if (h.hv_dim != m.hv_dim || h.chunk_count != m.chunk_count) {
                        send_error(ErrorCode::encoder_mismatch, "query shape mismatch");
                        return;
                    }
                    session = read_session_gks(is, ctx);
                } catch (const std::exception& e) {
                    send_error(ErrorCode::bad_frame, e.what());
                    return;
                }
                break;
            }
            case FrameType::Query: {
                if (!session) {
                    send_error(ErrorCode::session_required, "query before session setup");
                    return;
                }
                try {
                    const QueryMessage q = parse_query(f->payload, ctx);
                    const ScoreMessage s = server_similarity(ev, ctx, q, m, *session, opts);
                    transport.send_frame(Frame{FrameType::Scores, scores_payload(ctx, s)});
                } catch (const ProtocolError& e) {
                    send_error(ErrorCode::bad_frame, e.what());
                    return;
                } catch (const std::exception& e) {
                    send_error(ErrorCode::internal, e.what());
                    return;
                }
                break;
            }
            default:
                send_error(ErrorCode::bad_frame, "unexpected frame type");
                return;
        }
    }
}

void serve(TcpListener& listener, const ckks::CkksContext& ctx, const ServerModel& m,
           const PipelineOptions& opts, std::size_t max_connections) {
    std::vector<std::thread> workers;
    for (std::size_t served = 0; max_connections == 0 || served < max_connections; ++served) {
        std::unique_ptr<Transport> conn = listener.accept();
        workers.emplace_back(
            [&ctx, &m, &opts, conn = std::move(conn)]() { serve_connection(*conn, ctx, m, opts); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace hehdc::protocol
