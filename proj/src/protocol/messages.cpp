#include "hehdc/protocol/messages.hpp"

#include <sstream>

#include "hehdc/ckks/serialize.hpp"
#include "hehdc/errors.hpp"

namespace hehdc::protocol {

namespace {

void put_u8(std::ostream& os, std::uint8_t v) {
    os.put(static_cast<char>(v));
}

void put_u16(std::ostream& os, std::uint16_t v) {
    put_u8(os, static_cast<std::uint8_t>(v));
    put_u8(os, static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::ostream& os, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) put_u8(os, static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::ostream& os, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) put_u8(os, static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint8_t get_u8(std::istream& is) {
    const int c = is.get();
    if (c < 0) throw ProtocolError("truncated message");
    return static_cast<std::uint8_t>(c);
}

std::uint16_t get_u16(std::istream& is) {
    const std::uint16_t lo = get_u8(is);
    return static_cast<std::uint16_t>(lo | (std::uint16_t(get_u8(is)) << 8));
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(get_u8(is)) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(get_u8(is)) << (8 * i);
    return v;
}

std::vector<std::uint8_t> take_bytes(const std::ostringstream& os) {
    const std::string s = os.str();
    return {s.begin(), s.end()};
}

std::istringstream stream_over(const std::vector<std::uint8_t>& payload) {
    return std::istringstream(std::string(payload.begin(), payload.end()));
}

void expect_exhausted(std::istream& is) {
    if (is.peek() != std::char_traits<char>::eof())
        throw ProtocolError("trailing bytes after message body");
}

}  // namespace

std::uint32_t chunk_count_for(std::size_t hv_dim, const ckks::CkksParams& params) {
    const std::size_t slots = params.slot_count();
    return static_cast<std::uint32_t>((hv_dim + slots - 1) / slots);
}

std::vector<std::uint8_t> session_setup_payload(const ckks::CkksContext& ctx,
                                                const SessionSetup& s) {
    std::ostringstream os;
    put_u8(os, static_cast<std::uint8_t>(s.params.log2n));
    put_u8(os, static_cast<std::uint8_t>(s.params.prime_bits.size()));
    for (const unsigned w : s.params.prime_bits) put_u8(os, static_cast<std::uint8_t>(w));
    put_u16(os, static_cast<std::uint16_t>(s.params.scale_log2));
    put_u64(os, s.encoder_id);
    put_u32(os, s.hv_dim);
    put_u32(os, s.chunk_count);
    ckks::write_galois_keys(os, ctx, s.gks);
    return take_bytes(os);
}

SessionHeader read_session_header(std::istream& is) {
    SessionHeader h;
    h.params.log2n = get_u8(is);
    const std::size_t count = get_u8(is);
    h.params.prime_bits.resize(count);
    for (auto& w : h.params.prime_bits) w = get_u8(is);
    h.params.scale_log2 = get_u16(is);
    h.encoder_id = get_u64(is);
    h.hv_dim = get_u32(is);
    h.chunk_count = get_u32(is);
    return h;
}

ckks::GaloisKeySet read_session_gks(std::istream& is, const ckks::CkksContext& ctx) {
    ckks::GaloisKeySet gks = ckks::read_galois_keys(is, ctx);
    expect_exhausted(is);
    return gks;
}

std::pair<SessionSetup, ckks::CkksContext> parse_session_setup(
    const std::vector<std::uint8_t>& payload) {
    std::istringstream is = stream_over(payload);
    const SessionHeader h = read_session_header(is);
    ckks::CkksContext ctx = ckks::CkksContext::create(h.params);
    SessionSetup s;
    s.params = h.params;
    s.encoder_id = h.encoder_id;
    s.hv_dim = h.hv_dim;
    s.chunk_count = h.chunk_count;
    s.gks = read_session_gks(is, ctx);
    return {std::move(s), std::move(ctx)};
}

namespace {

std::vector<std::uint8_t> ct_list_payload(const ckks::CkksContext& ctx,
                                          const std::vector<ckks::Ciphertext>& list) {
    std::ostringstream os;
    put_u32(os, static_cast<std::uint32_t>(list.size()));
    for (const auto& ct : list) ckks::write_ciphertext(os, ctx, ct);
    return take_bytes(os);
}

std::vector<ckks::Ciphertext> parse_ct_list(const std::vector<std::uint8_t>& payload,
                                            const ckks::CkksContext& ctx) {
    std::istringstream is = stream_over(payload);
    const std::uint32_t count = get_u32(is);
    if (count == 0 || count > 4096) throw ProtocolError("unreasonable ciphertext count");
    std::vector<ckks::Ciphertext> list;
    list.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) list.push_back(ckks::read_ciphertext(is, ctx));
    expect_exhausted(is);
    return list;
}

}  // namespace

std::vector<std::uint8_t> query_payload(const ckks::CkksContext& ctx, const QueryMessage& q) {
    return ct_list_payload(ctx, q.chunks);
}

QueryMessage parse_query(const std::vector<std::uint8_t>& payload, const ckks::CkksContext& ctx) {
    return QueryMessage{parse_ct_list(payload, ctx)};
}

std::vector<std::uint8_t> scores_payload(const ckks::CkksContext& ctx, const ScoreMessage& s) {
    return ct_list_payload(ctx, s.scores);
}

ScoreMessage parse_scores(const std::vector<std::uint8_t>& payload, const ckks::CkksContext& ctx) {
    return ScoreMessage{parse_ct_list(payload, ctx)};
}

std::vector<std::uint8_t> error_payload(const ErrorInfo& e) {
    std::ostringstream os;
    put_u16(os, static_cast<std::uint16_t>(e.code));
    put_u32(os, static_cast<std::uint32_t>(e.message.size()));
    os.write(e.message.data(), static_cast<std::streamsize>(e.message.size()));
    return take_bytes(os);
}

ErrorInfo parse_error(const std::vector<std::uint8_t>& payload) {
    std::istringstream is = stream_over(payload);
    ErrorInfo e;
    e.code = static_cast<ErrorCode>(get_u16(is));
    const std::uint32_t len = get_u32(is);
    e.message.resize(len);
    if (len > 0) {
        is.read(e.message.data(), static_cast<std::streamsize>(len));
        if (static_cast<std::uint32_t>(is.gcount()) != len)
            throw ProtocolError("truncated error message");
    }
    expect_exhausted(is);
    return e;
}

}  // namespace hehdc::protocol
