#include "hehdc/ckks/serialize.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "hehdc/ckks/keys.hpp"
#include "hehdc/errors.hpp"

namespace hehdc::ckks {

namespace {

constexpr std::uint16_t kVersion = 1;

void put_bytes(std::ostream& os, const void* p, std::size_t len) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
}

void get_bytes(std::istream& is, void* p, std::size_t len) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(is.gcount()) != len)
        throw ProtocolError("truncated serialized object");
}

void put_u8(std::ostream& os, std::uint8_t v) { put_bytes(os, &v, 1); }

void put_u16(std::ostream& os, std::uint16_t v) {
    const std::uint8_t b[2] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8)};
    put_bytes(os, b, 2);
}

void put_u32(std::ostream& os, std::uint32_t v) {
    std::uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    put_bytes(os, b, 4);
}

std::uint8_t get_u8(std::istream& is) {
    std::uint8_t v;
    get_bytes(is, &v, 1);
    return v;
}

std::uint16_t get_u16(std::istream& is) {
    std::uint8_t b[2];
    get_bytes(is, b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& is) {
    std::uint8_t b[4];
    get_bytes(is, b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_rows(std::ostream& os, const RnsPoly& p) {
    std::vector<std::uint8_t> buf(p.data.size() * 8);
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        const u64 v = p.data[i];
        for (int b = 0; b < 8; ++b) buf[8 * i + b] = static_cast<std::uint8_t>(v >> (8 * b));
    }
    put_bytes(os, buf.data(), buf.size());
}

void get_rows(std::istream& is, RnsPoly& p) {
    std::vector<std::uint8_t> buf(p.data.size() * 8);
    get_bytes(is, buf.data(), buf.size());
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        u64 v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<u64>(buf[8 * i + b]) << (8 * b);
        p.data[i] = v;
    }
}

struct Header {
    std::uint8_t log2n = 0;
    std::vector<std::uint8_t> widths;
    std::uint16_t scale_log2 = 0;
    std::uint8_t level = 0;
    std::uint8_t flags = 0;
};

void put_header(std::ostream& os, const char magic[4], const Header& h) {
    put_bytes(os, magic, 4);
    put_u16(os, kVersion);
    put_u8(os, h.log2n);
    put_u8(os, static_cast<std::uint8_t>(h.widths.size()));
    for (std::uint8_t w : h.widths) put_u8(os, w);
    put_u16(os, h.scale_log2);
    put_u8(os, h.level);
    put_u8(os, h.flags);
}

Header get_header(std::istream& is, const char magic[4], const CkksContext& ctx) {
    char m[4];
    get_bytes(is, m, 4);
    if (std::memcmp(m, magic, 4) != 0) throw ProtocolError("unexpected object magic");
    if (get_u16(is) != kVersion) throw ProtocolError("unsupported serialization version");
    Header h;
    h.log2n = get_u8(is);
    if (h.log2n != ctx.params().log2n) throw ProtocolError("ring degree mismatch");
    h.widths.resize(get_u8(is));
    for (auto& w : h.widths) w = get_u8(is);
    h.scale_log2 = get_u16(is);
    h.level = get_u8(is);
    h.flags = get_u8(is);
    return h;
}

std::vector<std::uint8_t> ct_chain_widths(const CkksContext& ctx, std::size_t rows) {
    std::vector<std::uint8_t> w(rows);
    for (std::size_t i = 0; i < rows; ++i)
        w[i] = static_cast<std::uint8_t>(ctx.params().prime_bits[i]);
    return w;
}

void check_ct_widths(const CkksContext& ctx, const Header& h) {
    if (h.widths.size() != static_cast<std::size_t>(h.level) + 1)
        throw ProtocolError("chain length does not match the level");
    const auto want = ct_chain_widths(ctx, h.widths.size());
    if (h.widths != want) throw ProtocolError("modulus chain mismatch");
}

}  // namespace

void write_ciphertext(std::ostream& os, const CkksContext& ctx, const Ciphertext& ct) {
    if (ct.c0.domain != ring::Domain::Ntt) throw std::logic_error("serialized polys are NTT form");
    Header h;
    h.log2n = static_cast<std::uint8_t>(ctx.params().log2n);
    h.widths = ct_chain_widths(ctx, ctx.rows_at(ct.level));
    h.scale_log2 = static_cast<std::uint16_t>(ct.scale_log2);
    h.level = static_cast<std::uint8_t>(ct.level);
    h.flags = ct.seed_compressed ? 1 : 0;
    put_header(os, "HEHD", h);
    put_rows(os, ct.c0);
    if (ct.seed_compressed)
        put_bytes(os, ct.c1_seed.data(), ct.c1_seed.size());
    else
        put_rows(os, ct.c1);
}

Ciphertext read_ciphertext(std::istream& is, const CkksContext& ctx) {
    const Header h = get_header(is, "HEHD", ctx);
    check_ct_widths(ctx, h);
    Ciphertext ct;
    ct.scale_log2 = h.scale_log2;
    ct.level = h.level;
    ct.c0 = ring::make_poly(ctx.ring(), h.widths.size(), ring::Domain::Ntt);
    get_rows(is, ct.c0);
    if (h.flags & 1) {
        ct.seed_compressed = true;
        get_bytes(is, ct.c1_seed.data(), ct.c1_seed.size());
        expand_c1(ctx, ct);
    } else {
        ct.seed_compressed = false;
        ct.c1 = ring::make_poly(ctx.ring(), h.widths.size(), ring::Domain::Ntt);
        get_rows(is, ct.c1);
    }
    return ct;
}

void write_plaintext(std::ostream& os, const CkksContext& ctx, const Plaintext& pt) {
    if (pt.poly.domain != ring::Domain::Ntt) throw std::logic_error("serialized polys are NTT form");
    Header h;
    h.log2n = static_cast<std::uint8_t>(ctx.params().log2n);
    h.widths = ct_chain_widths(ctx, ctx.rows_at(pt.level));
    h.scale_log2 = static_cast<std::uint16_t>(pt.scale_log2);
    h.level = static_cast<std::uint8_t>(pt.level);
    put_header(os, "HEHP", h);
    put_rows(os, pt.poly);
}

Plaintext read_plaintext(std::istream& is, const CkksContext& ctx) {
    const Header h = get_header(is, "HEHP", ctx);
    check_ct_widths(ctx, h);
    Plaintext pt;
    pt.scale_log2 = h.scale_log2;
    pt.level = h.level;
    pt.poly = ring::make_poly(ctx.ring(), h.widths.size(), ring::Domain::Ntt);
    get_rows(is, pt.poly);
    return pt;
}

void write_secret_key(std::ostream& os, const CkksContext& ctx, const SecretKey& sk) {
    Header h;
    h.log2n = static_cast<std::uint8_t>(ctx.params().log2n);
    h.widths.assign(ctx.params().prime_bits.begin(), ctx.params().prime_bits.end());
    h.level = static_cast<std::uint8_t>(ctx.params().top_level());
    put_header(os, "HEHS", h);
    put_rows(os, sk.s_ntt);
}

SecretKey read_secret_key(std::istream& is, const CkksContext& ctx) {
    const Header h = get_header(is, "HEHS", ctx);
    const std::vector<std::uint8_t> want(ctx.params().prime_bits.begin(),
                                         ctx.params().prime_bits.end());
    if (h.widths != want) throw ProtocolError("modulus chain mismatch");
    SecretKey sk;
    sk.s_ntt = ring::make_poly(ctx.ring(), ctx.key_rows(), ring::Domain::Ntt);
    get_rows(is, sk.s_ntt);
    return sk;
}

void write_galois_keys(std::ostream& os, const CkksContext& ctx, const GaloisKeySet& gks) {
    Header h;
    h.log2n = static_cast<std::uint8_t>(ctx.params().log2n);
    h.widths = {static_cast<std::uint8_t>(ctx.params().prime_bits.front()),
                static_cast<std::uint8_t>(ctx.params().prime_bits.back())};
    put_header(os, "HEHG", h);
    put_u16(os, static_cast<std::uint16_t>(gks.by_step.size()));
    for (const auto& [step, gk] : gks.by_step) {
        put_u32(os, static_cast<std::uint32_t>(step));
        put_u32(os, static_cast<std::uint32_t>(gk.galois_elt));
        put_rows(os, gk.b);
        put_rows(os, gk.a);
    }
}

GaloisKeySet read_galois_keys(std::istream& is, const CkksContext& ctx) {
    const Header h = get_header(is, "HEHG", ctx);
    const std::vector<std::uint8_t> want = {
        static_cast<std::uint8_t>(ctx.params().prime_bits.front()),
        static_cast<std::uint8_t>(ctx.params().prime_bits.back())};
    if (h.widths != want) throw ProtocolError("modulus chain mismatch");
    GaloisKeySet gks;
    const std::size_t count = get_u16(is);
    for (std::size_t i = 0; i < count; ++i) {
        GaloisKey gk;
        gk.step = get_u32(is);
        gk.galois_elt = get_u32(is);
        gk.b = ring::make_poly(ctx.ks_ring(), 2, ring::Domain::Ntt);
        get_rows(is, gk.b);
        gk.a = ring::make_poly(ctx.ks_ring(), 2, ring::Domain::Ntt);
        get_rows(is, gk.a);
        gk.perm = ring::galois_ntt_permutation(ctx.params().log2n, gk.galois_elt);
        gks.by_step.emplace(gk.step, std::move(gk));
    }
    return gks;
}

std::vector<std::uint8_t> ciphertext_bytes(const CkksContext& ctx, const Ciphertext& ct) {
    std::ostringstream os(std::ios::binary);
    write_ciphertext(os, ctx, ct);
    const std::string s = os.str();
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

Ciphertext ciphertext_from_bytes(const CkksContext& ctx, const std::vector<std::uint8_t>& data) {
    std::istringstream is(std::string(data.begin(), data.end()), std::ios::binary);
    return read_ciphertext(is, ctx);
}

}  // namespace hehdc::ckks
