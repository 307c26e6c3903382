#include "hehdc/ckks/encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "hehdc/errors.hpp"

namespace hehdc::ckks {

namespace {

using cplx = std::complex<double>;
using ring::bit_reverse;

unsigned log2_of(std::size_t v) {
    unsigned l = 0;
    while ((std::size_t{1} << l) < v) ++l;
    return l;
}

void array_bit_reverse(std::vector<cplx>& v) {
    const unsigned bits = log2_of(v.size());
    for (std::uint32_t i = 0; i < v.size(); ++i) {
        const std::uint32_t j = bit_reverse(i, bits);
        if (i < j) std::swap(v[i], v[j]);
    }
}

// Evaluates the packed half-size polynomial at the points indexed by the
// rotation group; inverse of special_ifft.
void special_fft(const CkksContext& ctx, std::vector<cplx>& v) {
    const std::size_t m = 2 * ctx.n();
    const auto& ksi = ctx.ksi();
    const auto& rot = ctx.rot_group();
    array_bit_reverse(v);
    for (std::size_t len = 2; len <= v.size(); len <<= 1) {
        const std::size_t lenh = len >> 1;
        const std::size_t lenq = len << 2;
        const std::size_t gap = m / lenq;
        for (std::size_t i = 0; i < v.size(); i += len) {
            for (std::size_t j = 0; j < lenh; ++j) {
                const std::size_t idx = (rot[j] % lenq) * gap;
                const cplx u = v[i + j];
                const cplx w = v[i + j + lenh] * ksi[idx];
                v[i + j] = u + w;
                v[i + j + lenh] = u - w;
            }
        }
    }
}

void special_ifft(const CkksContext& ctx, std::vector<cplx>& v) {
    const std::size_t m = 2 * ctx.n();
    const auto& ksi = ctx.ksi();
    const auto& rot = ctx.rot_group();
    for (std::size_t len = v.size(); len >= 2; len >>= 1) {
        const std::size_t lenh = len >> 1;
        const std::size_t lenq = len << 2;
        const std::size_t gap = m / lenq;
        for (std::size_t i = 0; i < v.size(); i += len) {
            for (std::size_t j = 0; j < lenh; ++j) {
                const std::size_t idx = (lenq - (rot[j] % lenq)) * gap;
                const cplx u = v[i + j] + v[i + j + lenh];
                const cplx w = (v[i + j] - v[i + j + lenh]) * ksi[idx];
                v[i + j] = u;
                v[i + j + lenh] = w;
            }
        }
    }
    array_bit_reverse(v);
    for (auto& x : v) x /= static_cast<double>(v.size());
}

void reduce_signed_into_rows(RnsPoly& p, const ring::RingContext& rc, std::size_t coeff_idx,
                             long long v) {
    for (std::size_t r = 0; r < p.rows; ++r) {
        const u64 q = rc.primes[r];
        p.row(r)[coeff_idx] =
            v >= 0 ? static_cast<u64>(v) % q : q - (static_cast<u64>(-v) % q);
    }
}

}  // namespace

Plaintext encode_complex(const CkksContext& ctx, std::span<const std::complex<double>> values,
                         unsigned scale_log2, unsigned level) {
    const std::size_t slots = ctx.slot_count();
    if (values.size() > slots) throw std::invalid_argument("more values than slots");
    if (level > ctx.params().top_level()) throw std::invalid_argument("level beyond chain");

    double max_abs = 0.0;
    for (const auto& z : values) max_abs = std::max(max_abs, std::abs(z));
    const long double scaled = std::ldexp(static_cast<long double>(max_abs), scale_log2);
    if (scaled >= static_cast<long double>(ctx.ct_prime(0)) / 2.0L)
        throw OverflowRisk("encoded magnitude " + std::to_string(max_abs) + " at scale 2^" +
                           std::to_string(scale_log2) + " reaches half the first prime");

    std::vector<cplx> u(slots, cplx{0.0, 0.0});
    std::copy(values.begin(), values.end(), u.begin());
    special_ifft(ctx, u);

    Plaintext pt;
    pt.scale_log2 = scale_log2;
    pt.level = level;
    pt.poly = ring::make_poly(ctx.ring(), ctx.rows_at(level), ring::Domain::Coefficient);
    const long double factor = std::ldexp(1.0L, scale_log2);
    for (std::size_t j = 0; j < slots; ++j) {
        const auto re = static_cast<long long>(
            std::llroundl(static_cast<long double>(u[j].real()) * factor));
        const auto im = static_cast<long long>(
            std::llroundl(static_cast<long double>(u[j].imag()) * factor));
        reduce_signed_into_rows(pt.poly, ctx.ring(), j, re);
        reduce_signed_into_rows(pt.poly, ctx.ring(), j + slots, im);
    }
    ring::ntt_forward(ctx.ring(), pt.poly);
    return pt;
}

Plaintext encode(const CkksContext& ctx, std::span<const double> values, unsigned scale_log2,
                 unsigned level) {
    std::vector<cplx> z(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) z[i] = {values[i], 0.0};
    return encode_complex(ctx, z, scale_log2, level);
}

std::vector<std::complex<double>> decode_complex(const CkksContext& ctx, const RnsPoly& poly,
                                                 unsigned scale_log2) {
    if (poly.domain != ring::Domain::Coefficient)
        throw std::logic_error("decode expects a coefficient-domain polynomial");
    if (poly.rows == 0 || poly.rows > 2)
        throw std::logic_error("decode supports one or two residue rows");

    const std::size_t slots = ctx.slot_count();
    std::vector<long double> centered(ctx.n());
    if (poly.rows == 1) {
        const u64 q = ctx.ct_prime(0);
        for (std::size_t j = 0; j < ctx.n(); ++j) {
            const u64 v = poly.row(0)[j];
            centered[j] = v > q / 2
                              ? -static_cast<long double>(q - v)
                              : static_cast<long double>(v);
        }
    } else {
        const u64 q0 = ctx.ct_prime(0), q1 = ctx.ct_prime(1);
        const u64 q0_inv = ring::inv_mod(q0 % q1, q1);
        const unsigned __int128 product =
            static_cast<unsigned __int128>(q0) * q1;
        for (std::size_t j = 0; j < ctx.n(); ++j) {
            const u64 v0 = poly.row(0)[j];
            const u64 v1 = poly.row(1)[j];
            const u64 diff = ring::sub_mod(v1, v0 % q1, q1);
            const u64 k = ring::mul_mod(diff, q0_inv, q1);
            unsigned __int128 x = static_cast<unsigned __int128>(k) * q0 + v0;
            if (x > product / 2) {
                const unsigned __int128 neg = product - x;
                centered[j] = -static_cast<long double>(neg);
            } else {
                centered[j] = static_cast<long double>(x);
            }
        }
    }

    const long double factor = std::ldexp(1.0L, scale_log2);
    std::vector<cplx> w(slots);
    for (std::size_t j = 0; j < slots; ++j) {
        w[j] = {static_cast<double>(centered[j] / factor),
                static_cast<double>(centered[j + slots] / factor)};
    }
    special_fft(ctx, w);
    return w;
}

std::vector<double> decode(const CkksContext& ctx, const RnsPoly& poly, unsigned scale_log2) {
    const auto z = decode_complex(ctx, poly, scale_log2);
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
    return out;
}

}  // namespace hehdc::ckks
