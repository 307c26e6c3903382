#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "hehdc/ckks/encoder.hpp"
#include "hehdc/ckks/evaluator.hpp"
#include "hehdc/ckks/keys.hpp"
#include "hehdc/ckks/params.hpp"
#include "hehdc/ckks/serialize.hpp"
#include "hehdc/errors.hpp"

using namespace hehdc;
using namespace hehdc::ckks;

namespace {

std::vector<double> random_unit_values(ring::Prng& prng, std::size_t count) {
    std::vector<double> v(count);
    for (auto& x : v) x = 2.0 * prng.next_double() - 1.0;
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Centered row-0 coefficients of an NTT-domain polynomial.
std::vector<long long> centered_coeffs(const CkksContext& ctx, const RnsPoly& ntt_poly) {
    RnsPoly p = ntt_poly;
    ring::ntt_inverse(ctx.ring(), p);
    const ring::u64 q = ctx.ct_prime(0);
    std::vector<long long> out(ctx.n());
    for (std::size_t j = 0; j < ctx.n(); ++j) {
        const ring::u64 v = p.row(0)[j];
        out[j] = v > q / 2 ? static_cast<long long>(v) - static_cast<long long>(q)
                           : static_cast<long long>(v);
    }
    return out;
}

CkksParams toy_params() {
    CkksParams p;
    p.log2n = 4;
    p.prime_bits = {40, 41};
    p.scale_log2 = 20;
    return p;
}

}  // namespace

TEST_CASE("stock parameter sets pass the width gate") {
    for (unsigned log2n : {11u, 12u, 13u, 14u}) {
        const CkksParams p = default_params(log2n);
        CHECK_NOTHROW(validate(p));
    }
    CHECK(max_chain_bits(11) == 54);
    CHECK(max_chain_bits(12) == 109);
    CHECK(max_chain_bits(13) == 218);
    CHECK(max_chain_bits(14) == 438);
}

TEST_CASE("oversized or malformed chains are rejected") {
    CkksParams p;
    p.log2n = 11;
    p.prime_bits = {54, 54};
    p.scale_log2 = 30;
    CHECK_THROWS_AS(validate(p), SecurityBudgetExceeded);

    p = default_params(11);
    p.prime_bits = {27, 27, 27};
    CHECK_THROWS_AS(validate(p), SecurityBudgetExceeded);

    p = default_params(13);
    p.prime_bits = {60};
    CHECK_THROWS_AS(validate(p), ChainTooShort);

    p = default_params(13);
    p.scale_log2 = 60;
    CHECK_THROWS_AS(validate(p), ParamError);

    p = default_params(13);
    p.log2n = 10;
    CHECK_THROWS_AS(validate(p), ParamError);

    // The three-prime chain for rescaling runs fits the degree-13 budget.
    p = default_params(13);
    p.prime_bits = {60, 30, 60};
    CHECK_NOTHROW(validate(p));
}

TEST_CASE("parameter strings parse and roundtrip") {
    const CkksParams p = parse_params("13:60,60:30");
    CHECK(p.log2n == 13);
    CHECK(p.prime_bits == std::vector<unsigned>{60, 60});
    CHECK(p.scale_log2 == 30);
    CHECK(format_params(p) == "13:60,60:30");

    CHECK(parse_params("11").prime_bits == std::vector<unsigned>{27, 27});
    CHECK(parse_params("11").scale_log2 == 20);
    CHECK(parse_params("12:54,54").scale_log2 == 30);
    CHECK(parse_params("13:60,30,60:30").prime_bits == std::vector<unsigned>{60, 30, 60});

    CHECK_THROWS_AS(parse_params("9"), ParamError);
    CHECK_THROWS_AS(parse_params("11:54,54"), SecurityBudgetExceeded);
    CHECK_THROWS_AS(parse_params("nonsense"), ParamError);
    CHECK_THROWS_AS(parse_params("13:60,60:77"), ParamError);
}

TEST_CASE("encoding matches direct evaluation at the embedding points") {
    const auto ctx = CkksContext::create_unchecked(toy_params());
    ring::Prng prng(3);
    std::vector<std::complex<double>> z(ctx.slot_count());
    for (auto& v : z) v = {4.0 * prng.next_double() - 2.0, 4.0 * prng.next_double() - 2.0};

    const Plaintext pt = encode_complex(ctx, z, 20, 0);
    const auto coeffs = centered_coeffs(ctx, pt.poly);

    // Evaluate the integer polynomial at the embedding points directly.
    const auto& ksi = ctx.ksi();
    for (std::size_t j = 0; j < ctx.slot_count(); ++j) {
        std::complex<double> acc{0.0, 0.0};
        const std::size_t g = ctx.rot_group()[j];
        for (std::size_t k = ctx.n(); k-- > 0;) {
            acc = acc * ksi[g] + static_cast<double>(coeffs[k]);
        }
        acc /= std::ldexp(1.0, 20);
        CHECK(std::abs(acc - z[j]) < 1e-4);
    }

    // Library decode agrees with the oracle path.
    RnsPoly coeff_poly = pt.poly;
    ring::ntt_inverse(ctx.ring(), coeff_poly);
    const auto back = decode_complex(ctx, coeff_poly, 20);
    for (std::size_t j = 0; j < z.size(); ++j) CHECK(std::abs(back[j] - z[j]) < 1e-4);
}

TEST_CASE("encode and decode roundtrip at production size") {
    const auto ctx = CkksContext::create(default_params(13));
    ring::Prng prng(5);
    const auto values = random_unit_values(prng, ctx.slot_count());
    const Plaintext pt = encode(ctx, values, ctx.params().scale_log2, 0);
    RnsPoly coeff_poly = pt.poly;
    ring::ntt_inverse(ctx.ring(), coeff_poly);
    const auto back = decode(ctx, coeff_poly, pt.scale_log2);
    CHECK(max_abs_diff(values, back) < 1e-6);
}

TEST_CASE("encrypt then decrypt recovers the message") {
    const auto ctx = CkksContext::create(default_params(13));
    const KeyMaterial km = keygen(ctx, 42, {});
    ring::Prng rng(7);
    const auto values = random_unit_values(rng, ctx.slot_count());
    const Plaintext pt = encode(ctx, values, 30, 0);
    const Ciphertext ct = encrypt(ctx, pt, km.sk, rng);
    const auto back = decrypt_values(ctx, ct, km.sk);
    CHECK(max_abs_diff(values, back) < 1e-4);
}

TEST_CASE("ciphertext addition acts slotwise") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial km = keygen(ctx, 42, {});
    Evaluator ev(ctx);
    ring::Prng rng(11);
    const auto x = random_unit_values(rng, ctx.slot_count());
    const auto y = random_unit_values(rng, ctx.slot_count());
    Ciphertext cx = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);
    const Ciphertext cy = encrypt(ctx, encode(ctx, y, 30, 0), km.sk, rng);
    ev.add_inplace(cx, cy);
    const auto back = decrypt_values(ctx, cx, km.sk);
    std::vector<double> want(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) want[i] = x[i] + y[i];
    CHECK(max_abs_diff(want, back) < 1e-4);
}

TEST_CASE("plaintext multiplication acts slotwise and adds scales") {
    const auto ctx = CkksContext::create(default_params(13));
    const KeyMaterial km = keygen(ctx, 42, {});
    Evaluator ev(ctx);
    ring::Prng rng(13);
    const auto x = random_unit_values(rng, ctx.slot_count());
    const auto y = random_unit_values(rng, ctx.slot_count());
    Ciphertext cx = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);
    const Plaintext py = encode(ctx, y, 20, 0);
    ev.mul_plain_inplace(cx, py);
    CHECK(cx.scale_log2 == 50);
    const auto back = decrypt_values(ctx, cx, km.sk);
    std::vector<double> want(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) want[i] = x[i] * y[i];
    CHECK(max_abs_diff(want, back) < 1e-4);
}

TEST_CASE("rotation shifts slots to the left") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial km = keygen(ctx, 42, power_of_two_steps(ctx));
    Evaluator ev(ctx);
    ring::Prng rng(17);
    const auto x = random_unit_values(rng, ctx.slot_count());
    for (std::size_t step : {1u, 2u, 8u, 1024u}) {
        Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);
        ev.rotate_inplace(ct, step, km.gks);
        const auto back = decrypt_values(ctx, ct, km.sk);
        double m = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            m = std::max(m, std::abs(back[i] - x[(i + step) % x.size()]));
        CHECK(m < 1e-4);
    }

    Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);
    CHECK_THROWS_AS(ev.rotate_inplace(ct, 3, km.gks), std::invalid_argument);
}

TEST_CASE("reduce sum folds the leading slots into slot zero") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial km = keygen(ctx, 42, power_of_two_steps(ctx));
    Evaluator ev(ctx);
    ring::Prng rng(19);
    const auto x = random_unit_values(rng, ctx.slot_count());
    Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);

    ev.reset_counts();
    ev.reduce_sum_inplace(ct, 64, km.gks);
    CHECK(ev.counts().rotations == 6);
    CHECK(ev.counts().rescales == 0);

    double want = 0;
    for (std::size_t i = 0; i < 64; ++i) want += x[i];
    const auto back = decrypt_values(ctx, ct, km.sk);
    CHECK(std::abs(back[0] - want) < 1e-3);
}

TEST_CASE("reduce sum over a replicated block fills every slot with the block sum") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial km = keygen(ctx, 42, power_of_two_steps(ctx));
    Evaluator ev(ctx);
    ring::Prng rng(23);
    std::vector<double> x(ctx.slot_count());
    const double block[4] = {1, 2, 3, 4};
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = block[i % 4];
    Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);
    ev.reduce_sum_inplace(ct, 4, km.gks);
    const auto back = decrypt_values(ctx, ct, km.sk);
    for (double v : back) CHECK(std::abs(v - 10.0) < 1e-3);
}

TEST_CASE("rescale drops the last prime and lowers the scale") {
    const auto ctx = CkksContext::create(parse_params("13:60,30,60:30"));
    const KeyMaterial km = keygen(ctx, 42, power_of_two_steps(ctx));
    Evaluator ev(ctx);
    ring::Prng rng(29);
    const auto x = random_unit_values(rng, ctx.slot_count());
    const auto y = random_unit_values(rng, ctx.slot_count());

    Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 1), km.sk, rng);
    CHECK(ct.level == 1);
    CHECK_THROWS_AS(ev.rotate_inplace(ct, 1, km.gks), std::logic_error);

    ev.mul_plain_inplace(ct, encode(ctx, y, 30, 1));
    CHECK(ct.scale_log2 == 60);
    ev.rescale_inplace(ct);
    CHECK(ct.level == 0);
    CHECK(ct.scale_log2 == 30);

    // Integer scale bookkeeping leaves the known factor 2^w / q_dropped on
    // every slot (the dropped prime sits a little under its power of two).
    // Division rounding adds ~|eps0 + eps1*s| per slot, a few thousand in
    // absolute terms, so it needs ~2^30 of remaining scale to sit below 1e-4.
    const double drop_ratio =
        std::ldexp(1.0, 30) / static_cast<double>(ctx.ct_prime(1));
    std::vector<double> want(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) want[i] = x[i] * y[i] * drop_ratio;
    const auto back = decrypt_values(ctx, ct, km.sk);
    CHECK(max_abs_diff(want, back) < 1e-4);
    CHECK(drop_ratio == doctest::Approx(1.0).epsilon(0.02));

    // Level 0 now; rotation works and the chain is exhausted.
    ev.rotate_inplace(ct, 1, km.gks);
    CHECK_THROWS_AS(ev.rescale_inplace(ct), NoLevelLeft);
}

TEST_CASE("scale overflow on multiply is refused") {
    const auto ctx = CkksContext::create(default_params(11));
    const KeyMaterial km = keygen(ctx, 42, {});
    Evaluator ev(ctx);
    ring::Prng rng(31);
    const auto x = random_unit_values(rng, ctx.slot_count());
    Ciphertext ct = encrypt(ctx, encode(ctx, x, 20, 0), km.sk, rng);
    CHECK_THROWS_AS(ev.mul_plain_inplace(ct, encode(ctx, x, 8, 0)), OverflowRisk);
    // One bit under the budget is allowed.
    CHECK_NOTHROW(ev.mul_plain_inplace(ct, encode(ctx, x, 6, 0)));
}

TEST_CASE("encoding magnitudes past half the first prime is refused") {
    const auto ctx = CkksContext::create(default_params(11));
    const std::vector<double> big(8, 1024.0);  // 2^10 * 2^20 = 2^30 > 2^26
    CHECK_THROWS_AS(encode(ctx, big, 20, 0), OverflowRisk);
    const std::vector<double> fits(8, 1.0);
    CHECK_NOTHROW(encode(ctx, fits, 20, 0));
}

TEST_CASE("decryption under the wrong key is uncorrelated with the message") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial good = keygen(ctx, 42, {});
    const KeyMaterial bad = keygen(ctx, 43, {});
    ring::Prng rng(37);
    const auto x = random_unit_values(rng, ctx.slot_count());
    const Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 0), good.sk, rng);
    const auto wrong = decrypt_values(ctx, ct, bad.sk);

    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += wrong[i];
        sxx += x[i] * x[i];
        syy += wrong[i] * wrong[i];
        sxy += x[i] * wrong[i];
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double vx = sxx / n - (sx / n) * (sx / n);
    const double vy = syy / n - (sy / n) * (sy / n);
    const double rho = cov / std::sqrt(vx * vy);
    CHECK(std::abs(rho) < 0.05);
    // The failed unmasking leaves residues on the order of the modulus over
    // the scale, not unit-sized values.
    double mean_abs = 0;
    for (double v : wrong) mean_abs += std::abs(v);
    mean_abs /= n;
    CHECK(mean_abs > 1e3);
}

TEST_CASE("fresh ciphertexts serialize with a seed in place of the mask") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial km = keygen(ctx, 42, {});
    ring::Prng rng(41);
    const auto x = random_unit_values(rng, ctx.slot_count());
    const Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);

    const auto bytes = ciphertext_bytes(ctx, ct);
    // magic 4, version 2, log2n 1, chain_len 1, widths 1, scale 2, level 1,
    // flags 1, one residue row, 32-byte seed.
    CHECK(bytes.size() == 13 + ctx.n() * 8 + 32);

    const Ciphertext back = ciphertext_from_bytes(ctx, bytes);
    CHECK(back.c0.data == ct.c0.data);
    CHECK(back.c1.data == ct.c1.data);
    CHECK(back.scale_log2 == ct.scale_log2);
    CHECK(back.level == ct.level);
    CHECK(back.seed_compressed);

    // Serialization is stable: same bytes again.
    CHECK(ciphertext_bytes(ctx, back) == bytes);
}

TEST_CASE("operated ciphertexts serialize both polynomials") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial km = keygen(ctx, 42, power_of_two_steps(ctx));
    Evaluator ev(ctx);
    ring::Prng rng(43);
    const auto x = random_unit_values(rng, ctx.slot_count());
    Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);
    ev.rotate_inplace(ct, 1, km.gks);
    CHECK_FALSE(ct.seed_compressed);

    const auto bytes = ciphertext_bytes(ctx, ct);
    CHECK(bytes.size() == 13 + 2 * ctx.n() * 8);
    const Ciphertext back = ciphertext_from_bytes(ctx, bytes);
    CHECK(back.c0.data == ct.c0.data);
    CHECK(back.c1.data == ct.c1.data);
}

TEST_CASE("keys roundtrip through serialization") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial km = keygen(ctx, 42, power_of_two_steps(ctx));
    ring::Prng rng(47);
    const auto x = random_unit_values(rng, ctx.slot_count());

    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    write_secret_key(buf, ctx, km.sk);
    write_galois_keys(buf, ctx, km.gks);
    const SecretKey sk2 = read_secret_key(buf, ctx);
    const GaloisKeySet gks2 = read_galois_keys(buf, ctx);

    CHECK(sk2.s_ntt.data == km.sk.s_ntt.data);
    CHECK(gks2.by_step.size() == km.gks.by_step.size());

    Evaluator ev(ctx);
    Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);
    ev.rotate_inplace(ct, 4, gks2);
    const auto back = decrypt_values(ctx, ct, sk2);
    double m = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        m = std::max(m, std::abs(back[i] - x[(i + 4) % x.size()]));
    CHECK(m < 1e-4);
}

TEST_CASE("mismatched headers are refused") {
    const auto ctx12 = CkksContext::create(default_params(12));
    const auto ctx13 = CkksContext::create(default_params(13));
    const KeyMaterial km = keygen(ctx12, 42, {});
    ring::Prng rng(53);
    const auto x = random_unit_values(rng, ctx12.slot_count());
    const Ciphertext ct = encrypt(ctx12, encode(ctx12, x, 30, 0), km.sk, rng);
    const auto bytes = ciphertext_bytes(ctx12, ct);
    CHECK_THROWS_AS(ciphertext_from_bytes(ctx13, bytes), ProtocolError);

    auto truncated = bytes;
    truncated.resize(truncated.size() / 2);
    CHECK_THROWS_AS(ciphertext_from_bytes(ctx12, truncated), ProtocolError);
}

TEST_CASE("encryption streams are deterministic per seed") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial km = keygen(ctx, 42, {});
    ring::Prng vp(59);
    const auto x = random_unit_values(vp, ctx.slot_count());
    ring::Prng r1(61), r2(61);
    const Ciphertext a = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, r1);
    const Ciphertext b = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, r2);
    CHECK(ciphertext_bytes(ctx, a) == ciphertext_bytes(ctx, b));
}

TEST_CASE("operation counters track the pipeline") {
    const auto ctx = CkksContext::create(default_params(12));
    const KeyMaterial km = keygen(ctx, 42, power_of_two_steps(ctx));
    Evaluator ev(ctx);
    ring::Prng rng(67);
    const auto x = random_unit_values(rng, ctx.slot_count());
    Ciphertext ct = encrypt(ctx, encode(ctx, x, 30, 0), km.sk, rng);

    CHECK(ev.counts().mul_ct_pt == 0);
    ev.mul_plain_inplace(ct, encode(ctx, x, 20, 0));
    ev.reduce_sum_inplace(ct, 1024, km.gks);
    CHECK(ev.counts().mul_ct_pt == 1);
    CHECK(ev.counts().rotations == 10);
    CHECK(ev.counts().key_switches == 10);
    CHECK(ev.counts().rescales == 0);
    ev.reset_counts();
    CHECK(ev.counts().rotations == 0);
}
