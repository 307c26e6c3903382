#include <immintrin.h>

#include "hehdc/ring/kernels.hpp"

// AVX2 variants of the residue-row kernels. 64x64 multiplies are emulated
// with four 32x32 products; all values stay below 2^62 so signed 64-bit
// compares are safe. Results are bit-identical to the scalar kernels.

namespace hehdc::ring::kernels {

namespace {

inline __m256i mullo64(__m256i a, __m256i b) {
    __m256i a_hi = _mm256_srli_epi64(a, 32);
    __m256i b_hi = _mm256_srli_epi64(b, 32);
    __m256i lo = _mm256_mul_epu32(a, b);
    __m256i cross = _mm256_add_epi64(_mm256_mul_epu32(a, b_hi), _mm256_mul_epu32(a_hi, b));
    return _mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32));
}

inline __m256i mulhi64(__m256i a, __m256i b) {
    const __m256i mask32 = _mm256_set1_epi64x(0xffffffffLL);
    __m256i a_hi = _mm256_srli_epi64(a, 32);
    __m256i b_hi = _mm256_srli_epi64(b, 32);
    __m256i ll = _mm256_mul_epu32(a, b);
    __m256i lh = _mm256_mul_epu32(a, b_hi);
    __m256i hl = _mm256_mul_epu32(a_hi, b);
    __m256i hh = _mm256_mul_epu32(a_hi, b_hi);
    __m256i mid = _mm256_add_epi64(
        _mm256_srli_epi64(ll, 32),
        _mm256_add_epi64(_mm256_and_si256(lh, mask32), _mm256_and_si256(hl, mask32)));
    return _mm256_add_epi64(
        hh, _mm256_add_epi64(_mm256_srli_epi64(lh, 32),
                             _mm256_add_epi64(_mm256_srli_epi64(hl, 32),
                                              _mm256_srli_epi64(mid, 32))));
}

// r - q if r >= q (r < 2q < 2^63).
inline __m256i cond_sub(__m256i r, __m256i q, __m256i q_minus_1) {
    __m256i over = _mm256_cmpgt_epi64(r, q_minus_1);
    return _mm256_sub_epi64(r, _mm256_and_si256(over, q));
}

inline __m256i shoup_mul(__m256i a, __m256i s, __m256i s_shoup, __m256i q, __m256i q_minus_1) {
    __m256i hi = mulhi64(a, s_shoup);
    __m256i r = _mm256_sub_epi64(mullo64(a, s), mullo64(hi, q));
    return cond_sub(r, q, q_minus_1);
}

void add_mod_avx2(u64* r, const u64* a, const u64* b, u64 q, std::size_t n) {
    const __m256i vq = _mm256_set1_epi64x(static_cast<long long>(q));
    const __m256i vq1 = _mm256_set1_epi64x(static_cast<long long>(q - 1));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        __m256i s = cond_sub(_mm256_add_epi64(va, vb), vq, vq1);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(r + i), s);
    }
    for (; i < n; ++i) r[i] = add_mod(a[i], b[i], q);
}

void sub_mod_avx2(u64* r, const u64* a, const u64* b, u64 q, std::size_t n) {
    const __m256i vq = _mm256_set1_epi64x(static_cast<long long>(q));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        __m256i borrow = _mm256_cmpgt_epi64(vb, va);
        __m256i d = _mm256_sub_epi64(va, vb);
        d = _mm256_add_epi64(d, _mm256_and_si256(borrow, vq));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(r + i), d);
    }
    for (; i < n; ++i) r[i] = sub_mod(a[i], b[i], q);
}

void neg_mod_avx2(u64* r, const u64* a, u64 q, std::size_t n) {
    const __m256i vq = _mm256_set1_epi64x(static_cast<long long>(q));
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i is_zero = _mm256_cmpeq_epi64(va, zero);
        __m256i d = _mm256_sub_epi64(vq, va);
        d = _mm256_andnot_si256(is_zero, d);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(r + i), d);
    }
    for (; i < n; ++i) r[i] = neg_mod(a[i], q);
}

void mul_mod_avx2(u64* r, const u64* a, const u64* b, u64 q, const BarrettConst& bc,
                  std::size_t n) {
    const __m256i vq = _mm256_set1_epi64x(static_cast<long long>(q));
    const __m256i vq1 = _mm256_set1_epi64x(static_cast<long long>(q - 1));
    const __m256i vmu = _mm256_set1_epi64x(static_cast<long long>(bc.mu));
    const __m128i sh_lo = _mm_cvtsi64_si128(static_cast<long long>(bc.shift));
    const __m128i sh_hi = _mm_cvtsi64_si128(static_cast<long long>(64 - bc.shift));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        __m256i lo = mullo64(va, vb);
        __m256i hi = mulhi64(va, vb);
        __m256i t = _mm256_or_si256(_mm256_sll_epi64(hi, sh_hi), _mm256_srl_epi64(lo, sh_lo));
        __m256i u = mulhi64(t, vmu);
        __m256i res = _mm256_sub_epi64(lo, mullo64(u, vq));
        res = cond_sub(cond_sub(res, vq, vq1), vq, vq1);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(r + i), res);
    }
    for (; i < n; ++i) r[i] = mul_mod_barrett(a[i], b[i], q, bc);
}

void mul_scalar_mod_avx2(u64* r, const u64* a, u64 s, u64 s_shoup, u64 q, std::size_t n) {
    const __m256i vq = _mm256_set1_epi64x(static_cast<long long>(q));
    const __m256i vq1 = _mm256_set1_epi64x(static_cast<long long>(q - 1));
    const __m256i vs = _mm256_set1_epi64x(static_cast<long long>(s));
    const __m256i vss = _mm256_set1_epi64x(static_cast<long long>(s_shoup));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(r + i), shoup_mul(va, vs, vss, vq, vq1));
    }
    for (; i < n; ++i) r[i] = mul_mod_shoup(a[i], s, s_shoup, q);
}

void ntt_forward_avx2(u64* a, const NttTables& t) {
    const u64 q = t.q;
    const __m256i vq = _mm256_set1_epi64x(static_cast<long long>(q));
    const __m256i vq1 = _mm256_set1_epi64x(static_cast<long long>(q - 1));
    std::size_t span = t.n >> 1;
    for (std::size_t m = 1; m < t.n; m <<= 1) {
        for (std::size_t i = 0; i < m; ++i) {
            const u64 w = t.roots[m + i];
            const u64 ws = t.roots_shoup[m + i];
            u64* x = a + 2 * i * span;
            u64* y = x + span;
            if (span >= 4) {
                const __m256i vw = _mm256_set1_epi64x(static_cast<long long>(w));
                const __m256i vws = _mm256_set1_epi64x(static_cast<long long>(ws));
                for (std::size_t j = 0; j < span; j += 4) {
                    __m256i vx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + j));
                    __m256i vy = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(y + j));
                    __m256i v = shoup_mul(vy, vw, vws, vq, vq1);
                    __m256i sum = cond_sub(_mm256_add_epi64(vx, v), vq, vq1);
                    __m256i diff = cond_sub(
                        _mm256_sub_epi64(_mm256_add_epi64(vx, vq), v), vq, vq1);
                    _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + j), sum);
                    _mm256_storeu_si256(reinterpret_cast<__m256i*>(y + j), diff);
                }
            } else {
                for (std::size_t j = 0; j < span; ++j) {
                    u64 u = x[j];
                    u64 v = mul_mod_shoup(y[j], w, ws, q);
                    x[j] = add_mod(u, v, q);
                    y[j] = sub_mod(u, v, q);
                }
            }
        }
        span >>= 1;
    }
}

void ntt_inverse_avx2(u64* a, const NttTables& t) {
    const u64 q = t.q;
    const __m256i vq = _mm256_set1_epi64x(static_cast<long long>(q));
    const __m256i vq1 = _mm256_set1_epi64x(static_cast<long long>(q - 1));
    std::size_t span = 1;
    for (std::size_t m = t.n >> 1; m >= 1; m >>= 1) {
        for (std::size_t i = 0; i < m; ++i) {
            const u64 w = t.inv_roots[m + i];
            const u64 ws = t.inv_roots_shoup[m + i];
            u64* x = a + 2 * i * span;
            u64* y = x + span;
            if (span >= 4) {
                const __m256i vw = _mm256_set1_epi64x(static_cast<long long>(w));
                const __m256i vws = _mm256_set1_epi64x(static_cast<long long>(ws));
                for (std::size_t j = 0; j < span; j += 4) {
                    __m256i vx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + j));
                    __m256i vy = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(y + j));
                    __m256i sum = cond_sub(_mm256_add_epi64(vx, vy), vq, vq1);
                    __m256i diff = cond_sub(
                        _mm256_sub_epi64(_mm256_add_epi64(vx, vq), vy), vq, vq1);
                    __m256i prod = shoup_mul(diff, vw, vws, vq, vq1);
                    _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + j), sum);
                    _mm256_storeu_si256(reinterpret_cast<__m256i*>(y + j), prod);
                }
            } else {
                for (std::size_t j = 0; j < span; ++j) {
                    u64 u = x[j];
                    u64 v = y[j];
                    x[j] = add_mod(u, v, q);
                    y[j] = mul_mod_shoup(sub_mod(u, v, q), w, ws, q);
                }
            }
        }
        span <<= 1;
    }
    mul_scalar_mod_avx2(a, a, t.n_inv, t.n_inv_shoup, q, t.n);
}

}  // namespace

bool avx2_available() { return __builtin_cpu_supports("avx2") != 0; }

const Kernels& avx2_kernels() {
    static const Kernels k = {
        "avx2",        add_mod_avx2,        sub_mod_avx2,     neg_mod_avx2,
        mul_mod_avx2,  mul_scalar_mod_avx2, ntt_forward_avx2, ntt_inverse_avx2,
    };
    return k;
}

}  // namespace hehdc::ring::kernels
