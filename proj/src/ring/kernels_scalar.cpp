#include <cstdlib>
#include <stdexcept>

#include "hehdc/ring/kernels.hpp"

namespace hehdc::ring::kernels {

NttTables make_ntt_tables(std::size_t n, u64 q, u64 psi) {
    NttTables t;
    t.n = n;
    t.log2n = bit_length(static_cast<u64>(n)) - 1;
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("ntt size must be a power of two");
    t.q = q;
    t.roots.resize(n);
    t.roots_shoup.resize(n);
    t.inv_roots.resize(n);
    t.inv_roots_shoup.resize(n);

    // roots[i] = psi^brv(i), brv over log2(n) bits.
    u64 power = 1;
    std::vector<u64> natural(n);
    for (std::size_t i = 0; i < n; ++i) {
        natural[i] = power;
        power = mul_mod(power, psi, q);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rev = 0;
        for (unsigned b = 0; b < t.log2n; ++b) {
            rev |= ((i >> b) & 1) << (t.log2n - 1 - b);
        }
        t.roots[i] = natural[rev];
    }
    for (std::size_t i = 0; i < n; ++i) {
        t.roots_shoup[i] = shoup_precompute(t.roots[i], q);
        t.inv_roots[i] = inv_mod(t.roots[i], q);
        t.inv_roots_shoup[i] = shoup_precompute(t.inv_roots[i], q);
    }
    t.n_inv = inv_mod(static_cast<u64>(n % q), q);
    t.n_inv_shoup = shoup_precompute(t.n_inv, q);
    return t;
}

namespace {

void add_mod_scalar(u64* r, const u64* a, const u64* b, u64 q, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) r[i] = add_mod(a[i], b[i], q);
}

void sub_mod_scalar(u64* r, const u64* a, const u64* b, u64 q, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) r[i] = sub_mod(a[i], b[i], q);
}

void neg_mod_scalar(u64* r, const u64* a, u64 q, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) r[i] = neg_mod(a[i], q);
}

void mul_mod_scalar(u64* r, const u64* a, const u64* b, u64 q, const BarrettConst& bc,
                    std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) r[i] = mul_mod_barrett(a[i], b[i], q, bc);
}

void mul_scalar_mod_scalar(u64* r, const u64* a, u64 s, u64 s_shoup, u64 q, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) r[i] = mul_mod_shoup(a[i], s, s_shoup, q);
}

// Cooley-Tukey butterflies, fully reduced after every stage so that all
// kernel variants produce identical words.
void ntt_forward_scalar(u64* a, const NttTables& t) {
    const u64 q = t.q;
    std::size_t span = t.n >> 1;
    for (std::size_t m = 1; m < t.n; m <<= 1) {
        for (std::size_t i = 0; i < m; ++i) {
            const u64 w = t.roots[m + i];
            const u64 ws = t.roots_shoup[m + i];
            u64* x = a + 2 * i * span;
            u64* y = x + span;
            for (std::size_t j = 0; j < span; ++j) {
                u64 u = x[j];
                u64 v = mul_mod_shoup(y[j], w, ws, q);
                x[j] = add_mod(u, v, q);
                y[j] = sub_mod(u, v, q);
            }
        }
        span >>= 1;
    }
}

// Gentleman-Sande stages in the reverse order of the forward transform;
// each stage uses the inverse twiddles of the matching forward stage and
// the deferred 1/2-per-stage factor is folded into the final n^-1 scaling.
void ntt_inverse_scalar(u64* a, const NttTables& t) {
    const u64 q = t.q;
    std::size_t span = 1;
    for (std::size_t m = t.n >> 1; m >= 1; m >>= 1) {
        for (std::size_t i = 0; i < m; ++i) {
            const u64 w = t.inv_roots[m + i];
            const u64 ws = t.inv_roots_shoup[m + i];
            u64* x = a + 2 * i * span;
            u64* y = x + span;
            for (std::size_t j = 0; j < span; ++j) {
                u64 u = x[j];
                u64 v = y[j];
                x[j] = add_mod(u, v, q);
                y[j] = mul_mod_shoup(sub_mod(u, v, q), w, ws, q);
            }
        }
        span <<= 1;
    }
    for (std::size_t i = 0; i < t.n; ++i) {
        a[i] = mul_mod_shoup(a[i], t.n_inv, t.n_inv_shoup, q);
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {
        "scalar",          add_mod_scalar,        sub_mod_scalar,     neg_mod_scalar,
        mul_mod_scalar,    mul_scalar_mod_scalar, ntt_forward_scalar, ntt_inverse_scalar,
    };
    return k;
}

const Kernels& active() {
    static const Kernels* chosen = [] {
        const char* env = std::getenv("HEHDC_KERNELS");
        if (env != nullptr) {
            std::string want(env);
            if (want == "scalar") return &scalar_kernels();
            if (want == "avx2") {
                if (!avx2_available()) throw std::runtime_error("HEHDC_KERNELS=avx2 but AVX2 not supported");
                return &avx2_kernels();
            }
            throw std::runtime_error("unknown HEHDC_KERNELS value: " + want);
        }
        return avx2_available() ? &avx2_kernels() : &scalar_kernels();
    }();
    return *chosen;
}

std::string active_name() { return active().name; }

}  // namespace hehdc::ring::kernels
