#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hehdc/ring/modmath.hpp"

// Data-parallel inner loops over residue rows. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant. The two are
// bit-identical on all inputs; the active table is chosen once at startup
// (override with HEHDC_KERNELS=scalar|avx2).

namespace hehdc::ring::kernels {

// Precomputed twiddle tables for one (n, q) pair. Forward roots hold
// psi^brv(i) with Shoup companions; inverse roots are their modular
// inverses, so the inverse transform unwinds the forward stages exactly.
struct NttTables {
    std::size_t n = 0;
    unsigned log2n = 0;
    u64 q = 0;
    std::vector<u64> roots;        // [n], bit-reversed powers of psi
    std::vector<u64> roots_shoup;  // [n]
    std::vector<u64> inv_roots;        // [n], elementwise inverse of roots
    std::vector<u64> inv_roots_shoup;  // [n]
    u64 n_inv = 0;
    u64 n_inv_shoup = 0;
};

NttTables make_ntt_tables(std::size_t n, u64 q, u64 psi);

struct Kernels {
    const char* name;
    void (*add_mod_n)(u64* r, const u64* a, const u64* b, u64 q, std::size_t n);
    void (*sub_mod_n)(u64* r, const u64* a, const u64* b, u64 q, std::size_t n);
    void (*neg_mod_n)(u64* r, const u64* a, u64 q, std::size_t n);
    // r[i] = a[i] * b[i] mod q, both operands variable (Barrett).
    void (*mul_mod_n)(u64* r, const u64* a, const u64* b, u64 q, const BarrettConst& bc,
                      std::size_t n);
    // r[i] = a[i] * s mod q with precomputed Shoup quotient.
    void (*mul_scalar_mod_n)(u64* r, const u64* a, u64 s, u64 s_shoup, u64 q, std::size_t n);
    // In-place negacyclic NTT over one residue row (natural -> bit-reversed).
    void (*ntt_forward)(u64* a, const NttTables& t);
    // Inverse transform (bit-reversed -> natural), including the 1/n scaling.
    void (*ntt_inverse)(u64* a, const NttTables& t);
};

const Kernels& scalar_kernels();
bool avx2_available();
const Kernels& avx2_kernels();  // valid only when avx2_available()

// The table selected at process start (env HEHDC_KERNELS overrides).
const Kernels& active();
std::string active_name();

}  // namespace hehdc::ring::kernels
