#include "hehdc/ring/modmath.hpp"

namespace hehdc::ring {

namespace {

bool miller_rabin_witness(u64 n, u64 a, u64 d, int r) {
    u64 x = pow_mod(a % n, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < r; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return false;
    }
    return true;  // composite witness found
}

}  // namespace

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    u64 d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    // This base set decides primality for every n < 3.3 * 10^24.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (miller_rabin_witness(n, a, d, r)) return false;
    }
    return true;
}

u64 find_prime_below(u64 upper, u64 modulo_step) {
    if (upper <= modulo_step + 1) throw std::invalid_argument("prime search range empty");
    // Largest candidate < upper congruent to 1 mod modulo_step.
    u64 p = ((upper - 2) / modulo_step) * modulo_step + 1;
    while (p > modulo_step) {
        if (is_prime(p)) return p;
        p -= modulo_step;
    }
    throw std::runtime_error("no NTT prime found in range");
}

u64 find_primitive_root(u64 q, u64 two_n) {
    // two_n is a power of two, so any c = x^((q-1)/2n) with c^n = -1 has
    // exact order 2n.
    u64 n = two_n / 2;
    for (u64 x = 2; x < q; ++x) {
        u64 c = pow_mod(x, (q - 1) / two_n, q);
        if (pow_mod(c, n, q) == q - 1) return c;
    }
    throw std::runtime_error("no primitive root found");
}

}  // namespace hehdc::ring
