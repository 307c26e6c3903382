#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hehdc::ckks {

// Modulus chain description. The last prime is the key-switching prime and
// never carries ciphertext data; the remaining primes form the ciphertext
// modulus, consumed from the back by rescaling.
struct CkksParams {
    unsigned log2n = 13;
    std::vector<unsigned> prime_bits = {60, 60};
    unsigned scale_log2 = 30;

    std::size_t n() const { return std::size_t{1} << log2n; }
    std::size_t slot_count() const { return n() / 2; }
    std::size_t ct_prime_count() const { return prime_bits.size() - 1; }
    unsigned top_level() const { return static_cast<unsigned>(ct_prime_count()) - 1; }
    // Ciphertext modulus bits available at a level (nominal widths).
    unsigned ct_modulus_bits(unsigned level) const {
        unsigned sum = 0;
        for (unsigned i = 0; i <= level; ++i) sum += prime_bits[i];
        return sum;
    }
};

// Largest admissible total chain width per ring degree. A chain is accepted
// only when the sum over all its primes, including the key-switching prime,
// stays within the row for its degree.
unsigned max_chain_bits(unsigned log2n);

// Throws ParamError when the set is outside the supported envelope.
void validate(const CkksParams& p);

// Stock parameter sets per degree, e.g. degree 2^13 -> primes (60,60),
// scale 2^30. Degree 2^11 uses (27,27) with scale 2^20.
CkksParams default_params(unsigned log2n);

// Parses "log2n:w0,w1,...:scale", e.g. "13:60,60:30". Omitted fields fall
// back to the defaults for the degree: "13" or "13:60,60".
CkksParams parse_params(const std::string& text);

std::string format_params(const CkksParams& p);

}  // namespace hehdc::ckks
