#pragma once

#include <complex>
#include <span>
#include <vector>

#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/objects.hpp"

namespace hehdc::ckks {

// Packs up to slot_count() values into a plaintext via the canonical
// embedding (half-size FFT over the odd powers of the 2n-th root, walked in
// the order 5^j). Shorter inputs are zero-padded. Throws OverflowRisk when
// max|v| * 2^scale reaches half the first prime.
Plaintext encode(const CkksContext& ctx, std::span<const double> values, unsigned scale_log2,
                 unsigned level);
Plaintext encode_complex(const CkksContext& ctx, std::span<const std::complex<double>> values,
                         unsigned scale_log2, unsigned level);

// Inverse map from a coefficient-domain polynomial. Centered CRT lifting
// supports at most two residue rows, which covers every chain in use.
std::vector<std::complex<double>> decode_complex(const CkksContext& ctx, const RnsPoly& poly,
                                                 unsigned scale_log2);
std::vector<double> decode(const CkksContext& ctx, const RnsPoly& poly, unsigned scale_log2);

}  // namespace hehdc::ckks
