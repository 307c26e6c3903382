#include <stdexcept>

#include "hehdc/ring/kernels.hpp"

// Linked instead of the AVX2 translation unit on targets without AVX2
// support at build time.

namespace hehdc::ring::kernels {

bool avx2_available() { return false; }

const Kernels& avx2_kernels() {
    throw std::runtime_error("AVX2 kernels not compiled into this binary");
}

}  // namespace hehdc::ring::kernels
