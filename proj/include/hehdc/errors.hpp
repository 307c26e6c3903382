#pragma once

#include <stdexcept>
#include <string>

namespace hehdc {

// Rejected parameter set (budget, chain shape, scale). CLI exit code 4.
struct ParamError : std::runtime_error {
    explicit ParamError(const std::string& what) : std::runtime_error(what) {}
};

// Total modulus bits exceed the cap for the ring degree.
struct SecurityBudgetExceeded : ParamError {
    explicit SecurityBudgetExceeded(const std::string& what) : ParamError(what) {}
};

// Fewer primes than the ciphertext chain plus the key-switching prime needs.
struct ChainTooShort : ParamError {
    explicit ChainTooShort(const std::string& what) : ParamError(what) {}
};

// A value would not survive the coefficient modulus at the current level.
struct OverflowRisk : std::runtime_error {
    explicit OverflowRisk(const std::string& what) : std::runtime_error(what) {}
};

// Rescale requested on a ciphertext already at the last level.
struct NoLevelLeft : std::runtime_error {
    explicit NoLevelLeft(const std::string& what) : std::runtime_error(what) {}
};

// Operands disagree on level or scale.
struct ScaleMismatch : std::invalid_argument {
    explicit ScaleMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Rotation requested for a step with no switching key in the set.
struct MissingGaloisKey : std::invalid_argument {
    explicit MissingGaloisKey(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed or out-of-order wire traffic. CLI exit code 3.
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or corrupt dataset input (bad magic, truncation).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Similarity against a zero-length vector.
struct ZeroNorm : std::runtime_error {
    explicit ZeroNorm(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hehdc
