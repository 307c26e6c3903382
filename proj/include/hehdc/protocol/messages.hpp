#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/objects.hpp"
#include "hehdc/protocol/transport.hpp"

namespace hehdc::protocol {

// Opens a session: the client's parameter set, its rotation keys (evaluation
// keys only; they reveal nothing about plaintexts), and the query shape the
// server must agree on.
struct SessionSetup {
    ckks::CkksParams params;
    ckks::GaloisKeySet gks;
    std::uint64_t encoder_id = 0;
    std::uint32_t hv_dim = 0;
    std::uint32_t chunk_count = 0;
};

// Query hypervector split into contiguous slot_count() chunks, zero-padded,
// each encrypted separately.
struct QueryMessage {
    std::vector<ckks::Ciphertext> chunks;
};

// One ciphertext per class, the class score replicated across its slots.
struct ScoreMessage {
    std::vector<ckks::Ciphertext> scores;
};

enum class ErrorCode : std::uint16_t {
    bad_frame = 1,
    session_required = 2,
    params_mismatch = 3,
    encoder_mismatch = 4,
    crypto_rejected = 5,
    internal = 6,
};

struct ErrorInfo {
    ErrorCode code = ErrorCode::internal;
    std::string message;
};

// Ciphertexts needed for one query hypervector: ceil(D / slots).
std::uint32_t chunk_count_for(std::size_t hv_dim, const ckks::CkksParams& params);

// SessionSetup travels as a fixed header (params, encoder id, shape)
// followed by the serialized Galois keys. The header parses without a
// context so the receiver can vet the parameter set before building one.
struct SessionHeader {
    ckks::CkksParams params;
    std::uint64_t encoder_id = 0;
    std::uint32_t hv_dim = 0;
    std::uint32_t chunk_count = 0;
};

std::vector<std::uint8_t> session_setup_payload(const ckks::CkksContext& ctx,
                                                const SessionSetup& s);
SessionHeader read_session_header(std::istream& is);
ckks::GaloisKeySet read_session_gks(std::istream& is, const ckks::CkksContext& ctx);
// Header and keys in one step; builds and validates a context from the
// embedded parameters.
std::pair<SessionSetup, ckks::CkksContext> parse_session_setup(
    const std::vector<std::uint8_t>& payload);

std::vector<std::uint8_t> query_payload(const ckks::CkksContext& ctx, const QueryMessage& q);
QueryMessage parse_query(const std::vector<std::uint8_t>& payload, const ckks::CkksContext& ctx);

std::vector<std::uint8_t> scores_payload(const ckks::CkksContext& ctx, const ScoreMessage& s);
ScoreMessage parse_scores(const std::vector<std::uint8_t>& payload, const ckks::CkksContext& ctx);

std::vector<std::uint8_t> error_payload(const ErrorInfo& e);
ErrorInfo parse_error(const std::vector<std::uint8_t>& payload);

}  // namespace hehdc::protocol
