#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/evaluator.hpp"
#include "hehdc/hdc/model.hpp"
#include "hehdc/hdc/quantize.hpp"
#include "hehdc/protocol/messages.hpp"
#include "hehdc/protocol/transport.hpp"

// The server half of the protocol. Nothing in this header (or its includes)
// exposes secret-key material or decryption: the similarity pipeline runs on
// ciphertexts, published plaintext class chunks, and the session's rotation
// keys alone.

namespace hehdc::protocol {

struct PipelineOptions {
    // Rescale once after the class multiply; needs a chain with a level to
    // spare and is off in the default depth-1 pipeline.
    bool rescale_after_mul = false;
};

// Published model: per-class plaintext-encoded hypervector chunks plus the
// manifest needed to vet an incoming session.
struct ServerModel {
    ckks::CkksParams params;
    std::uint64_t encoder_id = 0;
    std::uint32_t hv_dim = 0;
    std::uint32_t chunk_count = 0;
    unsigned class_level = 0;
    unsigned class_scale_log2 = 0;
    unsigned norm_scale_log2 = 0;
    std::vector<std::string> label_names;
    // classes[l][i] = chunk i of class l, encoded at class_scale_log2.
    std::vector<std::vector<ckks::Plaintext>> classes;
    // Per-class 1/||C_l|| correction plaintexts, used only when the model
    // was published unnormalized; empty otherwise.
    std::vector<ckks::Plaintext> norm_inv;

    std::size_t num_classes() const { return classes.size(); }
};

// Normalized float model: one multiply per chunk, no correction needed.
ServerModel build_server_model(const ckks::CkksContext& ctx, const hdc::HdcModel& model,
                               std::uint64_t encoder_id, unsigned class_level = 0);
// Quantized model: chunks carry the dequantized class values.
ServerModel build_server_model(const ckks::CkksContext& ctx, const hdc::QuantizedModel& qm,
                               std::uint64_t encoder_id, unsigned class_level = 0);
// Unnormalized model: classes are pre-scaled by a single public factor and
// each score is fixed up with a second multiply by replicated 1/||C_l||.
// Scores match the normalized model's; the extra multiply is the cost.
ServerModel build_server_model_with_correction(const ckks::CkksContext& ctx,
                                               const hdc::HdcModel& model,
                                               std::uint64_t encoder_id, unsigned class_level = 0);

// Per class: one multiply per chunk against the encrypted query, adds fold
// the chunks, optional rescale, optional norm-correction multiply, then one
// slot reduction; the score lands replicated in slot 0 of one ciphertext
// per class.
ScoreMessage server_similarity(ckks::Evaluator& ev, const ckks::CkksContext& ctx,
                               const QueryMessage& q, const ServerModel& m,
                               const ckks::GaloisKeySet& gks, const PipelineOptions& opts = {});

// One connection's session state machine: SessionSetup first, then one
// Scores reply per Query. Protocol violations answer with a typed error
// frame and close. Returns when the peer closes.
void serve_connection(Transport& transport, const ckks::CkksContext& ctx, const ServerModel& m,
                      const PipelineOptions& opts = {});

// Accept loop; each connection runs on its own thread against the shared
// read-only model. Serves forever when max_connections is 0.
void serve(TcpListener& listener, const ckks::CkksContext& ctx, const ServerModel& m,
           const PipelineOptions& opts = {}, std::size_t max_connections = 0);

}  // namespace hehdc::protocol
