#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hehdc::cli {

struct BenchOptions {
    std::string suite = "all";  // ops | e2e | ablation | all
    std::string report;         // output prefix; empty prints only
    unsigned reps = 5;
    std::uint64_t seed = 1;
    std::vector<unsigned> degrees = {11, 12, 13};
    std::vector<std::size_t> dims = {2048, 8192};
    std::size_t ablation_dim = 4096;
};
int cmd_bench(const BenchOptions& opt);

// Per-op medians at the pipeline level on a chain with one spare level, so
// rescale is measurable alongside the rest. Milliseconds.
struct OpsRow {
    std::string params;
    unsigned log2n = 0;
    double encode_ms = 0, encrypt_ms = 0, add_ms = 0, mul_ms = 0, rotate_ms = 0,
           rescale_ms = 0, decrypt_ms = 0;
};
std::vector<OpsRow> run_ops_suite(const std::vector<unsigned>& degrees, unsigned reps,
                                  std::uint64_t seed);

// One encrypted query against a synthetic normalized 10-class model:
// client encrypt, server similarity (including query parse), client decrypt.
struct E2eRow {
    std::string params;
    unsigned log2n = 0;
    std::size_t hv_dim = 0;
    std::uint32_t chunks = 0;
    double encrypt_ms = 0, infer_ms = 0, decrypt_ms = 0, total_ms = 0;
    std::size_t query_bytes = 0, scores_bytes = 0;
    double agreement = 0;  // encrypted vs plaintext argmax on probe queries
};
std::vector<E2eRow> run_e2e_suite(const std::vector<unsigned>& degrees,
                                  const std::vector<std::size_t>& dims, unsigned reps,
                                  std::uint64_t seed);

// The three pipeline variants, same synthetic model and queries:
//   rescale:    unnormalized classes, fixup multiply, rescale, 3-prime chain
//   correction: unnormalized classes, fixup multiply, flat chain
//   normalized: normalized classes, flat chain (default pipeline)
struct AblationRow {
    std::string variant;
    std::string params;
    double encrypt_ms = 0, infer_ms = 0, decrypt_ms = 0, total_ms = 0;
    std::size_t mul_count = 0, rescale_count = 0, rotation_count = 0;
};
std::vector<AblationRow> run_ablation_suite(std::size_t hv_dim, unsigned reps,
                                            std::uint64_t seed);

}  // namespace hehdc::cli
