#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hehdc/ckks/params.hpp"
#include "hehdc/hdc/model.hpp"

namespace hehdc::hdc {

// Symmetric max-abs quantization of a normalized model; one shared scale.
struct QuantizedModel {
    std::size_t input_dim = 0;
    std::size_t hv_dim = 0;
    unsigned bits = 16;
    double quant_scale = 0.0;
    std::uint64_t encoder_seed = 0;
    std::vector<std::vector<std::int32_t>> classes_q;
    std::vector<std::string> label_names;

    std::size_t num_classes() const { return classes_q.size(); }
};

QuantizedModel quantize_model(const HdcModel& model, unsigned bits);

// Inverse map; the result stays decision-equivalent to the source within
// half a quantization step per element.
HdcModel dequantize_model(const QuantizedModel& qm);

// Scale for the server-side class plaintexts given the query scale. Keeps
// log2(query) + log2(class) + log2(max |score|) one bit under the first
// prime so a depth-1 multiply plus the slot reduction cannot wrap; |score|
// is bounded by sqrt(D) for unit-norm classes and [-1,1] query entries.
unsigned class_scale_log2(unsigned first_prime_bits, unsigned query_scale_log2,
                          std::size_t hv_dim);

// Fixed-point mirror of one encrypted similarity query: both sides rounded
// at their scales, exact integer dot product, centered wrap modulo the
// first chain prime. Returns the argmax label.
int simulate_fixed_point_query(const QuantizedModel& qm, const double* hv, unsigned delta_log2,
                               unsigned dc_log2, std::uint64_t q0);

// Picks the query scale whose simulated accuracy on the validation split is
// highest; ties resolve toward the larger scale.
unsigned scale_search(const QuantizedModel& qm, const Eigen::MatrixXd& val_hvs,
                      const std::vector<int>& val_labels, const ckks::CkksParams& params,
                      const std::vector<unsigned>& scale_grid);

}  // namespace hehdc::hdc
