#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace hehdc::hdc {

// Random-projection encoder: H = cos(Bx + b) .* sin(Bx), applied to the
// L2-normalized input so the projection kernel's bandwidth is independent
// of the raw feature scale (zero inputs pass through untouched). B and b
// regenerate bit for bit from the seed, so only (dims, seed) need to travel.
struct EncoderParams {
    std::size_t input_dim = 0;
    std::size_t hv_dim = 0;
    std::uint64_t seed = 0;
    Eigen::MatrixXd projection;  // hv_dim x input_dim, standard normal
    Eigen::VectorXd offset;      // hv_dim, uniform [0, 2*pi)
};

EncoderParams make_encoder(std::size_t input_dim, std::size_t hv_dim, std::uint64_t seed);

// Identity hash covering dims, seed and a slice of the generated tables;
// two hosts that disagree on generation disagree on the hash.
std::uint64_t encoder_hash(const EncoderParams& enc);

std::vector<double> encode_sample(const std::vector<double>& x, const EncoderParams& enc);
std::vector<double> encode_sample(const float* x, std::size_t len, const EncoderParams& enc);

// Row i holds the hypervector of sample i.
Eigen::MatrixXd encode_batch(const float* samples, std::size_t count, std::size_t input_dim,
                             const EncoderParams& enc);

}  // namespace hehdc::hdc
