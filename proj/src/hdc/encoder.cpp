#include "hehdc/hdc/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "hehdc/ring/sampling.hpp"

namespace hehdc::hdc {

EncoderParams make_encoder(std::size_t input_dim, std::size_t hv_dim, std::uint64_t seed) {
    if (input_dim == 0 || hv_dim == 0) throw std::invalid_argument("encoder dims must be positive");
    EncoderParams enc;
    enc.input_dim = input_dim;
    enc.hv_dim = hv_dim;
    enc.seed = seed;
    enc.projection.resize(static_cast<Eigen::Index>(hv_dim), static_cast<Eigen::Index>(input_dim));
    enc.offset.resize(static_cast<Eigen::Index>(hv_dim));
    ring::Prng rng(seed);
    // Row-major fill order is part of the encoder identity; do not reorder.
    for (std::size_t d = 0; d < hv_dim; ++d)
        for (std::size_t k = 0; k < input_dim; ++k)
            enc.projection(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) =
                rng.next_gaussian();
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    for (std::size_t d = 0; d < hv_dim; ++d)
        enc.offset(static_cast<Eigen::Index>(d)) = kTwoPi * rng.next_double();
    return enc;
}

std::uint64_t encoder_hash(const EncoderParams& enc) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    const auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(enc.input_dim);
    mix(enc.hv_dim);
    mix(enc.seed);
    const auto mix_double = [&](double d) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(d));
        std::memcpy(&bits, &d, sizeof(bits));
        mix(bits);
    };
    const std::size_t probe = std::min<std::size_t>(8, enc.hv_dim);
    for (std::size_t i = 0; i < probe; ++i) {
        mix_double(enc.projection(static_cast<Eigen::Index>(i), 0));
        mix_double(enc.offset(static_cast<Eigen::Index>(i)));
    }
    return h;
}

std::vector<double> encode_sample(const std::vector<double>& x, const EncoderParams& enc) {
    if (x.size() != enc.input_dim) throw std::invalid_argument("input length mismatch");
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const double nrm = xv.norm();
    const Eigen::VectorXd t = nrm > 0 ? Eigen::VectorXd(enc.projection * (xv / nrm))
                                      : Eigen::VectorXd(enc.projection * xv);
    std::vector<double> h(enc.hv_dim);
    for (std::size_t i = 0; i < enc.hv_dim; ++i) {
        const double ti = t(static_cast<Eigen::Index>(i));
        h[i] = std::cos(ti + enc.offset(static_cast<Eigen::Index>(i))) * std::sin(ti);
    }
    return h;
}

std::vector<double> encode_sample(const float* x, std::size_t len, const EncoderParams& enc) {
    std::vector<double> xd(x, x + len);
    return encode_sample(xd, enc);
}

Eigen::MatrixXd encode_batch(const float* samples, std::size_t count, std::size_t input_dim,
                             const EncoderParams& enc) {
    if (input_dim != enc.input_dim) throw std::invalid_argument("input length mismatch");
    const Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        xs(samples, static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(input_dim));
    Eigen::MatrixXd xd = xs.cast<double>();
    for (Eigen::Index i = 0; i < xd.rows(); ++i) {
        const double nrm = xd.row(i).norm();
        if (nrm > 0) xd.row(i) /= nrm;
    }
    Eigen::MatrixXd t = xd * enc.projection.transpose();  // count x hv_dim
    Eigen::MatrixXd h =
        (t.array().rowwise() + enc.offset.transpose().array()).cos() * t.array().sin();
    return h;
}

}  // namespace hehdc::hdc
