#include "hehdc/hdc/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hehdc/errors.hpp"
#include "hehdc/ring/rns_poly.hpp"

namespace hehdc::hdc {

QuantizedModel quantize_model(const HdcModel& model, unsigned bits) {
    if (bits < 2) throw ParamError("quantization below 2 bits loses the sign structure");
    if (bits > 32) throw ParamError("quantization above 32 bits is not represented");
    if (!model.normalized)
        throw std::invalid_argument("quantize_model expects a normalized model");

    double max_abs = 0.0;
    for (const auto& c : model.classes)
        for (double v : c) max_abs = std::max(max_abs, std::fabs(v));
    if (max_abs == 0.0) throw ZeroNorm("cannot quantize an all-zero model");

    QuantizedModel qm;
    qm.input_dim = model.input_dim;
    qm.hv_dim = model.hv_dim;
    qm.bits = bits;
    qm.encoder_seed = model.encoder_seed;
    qm.label_names = model.label_names;
    const double qmax = static_cast<double>((1u << (bits - 1)) - 1);
    qm.quant_scale = max_abs / qmax;
    qm.classes_q.reserve(model.num_classes());
    for (const auto& c : model.classes) {
        std::vector<std::int32_t> q(c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            q[i] = static_cast<std::int32_t>(std::llround(c[i] / qm.quant_scale));
        qm.classes_q.push_back(std::move(q));
    }
    return qm;
}

HdcModel dequantize_model(const QuantizedModel& qm) {
    HdcModel model;
    model.input_dim = qm.input_dim;
    model.hv_dim = qm.hv_dim;
    model.encoder_seed = qm.encoder_seed;
    model.label_names = qm.label_names;
    model.normalized = true;
    model.classes.reserve(qm.num_classes());
    for (const auto& q : qm.classes_q) {
        std::vector<double> c(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) c[i] = q[i] * qm.quant_scale;
        model.classes.push_back(std::move(c));
    }
    return model;
}

unsigned class_scale_log2(unsigned first_prime_bits, unsigned query_scale_log2,
                          std::size_t hv_dim) {
    unsigned dim_bits = 0;
    while ((std::size_t{1} << dim_bits) < hv_dim) ++dim_bits;
    const unsigned score_headroom = (dim_bits + 1) / 2 + 1;
    const int avail = static_cast<int>(first_prime_bits) - 1 -
                      static_cast<int>(query_scale_log2) - static_cast<int>(score_headroom);
    const int dc = std::min(static_cast<int>(query_scale_log2), avail);
    return static_cast<unsigned>(std::max(1, dc));
}

int simulate_fixed_point_query(const QuantizedModel& qm, const double* hv, unsigned delta_log2,
                               unsigned dc_log2, std::uint64_t q0) {
    const double delta = std::ldexp(1.0, static_cast<int>(delta_log2));
    const double dc = std::ldexp(1.0, static_cast<int>(dc_log2));
    const std::size_t D = qm.hv_dim;

    std::vector<std::int64_t> qfix(D);
    for (std::size_t i = 0; i < D; ++i) qfix[i] = std::llround(hv[i] * delta);

    int best = 0;
    __int128 top = 0;
    bool first = true;
    const auto half = static_cast<__int128>(q0 / 2);
    const auto q = static_cast<__int128>(q0);
    for (std::size_t l = 0; l < qm.num_classes(); ++l) {
        const std::int32_t* cq = qm.classes_q[l].data();
        __int128 acc = 0;
        for (std::size_t i = 0; i < D; ++i) {
            const auto cfix =
                static_cast<std::int64_t>(std::llround(cq[i] * qm.quant_scale * dc));
            acc += static_cast<__int128>(qfix[i]) * cfix;
        }
        __int128 r = acc % q;
        if (r < 0) r += q;
        if (r > half) r -= q;
        if (first || r > top) {
            top = r;
            best = static_cast<int>(l);
            first = false;
        }
    }
    return best;
}

unsigned scale_search(const QuantizedModel& qm, const Eigen::MatrixXd& val_hvs,
                      const std::vector<int>& val_labels, const ckks::CkksParams& params,
                      const std::vector<unsigned>& scale_grid) {
    if (scale_grid.empty()) throw std::invalid_argument("empty scale grid");
    if (val_labels.empty()) throw std::invalid_argument("empty validation split");
    const std::uint64_t q0 = ring::find_chain_primes(params.log2n, params.prime_bits)[0];

    unsigned best_scale = 0;
    std::size_t best_hits = 0;
    bool first = true;
    for (const unsigned delta : scale_grid) {
        // A unit-magnitude slot needs headroom under the first prime or the
        // encoder refuses it outright.
        if (delta + 1 >= params.prime_bits[0]) continue;
        const unsigned dc = class_scale_log2(params.prime_bits[0], delta, qm.hv_dim);
        std::size_t hits = 0;
        Eigen::VectorXd row(static_cast<Eigen::Index>(qm.hv_dim));
        for (std::size_t i = 0; i < val_labels.size(); ++i) {
            row = val_hvs.row(static_cast<Eigen::Index>(i));
            if (simulate_fixed_point_query(qm, row.data(), delta, dc, q0) == val_labels[i])
                ++hits;
        }
        if (first || hits > best_hits || (hits == best_hits && delta > best_scale)) {
            best_hits = hits;
            best_scale = delta;
            first = false;
        }
    }
    if (first) throw ParamError("no scale candidate fits under the first chain prime");
    return best_scale;
}

}  // namespace hehdc::hdc
