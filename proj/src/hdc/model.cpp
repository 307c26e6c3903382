#include "hehdc/hdc/model.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hehdc/errors.hpp"
#include "hehdc/ring/sampling.hpp"

namespace hehdc::hdc {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
    const Eigen::Map<const Eigen::VectorXd> av(a, static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXd> bv(b, static_cast<Eigen::Index>(n));
    return av.dot(bv);
}

double norm(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

}  // namespace

HdcModel train_single_pass(const Eigen::MatrixXd& hvs, const std::vector<int>& labels,
                           std::size_t num_classes, const EncoderParams& enc) {
    if (static_cast<std::size_t>(hvs.rows()) != labels.size())
        throw std::invalid_argument("hypervector/label count mismatch");
    if (num_classes == 0) throw std::invalid_argument("need at least one class");
    HdcModel model;
    model.input_dim = enc.input_dim;
    model.hv_dim = enc.hv_dim;
    model.encoder_seed = enc.seed;
    model.classes.assign(num_classes, std::vector<double>(enc.hv_dim, 0.0));

    std::vector<std::size_t> counts(num_classes, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int l = labels[i];
        if (l < 0 || static_cast<std::size_t>(l) >= num_classes)
            throw std::invalid_argument("label out of range");
        double* c = model.classes[static_cast<std::size_t>(l)].data();
        for (std::size_t j = 0; j < enc.hv_dim; ++j)
            c[j] += hvs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        ++counts[static_cast<std::size_t>(l)];
    }
    for (std::size_t l = 0; l < num_classes; ++l)
        if (counts[l] == 0)
            std::fprintf(stderr, "warning: class %zu received no training samples\n", l);
    return model;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
    const double na = norm(a.data(), a.size());
    const double nb = norm(b.data(), b.size());
    if (na < std::numeric_limits<double>::min() || nb < std::numeric_limits<double>::min())
        throw ZeroNorm("cosine similarity against a zero vector");
    return dot(a.data(), b.data(), a.size()) / (na * nb);
}

std::pair<int, std::vector<double>> classify_plain(const std::vector<double>& hq,
                                                   const HdcModel& model) {
    if (model.classes.empty()) throw std::invalid_argument("empty model");
    std::vector<double> scores(model.num_classes());
    for (std::size_t l = 0; l < model.num_classes(); ++l)
        scores[l] = cosine_similarity(hq, model.classes[l]);
    int best = 0;
    for (std::size_t l = 1; l < scores.size(); ++l)
        if (scores[l] > scores[best]) best = static_cast<int>(l);
    return {best, std::move(scores)};
}

HdcModel iterative_train(HdcModel model, const Eigen::MatrixXd& hvs,
                         const std::vector<int>& labels, const TrainConfig& cfg) {
    if (cfg.learning_rate <= 0) throw std::invalid_argument("learning rate must be positive");
    if (static_cast<std::size_t>(hvs.rows()) != labels.size())
        throw std::invalid_argument("hypervector/label count mismatch");
    const std::size_t n = labels.size();
    const std::size_t L = model.num_classes();
    const std::size_t D = model.hv_dim;

    std::vector<double> class_norms(L);
    for (std::size_t l = 0; l < L; ++l) class_norms[l] = norm(model.classes[l].data(), D);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    ring::Prng shuffle_rng(cfg.shuffle_seed);

    for (unsigned epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_below(i)]);
        for (const std::size_t idx : order) {
            // Rows of a column-major matrix are strided; work on a copy.
            const Eigen::VectorXd row = hvs.row(static_cast<Eigen::Index>(idx));
            const double* hq = row.data();
            const double hq_norm = norm(hq, D);

            int pred = 0;
            double best = -std::numeric_limits<double>::infinity();
            std::vector<double> dots(L);
            for (std::size_t l = 0; l < L; ++l) {
                dots[l] = dot(hq, model.classes[l].data(), D);
                const double denom = hq_norm * class_norms[l];
                const double score = denom > 0 ? dots[l] / denom : 0.0;
                if (score > best) {
                    best = score;
                    pred = static_cast<int>(l);
                }
            }
            const int truth = labels[idx];
            if (pred == truth) continue;

            const auto update = [&](std::size_t l, double sign) {
                const double denom = hq_norm * class_norms[l];
                const double delta = denom > 0 ? dots[l] / denom : 0.0;
                const double w = sign * cfg.learning_rate * (1.0 - delta);
                double* c = model.classes[l].data();
                for (std::size_t j = 0; j < D; ++j) c[j] += w * hq[j];
                class_norms[l] = norm(c, D);
            };
            update(static_cast<std::size_t>(truth), +1.0);
            update(static_cast<std::size_t>(pred), -1.0);
        }
    }
    model.normalized = false;
    return model;
}

HdcModel normalize_model(const HdcModel& model) {
    HdcModel out = model;
    for (auto& c : out.classes) {
        const double n = norm(c.data(), c.size());
        if (n < std::numeric_limits<double>::min())
            throw ZeroNorm("cannot normalize a zero class hypervector");
        for (auto& v : c) v /= n;
    }
    out.normalized = true;
    return out;
}

double evaluate_accuracy(const HdcModel& model, const Eigen::MatrixXd& hvs,
                         const std::vector<int>& labels) {
    if (labels.empty()) throw std::invalid_argument("empty dataset");
    if (static_cast<std::size_t>(hvs.rows()) != labels.size())
        throw std::invalid_argument("hypervector/label count mismatch");
    std::size_t hits = 0;
    std::vector<double> hq(model.hv_dim);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = 0; j < model.hv_dim; ++j)
            hq[j] = hvs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (classify_plain(hq, model).first == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

int classify_dot(const HdcModel& model, const double* hv) {
    int best = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < model.num_classes(); ++l) {
        const double s = dot(hv, model.classes[l].data(), model.hv_dim);
        if (s > top) {
            top = s;
            best = static_cast<int>(l);
        }
    }
    return best;
}

}  // namespace hehdc::hdc
