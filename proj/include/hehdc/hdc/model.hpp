#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hehdc/hdc/encoder.hpp"

namespace hehdc::hdc {

struct HdcModel {
    std::size_t input_dim = 0;
    std::size_t hv_dim = 0;
    bool normalized = false;
    std::uint64_t encoder_seed = 0;
    std::vector<std::vector<double>> classes;
    std::vector<std::string> label_names;  // optional

    std::size_t num_classes() const { return classes.size(); }
};

struct TrainConfig {
    double learning_rate = 0.035;
    unsigned epochs = 20;
    std::uint64_t shuffle_seed = 1;
};

// Class accumulation over pre-encoded hypervectors (row i = sample i).
// A class with no samples stays the zero vector and prints a warning.
HdcModel train_single_pass(const Eigen::MatrixXd& hvs, const std::vector<int>& labels,
                           std::size_t num_classes, const EncoderParams& enc);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Returns (label, per-class cosine scores); ties go to the lowest index.
std::pair<int, std::vector<double>> classify_plain(const std::vector<double>& hq,
                                                   const HdcModel& model);

// Mispredicted queries pull the true class toward them and push the
// predicted class away, each weighted by (1 - cosine); correct predictions
// leave the model untouched. Sample order reshuffles every epoch.
HdcModel iterative_train(HdcModel model, const Eigen::MatrixXd& hvs,
                         const std::vector<int>& labels, const TrainConfig& cfg);

HdcModel normalize_model(const HdcModel& model);

double evaluate_accuracy(const HdcModel& model, const Eigen::MatrixXd& hvs,
                         const std::vector<int>& labels);

// Argmax over raw dot products, skipping both norms; decision-equivalent to
// classify_plain on a normalized model and matches what the server computes.
int classify_dot(const HdcModel& model, const double* hv);

}  // namespace hehdc::hdc
