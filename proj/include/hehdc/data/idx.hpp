#pragma once

#include <string>

#include "hehdc/data/dataset.hpp"

namespace hehdc::data {

// IDX files as distributed for MNIST: big-endian headers, u8 payloads.
// Image magic 0x00000803, label magic 0x00000801. Pixels scale to [0, 1].
Dataset load_mnist_pair(const std::string& images_path, const std::string& labels_path);

// True when the four standard MNIST file names exist under dir.
bool mnist_available(const std::string& dir);

// train=true loads train-*, otherwise t10k-*.
Dataset load_mnist_split(const std::string& dir, bool train);

}  // namespace hehdc::data
