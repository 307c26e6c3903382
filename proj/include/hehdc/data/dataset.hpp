#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace hehdc::data {

// Row-major float features plus integer labels; every loader produces this
// and every trainer consumes it. Features are pre-scaled to [0, 1].
struct Dataset {
    std::size_t feature_dim = 0;
    std::size_t num_classes = 0;
    std::vector<float> features;
    std::vector<int> labels;

    std::size_t count() const { return labels.size(); }
    const float* sample(std::size_t i) const { return features.data() + i * feature_dim; }
};

Dataset slice(const Dataset& d, std::size_t start, std::size_t count);

// "HDDS" container written by the ingest command.
void write_dataset(std::ostream& os, const Dataset& d);
Dataset read_dataset(std::istream& is);
void save_dataset(const std::string& path, const Dataset& d);
Dataset load_dataset(const std::string& path);

}  // namespace hehdc::data
