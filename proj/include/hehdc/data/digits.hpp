#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hehdc/data/dataset.hpp"

namespace hehdc::data {

// The 8x8 handwritten-digit bundle shipped in data/digits1797.bin; the
// offline stand-in when no MNIST IDX files are present.
struct DigitsBundle {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count x rows*cols, values 0..16
    std::vector<int> labels;

    std::size_t count() const { return labels.size(); }
};

DigitsBundle load_digits_bundle(const std::string& path);

// Expands base digits into out_count jittered out_side x out_side samples.
// Sample i reuses base index base_start + i % base_count and draws its
// rotation/scale/shift/noise from a stream seeded by (seed, i), so the
// result is reproducible element for element.
Dataset augment_digits(const DigitsBundle& bundle, std::size_t base_start,
                       std::size_t base_count, std::size_t out_count,
                       std::size_t out_side, std::uint64_t seed);

// Train/test pair at the desk-scale sizes. Prefers MNIST IDX files under
// data_dir when all four are present; otherwise augments the bundle with
// disjoint base digits for the two splits.
struct DeskData {
    Dataset train;
    Dataset test;
    std::string source;  // "mnist-idx" or "digits-augmented"
};

DeskData load_desk_data(const std::string& data_dir, const std::string& bundle_path,
                        std::size_t train_count, std::size_t test_count);

}  // namespace hehdc::data
