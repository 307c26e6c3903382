#include "hehdc/data/digits.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "hehdc/data/idx.hpp"
#include "hehdc/errors.hpp"
#include "hehdc/ring/sampling.hpp"

namespace hehdc::data {

DigitsBundle load_digits_bundle(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot read " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "HDIG", 4) != 0)
        throw DataError(path + ": bad magic, expected a digits bundle");
    const auto get_u32 = [&]() -> std::uint32_t {
        unsigned char b[4];
        if (!is.read(reinterpret_cast<char*>(b), 4)) throw DataError(path + ": truncated");
        return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
               std::uint32_t(b[3]) << 24;
    };
    const std::size_t count = get_u32();
    const std::size_t feat = get_u32();
    DigitsBundle b;
    b.rows = get_u32();
    b.cols = get_u32();
    if (b.rows * b.cols != feat) throw DataError(path + ": inconsistent shape");
    b.pixels.resize(count * feat);
    if (!is.read(reinterpret_cast<char*>(b.pixels.data()),
                 static_cast<std::streamsize>(b.pixels.size())))
        throw DataError(path + ": truncated pixels");
    std::vector<std::uint8_t> raw(count);
    if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count)))
        throw DataError(path + ": truncated labels");
    b.labels.assign(raw.begin(), raw.end());
    return b;
}

namespace {

// Bilinear lookup with zero background outside the base image.
double sample_base(const std::uint8_t* img, std::size_t rows, std::size_t cols, double y,
                   double x) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const double wx = x - fx;
    const double wy = y - fy;
    double acc = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
        const long ry = static_cast<long>(fy) + dy;
        if (ry < 0 || ry >= static_cast<long>(rows)) continue;
        for (int dx = 0; dx <= 1; ++dx) {
            const long rx = static_cast<long>(fx) + dx;
            if (rx < 0 || rx >= static_cast<long>(cols)) continue;
            const double w = (dx ? wx : 1.0 - wx) * (dy ? wy : 1.0 - wy);
            acc += w * img[ry * cols + rx];
        }
    }
    return acc / 16.0;
}

}  // namespace

Dataset augment_digits(const DigitsBundle& bundle, std::size_t base_start,
                       std::size_t base_count, std::size_t out_count, std::size_t out_side,
                       std::uint64_t seed) {
    if (base_start + base_count > bundle.count() || base_count == 0)
        throw DataError("augment range outside the bundle");
    Dataset d;
    d.feature_dim = out_side * out_side;
    d.num_classes = 10;
    d.features.resize(out_count * d.feature_dim);
    d.labels.resize(out_count);

    const double out_center = (static_cast<double>(out_side) - 1.0) / 2.0;
    const double base_center_y = (static_cast<double>(bundle.rows) - 1.0) / 2.0;
    const double base_center_x = (static_cast<double>(bundle.cols) - 1.0) / 2.0;
    const double upscale = static_cast<double>(out_side) / static_cast<double>(bundle.rows);

    for (std::size_t i = 0; i < out_count; ++i) {
        const std::size_t base = base_start + i % base_count;
        const std::uint8_t* img = bundle.pixels.data() + base * bundle.rows * bundle.cols;
        d.labels[i] = bundle.labels[base];

        ring::Prng rng(ring::derive_seed(seed, i));
        const double theta = (2.0 * rng.next_double() - 1.0) * 0.0873;  // +-5 degrees
        const double scale = 1.0 + (2.0 * rng.next_double() - 1.0) * 0.05;
        const double tx = (2.0 * rng.next_double() - 1.0) * 0.4;  // base-pixel units
        const double ty = (2.0 * rng.next_double() - 1.0) * 0.4;
        const double c = std::cos(theta), s = std::sin(theta);

        float* out = d.features.data() + i * d.feature_dim;
        for (std::size_t r = 0; r < out_side; ++r) {
            const double dy = (static_cast<double>(r) - out_center) / (upscale * scale);
            for (std::size_t col = 0; col < out_side; ++col) {
                const double dx = (static_cast<double>(col) - out_center) / (upscale * scale);
                const double by = -s * dx + c * dy + base_center_y + ty;
                const double bx = c * dx + s * dy + base_center_x + tx;
                double v = sample_base(img, bundle.rows, bundle.cols, by, bx);
                v += 0.01 * rng.next_gaussian();
                out[r * out_side + col] = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
        }
    }
    return d;
}

DeskData load_desk_data(const std::string& data_dir, const std::string& bundle_path,
                        std::size_t train_count, std::size_t test_count) {
    DeskData out;
    if (!data_dir.empty() && mnist_available(data_dir)) {
        Dataset train = load_mnist_split(data_dir, true);
        Dataset test = load_mnist_split(data_dir, false);
        out.train = slice(train, 0, std::min(train_count, train.count()));
        out.test = slice(test, 0, std::min(test_count, test.count()));
        out.source = "mnist-idx";
        return out;
    }
    const DigitsBundle bundle = load_digits_bundle(bundle_path);
    // Every 6th base digit feeds the test split, the rest feed training.
    // Strided selection keeps writing styles mixed evenly across the two
    // splits while the underlying strokes stay disjoint; a contiguous tail
    // split would concentrate one stylistic block in the test set.
    const std::size_t feat = bundle.rows * bundle.cols;
    DigitsBundle train_b, test_b;
    train_b.rows = test_b.rows = bundle.rows;
    train_b.cols = test_b.cols = bundle.cols;
    for (std::size_t i = 0; i < bundle.count(); ++i) {
        DigitsBundle& dst = (i % 6 == 5) ? test_b : train_b;
        dst.pixels.insert(dst.pixels.end(), bundle.pixels.begin() + i * feat,
                          bundle.pixels.begin() + (i + 1) * feat);
        dst.labels.push_back(bundle.labels[i]);
    }
    out.train = augment_digits(train_b, 0, train_b.count(), train_count, 28, 1001);
    out.test = augment_digits(test_b, 0, test_b.count(), test_count, 28, 1002);
    out.source = "digits-augmented";
    return out;
}

}  // namespace hehdc::data
