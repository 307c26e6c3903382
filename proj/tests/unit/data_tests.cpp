#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hehdc/data/dataset.hpp"
#include "hehdc/data/digits.hpp"
#include "hehdc/data/idx.hpp"
#include "hehdc/data/synth.hpp"
#include "hehdc/errors.hpp"

using namespace hehdc;
using namespace hehdc::data;

namespace {

void put_be32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / "hehdc_data_test";
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

void write_idx_pair(const std::filesystem::path& dir, const std::string& prefix,
                    const std::vector<std::uint8_t>& pixels, std::size_t rows, std::size_t cols,
                    const std::vector<std::uint8_t>& labels) {
    std::ofstream imgs(dir / (prefix + "-images-idx3-ubyte"), std::ios::binary);
    put_be32(imgs, 0x00000803);
    put_be32(imgs, static_cast<std::uint32_t>(labels.size()));
    put_be32(imgs, static_cast<std::uint32_t>(rows));
    put_be32(imgs, static_cast<std::uint32_t>(cols));
    imgs.write(reinterpret_cast<const char*>(pixels.data()),
               static_cast<std::streamsize>(pixels.size()));
    std::ofstream labs(dir / (prefix + "-labels-idx1-ubyte"), std::ios::binary);
    put_be32(labs, 0x00000801);
    put_be32(labs, static_cast<std::uint32_t>(labels.size()));
    labs.write(reinterpret_cast<const char*>(labels.data()),
               static_cast<std::streamsize>(labels.size()));
}

}  // namespace

TEST_CASE("dataset container roundtrips through its file format") {
    Dataset d;
    d.feature_dim = 3;
    d.num_classes = 2;
    d.features = {0.1f, 0.2f, 0.3f, 0.9f, 0.8f, 0.7f};
    d.labels = {0, 1};

    std::stringstream ss;
    write_dataset(ss, d);
    const Dataset back = read_dataset(ss);
    CHECK(back.feature_dim == 3);
    CHECK(back.num_classes == 2);
    CHECK(back.features == d.features);
    CHECK(back.labels == d.labels);

    std::stringstream bad("nope");
    CHECK_THROWS_AS(read_dataset(bad), DataError);
}

TEST_CASE("dataset slices keep rows aligned with labels") {
    Dataset d;
    d.feature_dim = 2;
    d.num_classes = 3;
    for (int i = 0; i < 5; ++i) {
        d.features.push_back(static_cast<float>(i));
        d.features.push_back(static_cast<float>(10 * i));
        d.labels.push_back(i % 3);
    }
    const Dataset s = slice(d, 1, 3);
    CHECK(s.count() == 3);
    CHECK(s.features[0] == 1.0f);
    CHECK(s.features[1] == 10.0f);
    CHECK(s.labels == std::vector<int>{1, 2, 0});
    CHECK_THROWS_AS(slice(d, 4, 3), DataError);
}

TEST_CASE("idx files parse with scaling and reject corruption") {
    TempDir tmp;
    const std::vector<std::uint8_t> pixels = {0, 255, 128, 64, 32, 16, 8, 255};
    const std::vector<std::uint8_t> labels = {3, 7};
    write_idx_pair(tmp.path, "train", pixels, 2, 2, labels);

    const Dataset d = load_mnist_pair((tmp.path / "train-images-idx3-ubyte").string(),
                                      (tmp.path / "train-labels-idx1-ubyte").string());
    CHECK(d.count() == 2);
    CHECK(d.feature_dim == 4);
    CHECK(d.labels == std::vector<int>{3, 7});
    CHECK(d.features[0] == 0.0f);
    CHECK(d.features[1] == 1.0f);
    CHECK(d.features[2] == doctest::Approx(128.0 / 255.0));

    // Image magic on a label file and vice versa.
    CHECK_THROWS_AS(load_mnist_pair((tmp.path / "train-labels-idx1-ubyte").string(),
                                    (tmp.path / "train-images-idx3-ubyte").string()),
                    DataError);

    // Truncated payload.
    {
        std::ofstream bad(tmp.path / "t10k-images-idx3-ubyte", std::ios::binary);
        put_be32(bad, 0x00000803);
        put_be32(bad, 10);
        put_be32(bad, 2);
        put_be32(bad, 2);
        bad.write("xy", 2);
    }
    write_idx_pair(tmp.path, "short", {1, 2, 3, 4}, 2, 2, {1});
    CHECK_THROWS_AS(load_mnist_pair((tmp.path / "t10k-images-idx3-ubyte").string(),
                                    (tmp.path / "short-labels-idx1-ubyte").string()),
                    DataError);

    // Image/label count mismatch.
    write_idx_pair(tmp.path, "mism", pixels, 2, 2, labels);
    write_idx_pair(tmp.path, "one", {9, 9, 9, 9}, 2, 2, {1});
    CHECK_THROWS_AS(load_mnist_pair((tmp.path / "mism-images-idx3-ubyte").string(),
                                    (tmp.path / "one-labels-idx1-ubyte").string()),
                    DataError);
}

TEST_CASE("synthetic blobs are deterministic and separable") {
    const Dataset a = make_blobs(3, 16, 50, 77);
    const Dataset b = make_blobs(3, 16, 50, 77);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(a.count() == 150);
    CHECK(a.labels[0] == 0);
    CHECK(a.labels[1] == 1);
    CHECK(a.labels[2] == 2);

    const Dataset c = make_blobs(3, 16, 50, 78);
    CHECK(a.features != c.features);

    // Class means should sit far apart relative to the unit noise.
    std::vector<std::vector<double>> means(3, std::vector<double>(16, 0.0));
    std::vector<int> counts(3, 0);
    for (std::size_t i = 0; i < a.count(); ++i) {
        for (std::size_t j = 0; j < 16; ++j) means[a.labels[i]][j] += a.sample(i)[j];
        ++counts[a.labels[i]];
    }
    for (int l = 0; l < 3; ++l)
        for (auto& v : means[l]) v /= counts[l];
    for (int l = 0; l < 3; ++l)
        for (int m = l + 1; m < 3; ++m) {
            double d2 = 0;
            for (std::size_t j = 0; j < 16; ++j) {
                const double diff = means[l][j] - means[m][j];
                d2 += diff * diff;
            }
            CHECK(std::sqrt(d2) > 8.0);  // vs unit in-class sigma
        }
}

TEST_CASE("digits bundle loads and augments deterministically") {
    const DigitsBundle b = load_digits_bundle("data/digits1797.bin");
    CHECK(b.count() == 1797);
    CHECK(b.rows == 8);
    CHECK(b.cols == 8);
    int min_label = 99, max_label = -1;
    for (int l : b.labels) {
        min_label = std::min(min_label, l);
        max_label = std::max(max_label, l);
    }
    CHECK(min_label == 0);
    CHECK(max_label == 9);
    for (auto p : b.pixels) CHECK(p <= 16);

    const Dataset x = augment_digits(b, 0, 100, 250, 28, 5);
    const Dataset y = augment_digits(b, 0, 100, 250, 28, 5);
    CHECK(x.features == y.features);
    CHECK(x.labels == y.labels);
    CHECK(x.feature_dim == 784);
    CHECK(x.count() == 250);
    CHECK(x.labels[7] == b.labels[7]);
    CHECK(x.labels[107] == b.labels[7]);  // round-robin over 100 bases
    for (float v : x.features) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    const Dataset z = augment_digits(b, 0, 100, 250, 28, 6);
    CHECK(x.features != z.features);
    CHECK_THROWS_AS(augment_digits(b, 1700, 200, 10, 28, 1), DataError);
}

TEST_CASE("desk data falls back to augmented digits and honors idx files") {
    const DeskData fallback = load_desk_data("", "data/digits1797.bin", 600, 120);
    CHECK(fallback.source == "digits-augmented");
    CHECK(fallback.train.count() == 600);
    CHECK(fallback.test.count() == 120);
    CHECK(fallback.train.feature_dim == 784);

    TempDir tmp;
    CHECK_FALSE(mnist_available(tmp.path.string()));
    std::vector<std::uint8_t> pix(4 * 4);
    for (std::size_t i = 0; i < pix.size(); ++i) pix[i] = static_cast<std::uint8_t>(16 * i);
    write_idx_pair(tmp.path, "train", pix, 2, 2, {0, 1, 2, 3});
    write_idx_pair(tmp.path, "t10k", pix, 2, 2, {3, 2, 1, 0});
    CHECK(mnist_available(tmp.path.string()));
    const DeskData real = load_desk_data(tmp.path.string(), "data/digits1797.bin", 3, 2);
    CHECK(real.source == "mnist-idx");
    CHECK(real.train.count() == 3);
    CHECK(real.test.count() == 2);
    CHECK(real.test.labels == std::vector<int>{3, 2});
}
