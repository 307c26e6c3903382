#include "hehdc/data/idx.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "hehdc/errors.hpp"

namespace hehdc::data {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t get_be32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw DataError(path + ": truncated header");
    return std::uint32_t(b[0]) << 24 | std::uint32_t(b[1]) << 16 | std::uint32_t(b[2]) << 8 |
           std::uint32_t(b[3]);
}

std::vector<std::uint8_t> read_payload(std::istream& is, std::size_t n, const std::string& path) {
    std::vector<std::uint8_t> buf(n);
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n)))
        throw DataError(path + ": truncated payload");
    return buf;
}

}  // namespace

Dataset load_mnist_pair(const std::string& images_path, const std::string& labels_path) {
    std::ifstream imgs(images_path, std::ios::binary);
    if (!imgs) throw DataError("cannot read " + images_path);
    if (get_be32(imgs, images_path) != kImageMagic)
        throw DataError(images_path + ": bad magic, expected an IDX image file");
    const std::size_t count = get_be32(imgs, images_path);
    const std::size_t rows = get_be32(imgs, images_path);
    const std::size_t cols = get_be32(imgs, images_path);
    const auto pixels = read_payload(imgs, count * rows * cols, images_path);

    std::ifstream labs(labels_path, std::ios::binary);
    if (!labs) throw DataError("cannot read " + labels_path);
    if (get_be32(labs, labels_path) != kLabelMagic)
        throw DataError(labels_path + ": bad magic, expected an IDX label file");
    if (get_be32(labs, labels_path) != count)
        throw DataError(labels_path + ": label count differs from image count");
    const auto labels = read_payload(labs, count, labels_path);

    Dataset d;
    d.feature_dim = rows * cols;
    d.num_classes = 10;
    d.features.resize(count * d.feature_dim);
    for (std::size_t i = 0; i < pixels.size(); ++i)
        d.features[i] = static_cast<float>(pixels[i]) / 255.0f;
    d.labels.assign(labels.begin(), labels.end());
    return d;
}

bool mnist_available(const std::string& dir) {
    namespace fs = std::filesystem;
    for (const char* name : {"train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                             "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"}) {
        if (!fs::exists(fs::path(dir) / name)) return false;
    }
    return true;
}

Dataset load_mnist_split(const std::string& dir, bool train) {
    namespace fs = std::filesystem;
    const std::string prefix = train ? "train" : "t10k";
    return load_mnist_pair((fs::path(dir) / (prefix + "-images-idx3-ubyte")).string(),
                           (fs::path(dir) / (prefix + "-labels-idx1-ubyte")).string());
}

}  // namespace hehdc::data
