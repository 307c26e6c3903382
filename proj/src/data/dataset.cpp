#include "hehdc/data/dataset.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hehdc/errors.hpp"

namespace hehdc::data {

namespace {

constexpr char kMagic[4] = {'H', 'D', 'D', 'S'};
constexpr std::uint16_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw DataError("dataset file truncated");
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}

}  // namespace

Dataset slice(const Dataset& d, std::size_t start, std::size_t count) {
    if (start + count > d.count()) throw DataError("slice past end of dataset");
    Dataset out;
    out.feature_dim = d.feature_dim;
    out.num_classes = d.num_classes;
    out.features.assign(d.features.begin() + start * d.feature_dim,
                        d.features.begin() + (start + count) * d.feature_dim);
    out.labels.assign(d.labels.begin() + start, d.labels.begin() + start + count);
    return out;
}

void write_dataset(std::ostream& os, const Dataset& d) {
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(d.feature_dim));
    put_u32(os, static_cast<std::uint32_t>(d.count()));
    put_u32(os, static_cast<std::uint32_t>(d.num_classes));
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(d.features.data()),
             static_cast<std::streamsize>(d.features.size() * sizeof(float)));
    for (int label : d.labels) put_u32(os, static_cast<std::uint32_t>(label));
}

Dataset read_dataset(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("not a dataset file (bad magic)");
    if (get_u32(is) != kVersion) throw DataError("unsupported dataset version");
    Dataset d;
    d.feature_dim = get_u32(is);
    const std::size_t count = get_u32(is);
    d.num_classes = get_u32(is);
    d.features.resize(count * d.feature_dim);
    if (!is.read(reinterpret_cast<char*>(d.features.data()),
                 static_cast<std::streamsize>(d.features.size() * sizeof(float))))
        throw DataError("dataset file truncated");
    d.labels.resize(count);
    for (auto& label : d.labels) label = static_cast<int>(get_u32(is));
    return d;
}

void save_dataset(const std::string& path, const Dataset& d) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path);
    write_dataset(os, d);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot read " + path);
    return read_dataset(is);
}

}  // namespace hehdc::data
