#include "hehdc/hdc/model_io.hpp"

#include <cstring>
#include <fstream>

#include "hehdc/errors.hpp"

namespace hehdc::hdc {

namespace {

constexpr char kMagic[4] = {'H', 'D', 'C', 'M'};
constexpr std::uint16_t kVersion = 1;

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& is, void* p, std::size_t n) {
    if (!is.read(static_cast<char*>(p), static_cast<std::streamsize>(n)))
        throw DataError("model file truncated");
}

template <typename T>
void put_le(std::ostream& os, T v) {
    unsigned char b[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        b[i] = static_cast<unsigned char>(static_cast<std::uint64_t>(v) >> (8 * i));
    put_bytes(os, b, sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char b[sizeof(T)];
    get_bytes(is, b, sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return static_cast<T>(v);
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    put_le<std::uint64_t>(os, bits);
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_le<std::uint64_t>(is);
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
}

void write_header(std::ostream& os, std::size_t K, std::size_t D, std::size_t L,
                  bool normalized, unsigned bits, std::uint64_t seed, double quant_scale,
                  const std::vector<std::string>& names) {
    put_bytes(os, kMagic, 4);
    put_le<std::uint16_t>(os, kVersion);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(K));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(D));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(L));
    put_le<std::uint8_t>(os, normalized ? 1 : 0);
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(bits));
    put_le<std::uint64_t>(os, seed);
    put_f64(os, quant_scale);
    put_le<std::uint16_t>(os, static_cast<std::uint16_t>(names.size()));
    for (const auto& n : names) {
        put_le<std::uint16_t>(os, static_cast<std::uint16_t>(n.size()));
        put_bytes(os, n.data(), n.size());
    }
}

}  // namespace

void write_model(std::ostream& os, const HdcModel& model) {
    write_header(os, model.input_dim, model.hv_dim, model.num_classes(), model.normalized, 0,
                 model.encoder_seed, 0.0, model.label_names);
    for (const auto& c : model.classes)
        for (double v : c) put_f64(os, v);
}

void write_model(std::ostream& os, const QuantizedModel& qm) {
    write_header(os, qm.input_dim, qm.hv_dim, qm.num_classes(), true, qm.bits, qm.encoder_seed,
                 qm.quant_scale, qm.label_names);
    for (const auto& c : qm.classes_q) {
        for (std::int32_t v : c) {
            if (qm.bits <= 8)
                put_le<std::int8_t>(os, static_cast<std::int8_t>(v));
            else if (qm.bits <= 16)
                put_le<std::int16_t>(os, static_cast<std::int16_t>(v));
            else
                put_le<std::int32_t>(os, v);
        }
    }
}

ModelFile read_model(std::istream& is) {
    char magic[4];
    get_bytes(is, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw DataError("not a model file (bad magic)");
    if (get_le<std::uint16_t>(is) != kVersion) throw DataError("unsupported model version");
    const std::size_t K = get_le<std::uint32_t>(is);
    const std::size_t D = get_le<std::uint32_t>(is);
    const std::size_t L = get_le<std::uint32_t>(is);
    const bool normalized = get_le<std::uint8_t>(is) != 0;
    const unsigned bits = get_le<std::uint8_t>(is);
    const std::uint64_t seed = get_le<std::uint64_t>(is);
    const double quant_scale = get_f64(is);
    std::vector<std::string> names(get_le<std::uint16_t>(is));
    for (auto& n : names) {
        n.resize(get_le<std::uint16_t>(is));
        get_bytes(is, n.data(), n.size());
    }

    ModelFile out;
    if (bits == 0) {
        out.quantized = false;
        out.model.input_dim = K;
        out.model.hv_dim = D;
        out.model.normalized = normalized;
        out.model.encoder_seed = seed;
        out.model.label_names = names;
        out.model.classes.assign(L, std::vector<double>(D));
        for (auto& c : out.model.classes)
            for (auto& v : c) v = get_f64(is);
    } else {
        out.quantized = true;
        out.qmodel.input_dim = K;
        out.qmodel.hv_dim = D;
        out.qmodel.bits = bits;
        out.qmodel.quant_scale = quant_scale;
        out.qmodel.encoder_seed = seed;
        out.qmodel.label_names = names;
        out.qmodel.classes_q.assign(L, std::vector<std::int32_t>(D));
        for (auto& c : out.qmodel.classes_q) {
            for (auto& v : c) {
                if (bits <= 8)
                    v = get_le<std::int8_t>(is);
                else if (bits <= 16)
                    v = get_le<std::int16_t>(is);
                else
                    v = get_le<std::int32_t>(is);
            }
        }
    }
    return out;
}

void save_model(const std::string& path, const HdcModel& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path);
    write_model(os, model);
}

void save_model(const std::string& path, const QuantizedModel& qm) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path);
    write_model(os, qm);
}

ModelFile load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot read " + path);
    return read_model(is);
}

}  // namespace hehdc::hdc
