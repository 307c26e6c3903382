#include "common.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hehdc/ckks/serialize.hpp"
#include "hehdc/errors.hpp"

namespace hehdc::cli {

int run_mapped(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCryptoParams;
    } catch (const ScaleMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCryptoParams;
    } catch (const MissingGaloisKey& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCryptoParams;
    } catch (const OverflowRisk& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCryptoParams;
    } catch (const NoLevelLeft& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCryptoParams;
    } catch (const ProtocolError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProtocol;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

std::string data_root(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("HEHDC_DATA_DIR"); env && *env) return env;
    return "data";
}

bool standard_dim(std::size_t hv_dim) {
    return hv_dim == 2048 || hv_dim == 4096 || hv_dim == 8192 || hv_dim == 10240;
}

void warn_dim(std::size_t hv_dim) {
    if (standard_dim(hv_dim)) return;
    std::cerr << "warning: dimension " << hv_dim
              << " is outside the usual grid {2048, 4096, 8192, 10240}; proceeding\n";
}

namespace {

constexpr std::uint32_t kKeyMagic = 0x484b4459;  // "HDKY" little-endian bytes YDKH
constexpr std::uint16_t kKeyVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    unsigned char b[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    unsigned char b[sizeof(T)];
    is.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!is) throw ProtocolError("key file truncated");
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void save_keys(const std::string& path, const ckks::CkksContext& ctx, std::uint64_t seed,
               const ckks::KeyMaterial& km) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write key file: " + path);
    const auto& p = ctx.params();
    put<std::uint32_t>(os, kKeyMagic);
    put<std::uint16_t>(os, kKeyVersion);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(p.log2n));
    put<std::uint8_t>(os, static_cast<std::uint8_t>(p.prime_bits.size()));
    for (unsigned w : p.prime_bits) put<std::uint8_t>(os, static_cast<std::uint8_t>(w));
    put<std::uint16_t>(os, static_cast<std::uint16_t>(p.scale_log2));
    put<std::uint64_t>(os, seed);
    ckks::write_secret_key(os, ctx, km.sk);
    ckks::write_galois_keys(os, ctx, km.gks);
    if (!os) throw DataError("short write on key file: " + path);
}

KeyBundle load_keys(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot read key file: " + path);
    if (get<std::uint32_t>(is) != kKeyMagic) throw DataError("not a key file: " + path);
    if (get<std::uint16_t>(is) != kKeyVersion) throw DataError("unsupported key file version");
    KeyBundle kb;
    kb.params.log2n = get<std::uint8_t>(is);
    const unsigned chain = get<std::uint8_t>(is);
    kb.params.prime_bits.clear();
    for (unsigned i = 0; i < chain; ++i) kb.params.prime_bits.push_back(get<std::uint8_t>(is));
    kb.params.scale_log2 = get<std::uint16_t>(is);
    kb.seed = get<std::uint64_t>(is);
    const auto ctx = ckks::CkksContext::create(kb.params);
    kb.sk = ckks::read_secret_key(is, ctx);
    kb.gks = ckks::read_galois_keys(is, ctx);
    return kb;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    if (v.size() % 2) return v[mid];
    return (v[mid - 1] + v[mid]) / 2.0;
}

double median_ms(unsigned reps, const std::function<void()>& prepare,
                 const std::function<void()>& op) {
    using Clock = std::chrono::steady_clock;
    std::vector<double> samples;
    samples.reserve(reps);
    for (unsigned i = 0; i <= reps; ++i) {
        if (prepare) prepare();
        const auto t0 = Clock::now();
        op();
        const auto t1 = Clock::now();
        if (i == 0) continue;  // warmup
        samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return median(std::move(samples));
}

std::string hex_u64(std::uint64_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << v;
    return os.str();
}

TextTable::TextTable(std::vector<std::string> headers) { rows_.push_back(std::move(headers)); }

void TextTable::add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

std::string TextTable::str() const {
    std::vector<std::size_t> width;
    for (const auto& row : rows_) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream os;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        for (std::size_t i = 0; i < rows_[r].size(); ++i) {
            if (i) os << "  ";
            os << rows_[r][i];
            if (i + 1 < rows_[r].size())
                os << std::string(width[i] - rows_[r][i].size(), ' ');
        }
        os << "\n";
        if (r == 0) {
            std::size_t total = 0;
            for (std::size_t i = 0; i < width.size(); ++i) total += width[i] + (i ? 2 : 0);
            os << std::string(total, '-') << "\n";
        }
    }
    return os.str();
}

std::string TextTable::csv() const {
    std::ostringstream os;
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            os << row[i];
        }
        os << "\n";
    }
    return os.str();
}

std::string fmt_ms(double ms) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << ms;
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write: " + path);
    os << content;
}

}  // namespace hehdc::cli
