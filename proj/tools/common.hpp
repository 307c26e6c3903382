#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/keys.hpp"
#include "hehdc/ckks/params.hpp"

namespace hehdc::cli {

// Exit-code contract: 0 ok, 2 usage, 3 protocol, 4 crypto-parameter rejection.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitProtocol = 3;
inline constexpr int kExitCryptoParams = 4;

// Runs a command body and maps the library error families onto the exit-code
// contract; the message goes to stderr with an "error:" prefix.
int run_mapped(const std::function<int()>& body);

// Dataset root: the flag wins, then HEHDC_DATA_DIR, then ./data.
std::string data_root(const std::string& flag);

// The usual dimension grid; other values work but print a note.
bool standard_dim(std::size_t hv_dim);
void warn_dim(std::size_t hv_dim);

// "HDKY" bundle: parameter header, key seed, secret key, rotation keys.
struct KeyBundle {
    ckks::CkksParams params;
    std::uint64_t seed = 0;
    ckks::SecretKey sk;
    ckks::GaloisKeySet gks;
};

void save_keys(const std::string& path, const ckks::CkksContext& ctx, std::uint64_t seed,
               const ckks::KeyMaterial& km);
KeyBundle load_keys(const std::string& path);

double median(std::vector<double> v);

// reps timed samples of op after one discarded warmup run; prepare runs
// untimed before every sample. Returns the median in milliseconds.
double median_ms(unsigned reps, const std::function<void()>& prepare,
                 const std::function<void()>& op);

std::string hex_u64(std::uint64_t v);

// Aligned-column text table; the same rows render as CSV.
class TextTable {
public:
    explicit TextTable(std::vector<std::string> headers);
    void add_row(std::vector<std::string> cells);
    std::string str() const;
    std::string csv() const;

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string fmt_ms(double ms);

void write_file(const std::string& path, const std::string& content);

}  // namespace hehdc::cli
