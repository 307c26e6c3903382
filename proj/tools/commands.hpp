#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hehdc::cli {

struct IngestOptions {
    std::string source = "auto";  // auto | mnist | digits | synthetic
    std::string out_dir = ".";
    std::string data_dir;  // falls back to HEHDC_DATA_DIR, then ./data
    std::size_t train_count = 10000;
    std::size_t test_count = 2000;
    bool full = false;  // 60000/10000
    std::size_t classes = 10;  // synthetic source only
    std::size_t feature_dim = 64;
    std::size_t per_class = 200;
    std::uint64_t seed = 1;
};
int cmd_ingest(const IngestOptions& opt);

struct TrainOptions {
    std::string data_dir = ".";  // expects train.hdds / test.hdds from ingest
    std::string out_path = "model.hdcm";
    std::size_t hv_dim = 2048;
    std::uint64_t encoder_seed = 17;
    double learning_rate = 2.0;
    unsigned epochs = 20;
    std::uint64_t shuffle_seed = 1;
};
int cmd_train(const TrainOptions& opt);

struct QuantizeOptions {
    std::string model_path;
    std::string out_path = "model.q.hdcm";
    unsigned bits = 16;
    std::string params = "13";
    std::string val_path;  // optional .hdds split driving the scale search
    std::size_t val_count = 200;
};
int cmd_quantize(const QuantizeOptions& opt);

struct KeygenOptions {
    std::string params = "13";
    std::uint64_t seed = 1;
    std::string out_path = "keys.hdky";
};
int cmd_keygen(const KeygenOptions& opt);

struct ServeOptions {
    std::string model_path;
    std::string params = "13";
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks a free port
    std::string port_file;   // written once bound, for scripting
    std::size_t max_connections = 0;  // 0 serves forever
    bool correction = false;  // publish unnormalized with per-class fixup
    bool rescale = false;     // rescale once after the class multiply
};
int cmd_serve(const ServeOptions& opt);

struct ClassifyOptions {
    std::string model_path;  // encoder parameters + plaintext oracle
    std::string endpoint;    // host:port; empty runs an in-process loopback
    std::string keys_path;   // optional key bundle; otherwise derived from key_seed
    std::string params = "13";  // only used when keys_path is empty
    std::uint64_t key_seed = 1;
    std::string input_path;  // .hdds file the query sample comes from
    std::size_t index = 0;
};
int cmd_classify(const ClassifyOptions& opt);

struct EvalOptions {
    std::string model_path;
    std::string data_path;       // .hdds
    std::string mode = "plain";  // plain | encrypted
    std::vector<std::string> params = {"13"};
    std::size_t count = 0;  // 0 = whole split (plain) / 200 (encrypted)
    std::uint64_t key_seed = 1;
    std::string report;  // optional output prefix: .json and .csv
};
int cmd_eval(const EvalOptions& opt);

}  // namespace hehdc::cli
