#include "commands.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>
#include <utility>

#include "common.hpp"
#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/evaluator.hpp"
#include "hehdc/ckks/keys.hpp"
#include "hehdc/ckks/params.hpp"
#include "hehdc/data/dataset.hpp"
#include "hehdc/data/digits.hpp"
#include "hehdc/data/idx.hpp"
#include "hehdc/data/synth.hpp"
#include "hehdc/errors.hpp"
#include "hehdc/hdc/encoder.hpp"
#include "hehdc/hdc/model.hpp"
#include "hehdc/hdc/model_io.hpp"
#include "hehdc/hdc/quantize.hpp"
#include "hehdc/protocol/client.hpp"
#include "hehdc/protocol/messages.hpp"
#include "hehdc/protocol/server.hpp"
#include "hehdc/protocol/transport.hpp"
#include "hehdc/ring/sampling.hpp"

namespace hehdc::cli {

using nlohmann::json;

namespace {

std::vector<std::string> default_labels(std::size_t num_classes) {
    std::vector<std::string> names;
    names.reserve(num_classes);
    for (std::size_t i = 0; i < num_classes; ++i) names.push_back(std::to_string(i));
    return names;
}

struct ModelInfo {
    std::size_t input_dim;
    std::size_t hv_dim;
    std::uint64_t encoder_seed;
    std::string bits;  // "float" or the quantization width
    std::vector<std::string> labels;
};

ModelInfo info_of(const hdc::ModelFile& mf) {
    if (mf.quantized)
        return {mf.qmodel.input_dim, mf.qmodel.hv_dim, mf.qmodel.encoder_seed,
                std::to_string(mf.qmodel.bits), mf.qmodel.label_names};
    return {mf.model.input_dim, mf.model.hv_dim, mf.model.encoder_seed, "float",
            mf.model.label_names};
}

std::string label_name(const std::vector<std::string>& names, int label) {
    if (label >= 0 && static_cast<std::size_t>(label) < names.size()) return names[label];
    return std::to_string(label);
}

// Plaintext twin of what the server computes; argmax-equivalent oracle.
hdc::HdcModel oracle_model(const hdc::ModelFile& mf) {
    if (mf.quantized) return hdc::dequantize_model(mf.qmodel);
    return hdc::normalize_model(mf.model);
}

std::vector<double> row_vec(const Eigen::MatrixXd& m, std::size_t i) {
    std::vector<double> v(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) v[static_cast<std::size_t>(j)] = m(i, j);
    return v;
}

protocol::ServerModel publish_model(const ckks::CkksContext& ctx, const hdc::ModelFile& mf,
                                    bool correction, unsigned class_level) {
    const auto mi = info_of(mf);
    const std::uint64_t enc_id =
        hdc::encoder_hash(hdc::make_encoder(mi.input_dim, mi.hv_dim, mi.encoder_seed));
    if (mf.quantized) {
        if (correction)
            throw std::invalid_argument(
                "norm correction applies to unnormalized float models; quantized models "
                "are already normalized");
        return protocol::build_server_model(ctx, mf.qmodel, enc_id, class_level);
    }
    if (correction)
        return protocol::build_server_model_with_correction(ctx, mf.model, enc_id, class_level);
    if (!mf.model.normalized)
        std::cerr << "note: normalizing class vectors before publishing\n";
    return protocol::build_server_model(
        ctx, mf.model.normalized ? mf.model : hdc::normalize_model(mf.model), enc_id,
        class_level);
}

void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

}  // namespace

int cmd_ingest(const IngestOptions& opt) {
    const std::string root = data_root(opt.data_dir);
    const std::size_t train_n = opt.full ? 60000 : opt.train_count;
    const std::size_t test_n = opt.full ? 10000 : opt.test_count;

    data::Dataset train, test;
    std::string source_desc;
    if (opt.source == "synthetic") {
        const std::size_t test_per_class = std::max<std::size_t>(1, opt.per_class / 5);
        train = data::make_blobs(opt.classes, opt.feature_dim, opt.per_class, opt.seed);
        test = data::make_blobs(opt.classes, opt.feature_dim, test_per_class, opt.seed + 1);
        source_desc = "synthetic-blobs";
    } else if (opt.source == "mnist") {
        if (!data::mnist_available(root))
            throw DataError("no MNIST IDX files under " + root);
        train = data::load_mnist_split(root, true);
        test = data::load_mnist_split(root, false);
        if (train_n > train.count() || test_n > test.count())
            throw DataError("requested split exceeds the source size");
        train = data::slice(train, 0, train_n);
        test = data::slice(test, 0, test_n);
        source_desc = "mnist-idx";
    } else {
        // "digits" pins the bundled source by skipping the IDX probe.
        const std::string idx_dir = opt.source == "digits" ? std::string() : root;
        auto desk = data::load_desk_data(idx_dir, root + "/digits1797.bin", train_n, test_n);
        train = std::move(desk.train);
        test = std::move(desk.test);
        source_desc = desk.source;
    }

    std::filesystem::create_directories(opt.out_dir);
    data::save_dataset(opt.out_dir + "/train.hdds", train);
    data::save_dataset(opt.out_dir + "/test.hdds", test);
    json man{{"format", "hehdc-dataset-manifest"},
             {"version", 1},
             {"source", source_desc},
             {"feature_dim", train.feature_dim},
             {"num_classes", train.num_classes},
             {"train_count", train.count()},
             {"test_count", test.count()},
             {"seed", opt.seed}};
    write_json(opt.out_dir + "/ingest.json", man);

    std::cout << "source " << source_desc << ": " << train.count() << " train / " << test.count()
              << " test samples, " << train.feature_dim << " features, " << train.num_classes
              << " classes\nwrote " << opt.out_dir << "/{train.hdds,test.hdds,ingest.json}\n";
    return kExitOk;
}

int cmd_train(const TrainOptions& opt) {
    const auto train = data::load_dataset(opt.data_dir + "/train.hdds");
    const auto test = data::load_dataset(opt.data_dir + "/test.hdds");
    warn_dim(opt.hv_dim);

    const auto enc = hdc::make_encoder(train.feature_dim, opt.hv_dim, opt.encoder_seed);
    const auto hvs = hdc::encode_batch(train.features.data(), train.count(), train.feature_dim,
                                       enc);
    auto model = hdc::train_single_pass(hvs, train.labels, train.num_classes, enc);
    const hdc::TrainConfig cfg{opt.learning_rate, opt.epochs, opt.shuffle_seed};
    model = hdc::iterative_train(std::move(model), hvs, train.labels, cfg);
    model.label_names = default_labels(model.num_classes());

    const auto test_hvs =
        hdc::encode_batch(test.features.data(), test.count(), test.feature_dim, enc);
    const double acc = hdc::evaluate_accuracy(model, test_hvs, test.labels);

    hdc::save_model(opt.out_path, model);

    std::string source = "unknown";
    if (std::ifstream is(opt.data_dir + "/ingest.json"); is) {
        const auto man = json::parse(is, nullptr, false);
        if (man.is_object() && man.contains("source")) source = man["source"];
    }
    json man{{"format", "hehdc-model-manifest"},
             {"version", 1},
             {"type", "float"},
             {"input_dim", model.input_dim},
             {"hv_dim", model.hv_dim},
             {"encoder_seed", model.encoder_seed},
             {"encoder_hash", hex_u64(hdc::encoder_hash(enc))},
             {"normalized", model.normalized},
             {"labels", model.label_names},
             {"train",
              {{"learning_rate", opt.learning_rate},
               {"epochs", opt.epochs},
               {"shuffle_seed", opt.shuffle_seed},
               {"train_count", train.count()},
               {"source", source}}},
             {"accuracy", {{"test", acc}, {"test_count", test.count()}}}};
    write_json(opt.out_path + ".json", man);

    std::cout << "trained D=" << opt.hv_dim << " on " << train.count() << " samples ("
              << opt.epochs << " epochs, lr " << opt.learning_rate << ")\n"
              << "test accuracy " << acc << " on " << test.count() << " samples\n"
              << "wrote " << opt.out_path << " and " << opt.out_path << ".json\n";
    return kExitOk;
}

int cmd_quantize(const QuantizeOptions& opt) {
    const auto mf = hdc::load_model(opt.model_path);
    if (mf.quantized) throw DataError("model is already quantized: " + opt.model_path);
    auto params = ckks::parse_params(opt.params);

    const auto normalized = hdc::normalize_model(mf.model);
    auto qm = hdc::quantize_model(normalized, opt.bits);
    if (qm.label_names.empty()) qm.label_names = default_labels(qm.num_classes());

    unsigned chosen = params.scale_log2;
    bool searched = false;
    if (!opt.val_path.empty()) {
        const auto val = data::load_dataset(opt.val_path);
        const std::size_t n =
            std::min(opt.val_count ? opt.val_count : val.count(), val.count());
        const auto sub = data::slice(val, 0, n);
        const auto enc = hdc::make_encoder(qm.input_dim, qm.hv_dim, qm.encoder_seed);
        const auto hvs = hdc::encode_batch(sub.features.data(), n, sub.feature_dim, enc);
        std::vector<unsigned> grid;
        for (unsigned d = 8; d <= 40; d += 2) grid.push_back(d);
        chosen = hdc::scale_search(qm, hvs, sub.labels, params, grid);
        searched = true;
        params.scale_log2 = chosen;
    }

    hdc::save_model(opt.out_path, qm);
    json man{{"format", "hehdc-model-manifest"},
             {"version", 1},
             {"type", "quantized"},
             {"input_dim", qm.input_dim},
             {"hv_dim", qm.hv_dim},
             {"encoder_seed", qm.encoder_seed},
             {"encoder_hash",
              hex_u64(hdc::encoder_hash(
                  hdc::make_encoder(qm.input_dim, qm.hv_dim, qm.encoder_seed)))},
             {"bits", qm.bits},
             {"quant_scale", qm.quant_scale},
             {"labels", qm.label_names},
             {"params", ckks::format_params(params)},
             {"scale_log2", chosen},
             {"scale_searched", searched}};
    write_json(opt.out_path + ".json", man);

    std::cout << "quantized to " << opt.bits << " bits (shared scale " << qm.quant_scale
              << ")\n"
              << (searched ? "searched" : "default") << " query scale 2^" << chosen << " for "
              << ckks::format_params(params) << "\nwrote " << opt.out_path << " and "
              << opt.out_path << ".json\n";
    return kExitOk;
}

int cmd_keygen(const KeygenOptions& opt) {
    const auto params = ckks::parse_params(opt.params);
    const auto ctx = ckks::CkksContext::create(params);
    const auto steps = ckks::power_of_two_steps(ctx);
    const auto km = ckks::keygen(ctx, opt.seed, steps);
    save_keys(opt.out_path, ctx, opt.seed, km);
    std::cout << "parameters " << ckks::format_params(params) << ", " << steps.size()
              << " rotation keys, seed " << opt.seed << "\nwrote " << opt.out_path << " ("
              << std::filesystem::file_size(opt.out_path) << " bytes)\n";
    return kExitOk;
}

int cmd_serve(const ServeOptions& opt) {
    const auto params = ckks::parse_params(opt.params);
    const auto ctx = ckks::CkksContext::create(params);
    const auto mf = hdc::load_model(opt.model_path);
    unsigned class_level = 0;
    if (opt.rescale) {
        if (ctx.params().top_level() == 0)
            throw ParamError("the rescale pipeline needs a chain with a spare level");
        class_level = 1;
    }
    const protocol::PipelineOptions popts{opt.rescale};
    const auto sm = publish_model(ctx, mf, opt.correction, class_level);

    protocol::TcpListener listener(opt.host, opt.port);
    if (!opt.port_file.empty())
        write_file(opt.port_file, std::to_string(listener.port()) + "\n");
    std::cout << "serving " << sm.num_classes() << " classes (D=" << sm.hv_dim << ", "
              << ckks::format_params(params) << ") on " << opt.host << ":" << listener.port()
              << "\n"
              << std::flush;
    protocol::serve(listener, ctx, sm, popts, opt.max_connections);
    return kExitOk;
}

int cmd_classify(const ClassifyOptions& opt) {
    const auto mf = hdc::load_model(opt.model_path);
    const auto mi = info_of(mf);
    const auto enc = hdc::make_encoder(mi.input_dim, mi.hv_dim, mi.encoder_seed);

    ckks::CkksParams params;
    std::uint64_t key_seed = opt.key_seed;
    std::optional<KeyBundle> kb;
    if (!opt.keys_path.empty()) {
        kb = load_keys(opt.keys_path);
        params = kb->params;
        key_seed = kb->seed;
    } else {
        params = ckks::parse_params(opt.params);
    }
    const auto ctx = ckks::CkksContext::create(params);
    ckks::KeyMaterial km;
    if (kb) {
        km.sk = std::move(kb->sk);
        km.gks = std::move(kb->gks);
        km.seed = kb->seed;
    } else {
        km = ckks::keygen(ctx, key_seed, ckks::power_of_two_steps(ctx));
    }

    const auto ds = data::load_dataset(opt.input_path);
    if (opt.index >= ds.count()) throw DataError("sample index out of range");
    if (ds.feature_dim != mi.input_dim)
        throw DataError("dataset feature width does not match the model");
    const auto hv = hdc::encode_sample(ds.sample(opt.index), ds.feature_dim, enc);

    // Loopback state must outlive the worker thread.
    protocol::ServerModel sm;
    std::unique_ptr<protocol::Transport> t;
    std::thread server;
    if (!opt.endpoint.empty()) {
        const auto colon = opt.endpoint.rfind(':');
        if (colon == std::string::npos)
            throw ProtocolError("endpoint must be host:port, got " + opt.endpoint);
        const std::string host = opt.endpoint.substr(0, colon);
        const int port = std::stoi(opt.endpoint.substr(colon + 1));
        t = protocol::tcp_connect(host, static_cast<std::uint16_t>(port));
    } else {
        sm = publish_model(ctx, mf, false, 0);
        auto [a, b] = protocol::make_loopback();
        t = std::move(a);
        server = std::thread([&sm, &ctx, st = std::move(b)] {
            protocol::serve_connection(*st, ctx, sm);
            st->close();
        });
    }

    int label = -1;
    std::vector<double> scores;
    try {
        const auto setup = protocol::make_session_setup(ctx, km.gks, hdc::encoder_hash(enc),
                                                        mi.hv_dim);
        t->send_frame({protocol::FrameType::SessionSetup,
                       protocol::session_setup_payload(ctx, setup)});
        ring::Prng rng(key_seed ^ 0x9e3779b97f4a7c15ull);
        const auto q = protocol::client_encrypt_hv(ctx, hv, km.sk, rng);
        t->send_frame({protocol::FrameType::Query, protocol::query_payload(ctx, q)});
        const auto f = t->recv_frame();
        if (!f) throw ProtocolError("connection closed before scores arrived");
        if (f->type == protocol::FrameType::Error) {
            const auto e = protocol::parse_error(f->payload);
            throw ProtocolError("server rejected the query: " + e.message);
        }
        if (f->type != protocol::FrameType::Scores)
            throw ProtocolError("unexpected reply frame");
        std::tie(label, scores) =
            protocol::client_finalize(ctx, protocol::parse_scores(f->payload, ctx), km.sk);
        t->close();
    } catch (...) {
        t->close();
        if (server.joinable()) server.join();
        throw;
    }
    if (server.joinable()) server.join();

    const auto oracle = oracle_model(mf);
    const int plain = hdc::classify_dot(oracle, hv.data());

    std::cout << "label " << label_name(mi.labels, label);
    if (opt.index < ds.labels.size())
        std::cout << " (truth " << label_name(mi.labels, ds.labels[opt.index]) << ")";
    std::cout << "\nscores";
    for (double s : scores) std::cout << " " << s;
    std::cout << "\nplaintext check: " << (plain == label ? "agrees" : "DISAGREES") << " ("
              << label_name(mi.labels, plain) << ")\n";
    return kExitOk;
}

int cmd_eval(const EvalOptions& opt) {
    const auto mf = hdc::load_model(opt.model_path);
    const auto mi = info_of(mf);
    const auto ds = data::load_dataset(opt.data_path);
    if (ds.feature_dim != mi.input_dim)
        throw DataError("dataset feature width does not match the model");

    const bool encrypted = opt.mode == "encrypted";
    std::size_t n = opt.count ? std::min(opt.count, ds.count())
                              : (encrypted ? std::min<std::size_t>(200, ds.count())
                                           : ds.count());
    const auto sub = data::slice(ds, 0, n);
    const auto enc = hdc::make_encoder(mi.input_dim, mi.hv_dim, mi.encoder_seed);
    const auto hvs = hdc::encode_batch(sub.features.data(), n, sub.feature_dim, enc);
    const auto oracle = oracle_model(mf);
    const double plain_acc = hdc::evaluate_accuracy(oracle, hvs, sub.labels);

    TextTable table({"params", "n", "D", "bits", "mode", "accuracy", "agreement", "samples"});
    json rows = json::array();
    if (!encrypted) {
        table.add_row({"-", "-", std::to_string(mi.hv_dim), mi.bits, "plain",
                       std::to_string(plain_acc), "-", std::to_string(n)});
        rows.push_back({{"params", nullptr},
                        {"hv_dim", mi.hv_dim},
                        {"bits", mi.bits},
                        {"mode", "plain"},
                        {"accuracy", plain_acc},
                        {"samples", n}});
    } else {
        for (const auto& ps : opt.params) {
            const auto params = ckks::parse_params(ps);
            const auto ctx = ckks::CkksContext::create(params);
            const auto km = ckks::keygen(ctx, opt.key_seed, ckks::power_of_two_steps(ctx));
            const auto sm = publish_model(ctx, mf, false, 0);
            ckks::Evaluator ev(ctx);
            ring::Prng rng(opt.key_seed ^ 0x517cc1b727220a95ull);
            std::size_t correct = 0, agree = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto hv = row_vec(hvs, i);
                const auto q = protocol::client_encrypt_hv(ctx, hv, km.sk, rng);
                const auto reply = protocol::server_similarity(ev, ctx, q, sm, km.gks);
                const auto [label, scores] = protocol::client_finalize(ctx, reply, km.sk);
                correct += label == sub.labels[i];
                agree += label == hdc::classify_dot(oracle, hv.data());
            }
            const double acc = static_cast<double>(correct) / static_cast<double>(n);
            const double agr = static_cast<double>(agree) / static_cast<double>(n);
            table.add_row({ckks::format_params(params), std::to_string(params.log2n),
                           std::to_string(mi.hv_dim), mi.bits, "encrypted",
                           std::to_string(acc), std::to_string(agr), std::to_string(n)});
            rows.push_back({{"params", ckks::format_params(params)},
                            {"log2n", params.log2n},
                            {"hv_dim", mi.hv_dim},
                            {"bits", mi.bits},
                            {"mode", "encrypted"},
                            {"accuracy", acc},
                            {"plain_accuracy", plain_acc},
                            {"agreement", agr},
                            {"samples", n}});
            std::cout << ckks::format_params(params) << ": encrypted accuracy " << acc
                      << ", plaintext agreement " << agr << " over " << n << " samples\n"
                      << std::flush;
        }
    }

    std::cout << "\n" << table.str() << "plaintext accuracy " << plain_acc << " over " << n
              << " samples\n";
    if (!opt.report.empty()) {
        json j{{"format", "hehdc-eval-report"},
               {"version", 1},
               {"model", opt.model_path},
               {"dataset", opt.data_path},
               {"key_seed", opt.key_seed},
               {"plain_accuracy", plain_acc},
               {"samples", n},
               {"rows", rows}};
        write_json(opt.report + ".json", j);
        write_file(opt.report + ".csv", table.csv());
        std::cout << "wrote " << opt.report << ".json and " << opt.report << ".csv\n";
    }
    return kExitOk;
}

}  // namespace hehdc::cli
