#include <CLI11.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "bench.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace cli = hehdc::cli;

int main(int argc, char** argv) {
    CLI::App app{"Encrypted hypervector classification toolkit"};
    app.require_subcommand(1);

    cli::IngestOptions ing;
    auto* ingest = app.add_subcommand("ingest", "Build canonical train/test dataset files");
    ingest->add_option("--source", ing.source, "auto | mnist | digits | synthetic")
        ->check(CLI::IsMember({"auto", "mnist", "digits", "synthetic"}));
    ingest->add_option("--out", ing.out_dir, "output directory");
    ingest->add_option("--data", ing.data_dir, "dataset root (default $HEHDC_DATA_DIR or ./data)");
    ingest->add_option("--train-count", ing.train_count, "train split size");
    ingest->add_option("--test-count", ing.test_count, "test split size");
    ingest->add_flag("--full", ing.full, "use the full 60000/10000 split");
    ingest->add_option("--classes", ing.classes, "synthetic: class count");
    ingest->add_option("--feature-dim", ing.feature_dim, "synthetic: feature width");
    ingest->add_option("--per-class", ing.per_class, "synthetic: train samples per class");
    ingest->add_option("--seed", ing.seed, "generation seed");

    cli::TrainOptions tr;
    auto* train = app.add_subcommand("train", "Train a hypervector model");
    train->add_option("--data", tr.data_dir, "directory with train.hdds/test.hdds");
    train->add_option("--out", tr.out_path, "model output path");
    train->add_option("--dim", tr.hv_dim, "hypervector dimension");
    train->add_option("--seed", tr.encoder_seed, "encoder seed");
    train->add_option("--lr", tr.learning_rate, "iterative learning rate");
    train->add_option("--epochs", tr.epochs, "iterative epochs");
    train->add_option("--shuffle-seed", tr.shuffle_seed, "epoch shuffle seed");

    cli::QuantizeOptions qz;
    auto* quantize = app.add_subcommand("quantize", "Normalize and quantize a trained model");
    quantize->add_option("--model", qz.model_path, "float model path")->required();
    quantize->add_option("--out", qz.out_path, "quantized model output path");
    quantize->add_option("--bits", qz.bits, "class value width (16 default, 8 supported)");
    quantize->add_option("--params", qz.params, "parameter set the scale targets");
    quantize->add_option("--val", qz.val_path, "validation split driving the scale search");
    quantize->add_option("--val-count", qz.val_count, "validation sample cap");

    cli::KeygenOptions kg;
    auto* keygen = app.add_subcommand("keygen", "Generate a client key bundle");
    keygen->add_option("--params", kg.params, "parameter set, e.g. 13 or 13:60,60:30");
    keygen->add_option("--seed", kg.seed, "key seed");
    keygen->add_option("--out", kg.out_path, "key bundle output path");

    cli::ServeOptions sv;
    auto* serve = app.add_subcommand("serve", "Serve encrypted classification queries");
    serve->add_option("--model", sv.model_path, "model to publish")->required();
    serve->add_option("--params", sv.params, "parameter set");
    serve->add_option("--host", sv.host, "bind address");
    serve->add_option("--port", sv.port, "port (0 picks a free one)");
    serve->add_option("--port-file", sv.port_file, "write the bound port here");
    serve->add_option("--max-connections", sv.max_connections,
                      "stop after this many connections (0 = serve forever)");
    serve->add_flag("--correction", sv.correction,
                    "publish unnormalized classes with a per-class fixup multiply");
    serve->add_flag("--rescale", sv.rescale, "rescale after the class multiply");

    cli::ClassifyOptions cf;
    auto* classify = app.add_subcommand("classify", "Run one encrypted query");
    classify->add_option("--model", cf.model_path, "model file (encoder + oracle)")->required();
    classify->add_option("--endpoint", cf.endpoint, "host:port (default: in-process loopback)");
    classify->add_option("--keys", cf.keys_path, "key bundle from keygen");
    classify->add_option("--params", cf.params, "parameter set when no key bundle is given");
    classify->add_option("--key-seed", cf.key_seed, "key seed when no key bundle is given");
    classify->add_option("--input", cf.input_path, "dataset the query sample comes from")
        ->required();
    classify->add_option("--index", cf.index, "sample index");

    cli::EvalOptions ev;
    auto* eval = app.add_subcommand("eval", "Measure accuracy, plain or encrypted");
    eval->add_option("--model", ev.model_path, "model file")->required();
    eval->add_option("--data", ev.data_path, "dataset file (.hdds)")->required();
    eval->add_option("--mode", ev.mode, "plain | encrypted")
        ->check(CLI::IsMember({"plain", "encrypted"}));
    eval->add_option("--params", ev.params, "parameter sets (repeatable)");
    eval->add_option("--count", ev.count, "sample cap (0: all plain / 200 encrypted)");
    eval->add_option("--key-seed", ev.key_seed, "key seed");
    eval->add_option("--report", ev.report, "report prefix (.json/.csv)");

    cli::BenchOptions bn;
    auto* bench = app.add_subcommand("bench", "Latency and size benchmarks");
    bench->add_option("--suite", bn.suite, "ops | e2e | ablation | all")
        ->check(CLI::IsMember({"ops", "e2e", "ablation", "all"}));
    bench->add_option("--report", bn.report, "report prefix (.json/.txt/.csv)");
    bench->add_option("--reps", bn.reps, "timed repetitions per measurement")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", bn.seed, "generation seed");
    bench->add_option("--degrees", bn.degrees, "ring degrees (log2)");
    bench->add_option("--dims", bn.dims, "hypervector dimensions for the e2e grid");
    bench->add_option("--ablation-dim", bn.ablation_dim, "dimension for the ablation suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::kExitOk : cli::kExitUsage;
    }

    if (*ingest) return cli::run_mapped([&] { return cli::cmd_ingest(ing); });
    if (*train) return cli::run_mapped([&] { return cli::cmd_train(tr); });
    if (*quantize) return cli::run_mapped([&] { return cli::cmd_quantize(qz); });
    if (*keygen) return cli::run_mapped([&] { return cli::cmd_keygen(kg); });
    if (*serve) return cli::run_mapped([&] { return cli::cmd_serve(sv); });
    if (*classify) return cli::run_mapped([&] { return cli::cmd_classify(cf); });
    if (*eval) return cli::run_mapped([&] { return cli::cmd_eval(ev); });
    if (*bench) return cli::run_mapped([&] { return cli::cmd_bench(bn); });
    return cli::kExitUsage;
}
