#include "bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include "common.hpp"
#include "hehdc/ckks/context.hpp"
#include "hehdc/ckks/encoder.hpp"
#include "hehdc/ckks/evaluator.hpp"
#include "hehdc/ckks/keys.hpp"
#include "hehdc/ckks/params.hpp"
#include "hehdc/errors.hpp"
#include "hehdc/hdc/model.hpp"
#include "hehdc/hdc/quantize.hpp"
#include "hehdc/protocol/client.hpp"
#include "hehdc/protocol/messages.hpp"
#include "hehdc/protocol/server.hpp"
#include "hehdc/ring/sampling.hpp"

namespace hehdc::cli {

using nlohmann::json;

namespace {

// One spare level per chain so rescale is measurable; level-0 ops only touch
// the first prime, so their cost matches the production two-prime chains.
std::string ops_chain(unsigned log2n) {
    switch (log2n) {
        case 11: return "11:18,13,18:12";
        case 12: return "12:36,20,36:20";
        default: return std::to_string(log2n) + ":60,30,60:30";
    }
}

std::vector<double> random_unit(std::size_t dim, ring::Prng& g) {
    std::vector<double> v(dim);
    double nsq = 0;
    for (auto& x : v) {
        x = g.next_gaussian();
        nsq += x * x;
    }
    const double inv = 1.0 / std::sqrt(std::max(nsq, 1e-12));
    for (auto& x : v) x *= inv;
    return v;
}

hdc::HdcModel synth_model(std::size_t hv_dim, std::uint64_t seed, bool spread_norms) {
    hdc::HdcModel m;
    m.input_dim = 64;
    m.hv_dim = hv_dim;
    m.encoder_seed = seed;
    m.normalized = false;
    ring::Prng g(seed * 0x9e3779b97f4a7c15ull + 1);
    m.classes.resize(10);
    for (std::size_t l = 0; l < m.classes.size(); ++l) {
        m.classes[l] = random_unit(hv_dim, g);
        const double norm = spread_norms ? 0.8 + 0.08 * static_cast<double>(l) : 1.0;
        for (auto& x : m.classes[l]) x *= norm;
    }
    for (std::size_t l = 0; l < m.classes.size(); ++l)
        m.label_names.push_back(std::to_string(l));
    return m;
}

// Query near class (i mod 10) with enough margin that the argmax is stable.
std::vector<double> probe_query(const hdc::HdcModel& normalized, std::size_t i, ring::Prng& g) {
    const auto& c = normalized.classes[i % normalized.num_classes()];
    std::vector<double> q(c);
    const double amp = 0.35 / std::sqrt(static_cast<double>(q.size()));
    for (auto& x : q) x += amp * g.next_gaussian();
    double nsq = 0;
    for (double x : q) nsq += x * x;
    const double inv = 1.0 / std::sqrt(nsq);
    for (auto& x : q) x *= inv;
    return q;
}

struct PipelineTiming {
    double encrypt_ms = 0, infer_ms = 0, decrypt_ms = 0;
    std::size_t query_bytes = 0, scores_bytes = 0;
    ckks::OpCounts per_query;
};

// Times one query round trip: chunk encryption, payload parse plus
// similarity on the server side, score decryption.
PipelineTiming time_pipeline(const ckks::CkksContext& ctx, const protocol::ServerModel& sm,
                             const ckks::KeyMaterial& km, const std::vector<double>& hq,
                             unsigned level, const protocol::PipelineOptions& popts,
                             unsigned reps, ring::Prng& rng) {
    PipelineTiming t;
    protocol::QueryMessage qmsg;
    t.encrypt_ms = median_ms(
        reps, {}, [&] { qmsg = protocol::client_encrypt_hv(ctx, hq, km.sk, rng, level); });
    const auto payload = protocol::query_payload(ctx, qmsg);
    t.query_bytes = protocol::frame_wire_size({protocol::FrameType::Query, payload});

    ckks::Evaluator ev(ctx);
    protocol::ScoreMessage reply;
    t.infer_ms = median_ms(reps, {}, [&] {
        const auto parsed = protocol::parse_query(payload, ctx);
        reply = protocol::server_similarity(ev, ctx, parsed, sm, km.gks, popts);
    });
    ev.reset_counts();
    {
        const auto parsed = protocol::parse_query(payload, ctx);
        reply = protocol::server_similarity(ev, ctx, parsed, sm, km.gks, popts);
    }
    t.per_query = ev.counts();
    const auto sp = protocol::scores_payload(ctx, reply);
    t.scores_bytes = protocol::frame_wire_size({protocol::FrameType::Scores, sp});

    std::pair<int, std::vector<double>> res;
    t.decrypt_ms = median_ms(reps, {}, [&] { res = protocol::client_finalize(ctx, reply, km.sk); });
    return t;
}

}  // namespace

std::vector<OpsRow> run_ops_suite(const std::vector<unsigned>& degrees, unsigned reps,
                                  std::uint64_t seed) {
    std::vector<OpsRow> rows;
    for (unsigned log2n : degrees) {
        const auto params = ckks::parse_params(ops_chain(log2n));
        const auto ctx = ckks::CkksContext::create(params);
        auto km = ckks::keygen(ctx, seed, {1});
        ring::Prng rng(seed + log2n);

        std::vector<double> v(ctx.slot_count());
        for (auto& x : v) x = rng.next_double() * 2.0 - 1.0;
        const unsigned delta = params.scale_log2;
        const unsigned dc = hdc::class_scale_log2(params.prime_bits[0], delta, 2048);

        const auto pt0 = ckks::encode(ctx, v, delta, 0);
        const auto pt1 = ckks::encode(ctx, v, delta, 1);
        const auto ptc0 = ckks::encode(ctx, v, dc, 0);
        const auto ptc1 = ckks::encode(ctx, v, dc, 1);
        const auto ct0 = ckks::encrypt(ctx, pt0, km.sk, rng);
        const auto ct1 = ckks::encrypt(ctx, pt1, km.sk, rng);
        ckks::Evaluator ev(ctx);

        OpsRow row;
        row.params = ckks::format_params(params);
        row.log2n = log2n;

        ckks::Plaintext pt_sink;
        row.encode_ms = median_ms(reps, {}, [&] { pt_sink = ckks::encode(ctx, v, delta, 0); });
        ckks::Ciphertext ct_sink;
        row.encrypt_ms =
            median_ms(reps, {}, [&] { ct_sink = ckks::encrypt(ctx, pt0, km.sk, rng); });

        ckks::Ciphertext work;
        row.add_ms = median_ms(
            reps, [&] { work = ct0; }, [&] { ev.add_inplace(work, ct0); });
        row.mul_ms = median_ms(
            reps, [&] { work = ct0; }, [&] { ev.mul_plain_inplace(work, ptc0); });
        row.rotate_ms = median_ms(
            reps, [&] { work = ct0; }, [&] { ev.rotate_inplace(work, 1, km.gks); });
        row.rescale_ms = median_ms(
            reps,
            [&] {
                work = ct1;
                ev.mul_plain_inplace(work, ptc1);
            },
            [&] { ev.rescale_inplace(work); });
        std::vector<double> dec;
        row.decrypt_ms = median_ms(reps, {}, [&] { dec = ckks::decrypt_values(ctx, ct0, km.sk); });
        rows.push_back(row);
    }
    return rows;
}

std::vector<E2eRow> run_e2e_suite(const std::vector<unsigned>& degrees,
                                  const std::vector<std::size_t>& dims, unsigned reps,
                                  std::uint64_t seed) {
    std::vector<E2eRow> rows;
    for (unsigned log2n : degrees) {
        const auto params = ckks::default_params(log2n);
        const auto ctx = ckks::CkksContext::create(params);
        const auto km = ckks::keygen(ctx, seed, ckks::power_of_two_steps(ctx));
        for (std::size_t dim : dims) {
            const auto model = synth_model(dim, seed, false);
            const auto normalized = hdc::normalize_model(model);
            const auto sm = protocol::build_server_model(ctx, normalized, seed, 0);

            ring::Prng qg(seed + 31 * log2n + dim);
            const auto hq = probe_query(normalized, 0, qg);
            ring::Prng rng(seed ^ (dim * 2654435761u + log2n));
            const auto t = time_pipeline(ctx, sm, km, hq, 0, {}, reps, rng);

            E2eRow row;
            row.params = ckks::format_params(params);
            row.log2n = log2n;
            row.hv_dim = dim;
            row.chunks = protocol::chunk_count_for(dim, params);
            row.encrypt_ms = t.encrypt_ms;
            row.infer_ms = t.infer_ms;
            row.decrypt_ms = t.decrypt_ms;
            row.total_ms = t.encrypt_ms + t.infer_ms + t.decrypt_ms;
            row.query_bytes = t.query_bytes;
            row.scores_bytes = t.scores_bytes;

            ckks::Evaluator ev(ctx);
            std::size_t agree = 0;
            const std::size_t probes = 10;
            for (std::size_t i = 0; i < probes; ++i) {
                const auto q = probe_query(normalized, i, qg);
                const auto qmsg = protocol::client_encrypt_hv(ctx, q, km.sk, rng, 0);
                const auto reply = protocol::server_similarity(ev, ctx, qmsg, sm, km.gks);
                const auto [label, scores] = protocol::client_finalize(ctx, reply, km.sk);
                agree += label == hdc::classify_dot(normalized, q.data());
            }
            row.agreement = static_cast<double>(agree) / static_cast<double>(probes);
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<AblationRow> run_ablation_suite(std::size_t hv_dim, unsigned reps,
                                            std::uint64_t seed) {
    const auto raw = synth_model(hv_dim, seed, true);
    const auto normalized = hdc::normalize_model(raw);
    ring::Prng qg(seed + 97);
    const auto hq = probe_query(normalized, 0, qg);

    struct Variant {
        const char* name;
        std::string chain;
        bool correction;
        bool rescale;
        unsigned level;
        ckks::CkksContext ctx;
        ckks::KeyMaterial km;
        protocol::ServerModel sm;
        std::vector<double> enc_ms, inf_ms, dec_ms, tot_ms;
    };
    const std::string flat = ckks::format_params(ckks::default_params(13));
    std::vector<Variant> variants;
    variants.push_back({"rescale", "13:60,30,60:30", true, true, 1,
                        ckks::CkksContext::create(ckks::parse_params("13:60,30,60:30"))});
    variants.push_back({"correction", flat, true, false, 0,
                        ckks::CkksContext::create(ckks::parse_params(flat))});
    variants.push_back({"normalized", flat, false, false, 0,
                        ckks::CkksContext::create(ckks::parse_params(flat))});
    for (auto& var : variants) {
        var.km = ckks::keygen(var.ctx, seed, ckks::power_of_two_steps(var.ctx));
        var.sm = var.correction
                     ? protocol::build_server_model_with_correction(var.ctx, raw, seed,
                                                                    var.level)
                     : protocol::build_server_model(var.ctx, normalized, seed, var.level);
    }

    // Variants run round robin so machine drift lands on all of them alike;
    // each repetition times one full query round trip phase by phase.
    using Clock = std::chrono::steady_clock;
    const auto tick = [](Clock::time_point& t) {
        const auto now = Clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - t).count();
        t = now;
        return ms;
    };
    ring::Prng rng(seed ^ 0xabcdef12345ull);
    std::vector<AblationRow> rows(variants.size());
    for (unsigned rep = 0; rep <= reps; ++rep) {
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            auto& var = variants[vi];
            const protocol::PipelineOptions popts{var.rescale};
            ckks::Evaluator ev(var.ctx);

            auto t = Clock::now();
            const auto qmsg = protocol::client_encrypt_hv(var.ctx, hq, var.km.sk, rng,
                                                          var.level);
            const auto payload = protocol::query_payload(var.ctx, qmsg);
            const double enc = tick(t);
            const auto parsed = protocol::parse_query(payload, var.ctx);
            const auto reply =
                protocol::server_similarity(ev, var.ctx, parsed, var.sm, var.km.gks, popts);
            const double inf = tick(t);
            const auto res = protocol::client_finalize(var.ctx, reply, var.km.sk);
            const double dec = tick(t);
            if (rep == 0) {  // warmup pass also records the op counts and sizes
                auto& row = rows[vi];
                row.variant = var.name;
                row.params = ckks::format_params(var.ctx.params());
                row.mul_count = ev.counts().mul_ct_pt;
                row.rescale_count = ev.counts().rescales;
                row.rotation_count = ev.counts().rotations;
                continue;
            }
            var.enc_ms.push_back(enc);
            var.inf_ms.push_back(inf);
            var.dec_ms.push_back(dec);
            var.tot_ms.push_back(enc + inf + dec);
        }
    }
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        rows[vi].encrypt_ms = median(variants[vi].enc_ms);
        rows[vi].infer_ms = median(variants[vi].inf_ms);
        rows[vi].decrypt_ms = median(variants[vi].dec_ms);
        rows[vi].total_ms = median(variants[vi].tot_ms);
    }
    return rows;
}

int cmd_bench(const BenchOptions& opt) {
    const bool ops = opt.suite == "ops" || opt.suite == "all";
    const bool e2e = opt.suite == "e2e" || opt.suite == "all";
    const bool ablation = opt.suite == "ablation" || opt.suite == "all";

    json report{{"format", "hehdc-bench-report"},
                {"version", 1},
                {"seed", opt.seed},
                {"repetitions", opt.reps},
                {"aggregation", "median-of-" + std::to_string(opt.reps) + ", 1 warmup discarded"},
                {"threads", 1}};
    std::string text;
    std::map<std::string, std::string> csv;

    if (ops) {
        const auto rows = run_ops_suite(opt.degrees, opt.reps, opt.seed);
        TextTable t({"params", "encode", "encrypt", "add", "mul_ct_pt", "rotate", "rescale",
                     "decrypt"});
        json jr = json::array();
        for (const auto& r : rows) {
            t.add_row({r.params, fmt_ms(r.encode_ms), fmt_ms(r.encrypt_ms), fmt_ms(r.add_ms),
                       fmt_ms(r.mul_ms), fmt_ms(r.rotate_ms), fmt_ms(r.rescale_ms),
                       fmt_ms(r.decrypt_ms)});
            jr.push_back({{"params", r.params},
                          {"log2n", r.log2n},
                          {"encode_ms", r.encode_ms},
                          {"encrypt_ms", r.encrypt_ms},
                          {"add_ms", r.add_ms},
                          {"mul_ct_pt_ms", r.mul_ms},
                          {"rotate_ms", r.rotate_ms},
                          {"rescale_ms", r.rescale_ms},
                          {"decrypt_ms", r.decrypt_ms}});
        }
        report["ops"] = jr;
        text += "per-op latency, ms (median of " + std::to_string(opt.reps) + ")\n" + t.str() +
                "\n";
        csv["ops"] = t.csv();
    }

    if (e2e) {
        const auto rows = run_e2e_suite(opt.degrees, opt.dims, opt.reps, opt.seed);
        TextTable t({"params", "D", "chunks", "encrypt", "infer", "decrypt", "total",
                     "query_bytes", "scores_bytes", "agreement"});
        json jr = json::array();
        for (const auto& r : rows) {
            t.add_row({r.params, std::to_string(r.hv_dim), std::to_string(r.chunks),
                       fmt_ms(r.encrypt_ms), fmt_ms(r.infer_ms), fmt_ms(r.decrypt_ms),
                       fmt_ms(r.total_ms), std::to_string(r.query_bytes),
                       std::to_string(r.scores_bytes), std::to_string(r.agreement)});
            jr.push_back({{"params", r.params},
                          {"log2n", r.log2n},
                          {"hv_dim", r.hv_dim},
                          {"chunks", r.chunks},
                          {"encrypt_ms", r.encrypt_ms},
                          {"infer_ms", r.infer_ms},
                          {"decrypt_ms", r.decrypt_ms},
                          {"total_ms", r.total_ms},
                          {"query_bytes", r.query_bytes},
                          {"scores_bytes", r.scores_bytes},
                          {"agreement", r.agreement}});
        }
        report["e2e"] = jr;
        text += "end-to-end query latency, ms (median of " + std::to_string(opt.reps) + ")\n" +
                t.str() + "\n";
        csv["e2e"] = t.csv();

        // Sensitivity: spread of the total across one axis with the other
        // fixed; rotation cost tracks the ring degree, not the dimension.
        double max_dim_spread = 0, min_degree_spread = 0;
        bool have_degree_spread = false;
        for (unsigned log2n : opt.degrees) {
            double lo = 0, hi = 0;
            bool first = true;
            for (const auto& r : rows)
                if (r.log2n == log2n) {
                    lo = first ? r.total_ms : std::min(lo, r.total_ms);
                    hi = first ? r.total_ms : std::max(hi, r.total_ms);
                    first = false;
                }
            if (!first && lo > 0) max_dim_spread = std::max(max_dim_spread, (hi - lo) / lo);
        }
        for (std::size_t dim : opt.dims) {
            double lo = 0, hi = 0;
            bool first = true;
            for (const auto& r : rows)
                if (r.hv_dim == dim) {
                    lo = first ? r.total_ms : std::min(lo, r.total_ms);
                    hi = first ? r.total_ms : std::max(hi, r.total_ms);
                    first = false;
                }
            if (!first && lo > 0) {
                const double s = (hi - lo) / lo;
                min_degree_spread = have_degree_spread ? std::min(min_degree_spread, s) : s;
                have_degree_spread = true;
            }
        }
        report["sensitivity"] = {{"max_spread_across_dims", max_dim_spread},
                                 {"min_spread_across_degrees", min_degree_spread}};
        text += "sensitivity: total varies " + std::to_string(max_dim_spread * 100) +
                "% at most across D, " + std::to_string(min_degree_spread * 100) +
                "% at least across N\n\n";
    }

    if (ablation) {
        const auto rows = run_ablation_suite(opt.ablation_dim, opt.reps, opt.seed);
        TextTable t({"variant", "params", "encrypt", "infer", "decrypt", "total", "muls",
                     "rescales", "rotations"});
        json jr = json::array();
        for (const auto& r : rows) {
            t.add_row({r.variant, r.params, fmt_ms(r.encrypt_ms), fmt_ms(r.infer_ms),
                       fmt_ms(r.decrypt_ms), fmt_ms(r.total_ms), std::to_string(r.mul_count),
                       std::to_string(r.rescale_count), std::to_string(r.rotation_count)});
            jr.push_back({{"variant", r.variant},
                          {"params", r.params},
                          {"encrypt_ms", r.encrypt_ms},
                          {"infer_ms", r.infer_ms},
                          {"decrypt_ms", r.decrypt_ms},
                          {"total_ms", r.total_ms},
                          {"mul_ct_pt", r.mul_count},
                          {"rescales", r.rescale_count},
                          {"rotations", r.rotation_count}});
        }
        report["ablation"] = jr;
        text += "pipeline variants at D=" + std::to_string(opt.ablation_dim) +
                ", ms (median of " + std::to_string(opt.reps) + ")\n" + t.str() + "\n";
        csv["ablation"] = t.csv();
    }

    std::cout << text;
    if (!opt.report.empty()) {
        write_file(opt.report + ".json", report.dump(2) + "\n");
        write_file(opt.report + ".txt", text);
        for (const auto& [name, content] : csv) write_file(opt.report + "_" + name + ".csv",
                                                           content);
        std::cout << "wrote " << opt.report << ".json/.txt and per-suite CSV files\n";
    }
    return kExitOk;
}

}  // namespace hehdc::cli
