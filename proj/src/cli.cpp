#include "toc/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"

#include "toc/error.hpp"
#include "toc/harness.hpp"
#include "toc/remote_backend.hpp"
#include "toc/replay.hpp"
#include "toc/serve.hpp"
#include "toc/text.hpp"

namespace toc {

namespace {

/// A hard failure after argument parsing; maps to exit 1.
struct Fatal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flags shared by the run-style subcommands. Values apply only when given.
struct CommonFlags {
    std::string config;
    std::string corpus;
    std::string backend;
    std::uint64_t seed = 0;
    double sigma_max = 0, alpha = 0, delta = 0, epsilon = 0, mock_noise = 0;
    int t_max = 0, stall_window = 0, n_fail = 0, port = 0, threads = 0, k_samples = 0, max_depth = 0,
        rollout_depth = 0;
    std::string mode, out_dir, gating_policy;
    bool lenient = false;
    std::map<std::string, CLI::Option*> opts;

    bool given(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }
};

void add_common(CLI::App* app, CommonFlags& f, bool grid_flags) {
    auto& o = f.opts;
    o["config"] = app->add_option("--config", f.config, "JSON config file");
    o["corpus"] = app->add_option("--corpus", f.corpus, "corpus JSON file");
    o["backend"] = app->add_option("--backend", f.backend, "agent backend")->check(CLI::IsMember({"mock", "remote"}));
    o["seed"] = app->add_option("--seed", f.seed, "run seed");
    if (!grid_flags) {
        o["sigma-max"] = app->add_option("--sigma-max", f.sigma_max, "epistemic gate threshold");
        o["alpha"] = app->add_option("--alpha", f.alpha, "widening coefficient");
        o["t-max"] = app->add_option("--t-max", f.t_max, "iteration budget");
    }
    o["delta"] = app->add_option("--delta", f.delta, "widening exponent");
    o["epsilon"] = app->add_option("--epsilon", f.epsilon, "stall tolerance");
    o["stall-window"] = app->add_option("--stall-window", f.stall_window, "stall window in iterations");
    o["n-fail"] = app->add_option("--n-fail", f.n_fail, "consecutive failure budget");
    o["mode"] = app->add_option("--mode", f.mode, "simulation policy")
                    ->check(CLI::IsMember({"entropy", "confidence", "hybrid"}));
    o["out-dir"] = app->add_option("--out-dir", f.out_dir, "output directory");
    o["port"] = app->add_option("--port", f.port, "serve port");
    o["threads"] = app->add_option("--threads", f.threads, "concurrent agent calls per examination");
    o["k-samples"] = app->add_option("--k-samples", f.k_samples, "examiner samples per element");
    o["mock-noise"] = app->add_option("--mock-noise", f.mock_noise, "mock examiner score noise");
    o["gating-policy"] = app->add_option("--gating-policy", f.gating_policy, "gated-node policy")
                             ->check(CLI::IsMember({"prune", "flag-for-human", "strategy-switch"}));
    o["max-depth"] = app->add_option("--max-depth", f.max_depth, "longest edit sequence");
    o["rollout-depth"] = app->add_option("--rollout-depth", f.rollout_depth, "rollout steps");
    o["lenient"] = app->add_flag("--lenient", f.lenient, "warn on unknown corpus keys instead of failing");
}

RunConfig build_config(const CommonFlags& f) {
    RunConfig cfg;
    if (f.given("config")) cfg = load_run_config(f.config, cfg);
    auto& s = cfg.search;
    if (f.given("corpus")) cfg.corpus_path = f.corpus;
    if (f.given("backend")) cfg.backend.kind = f.backend == "remote" ? BackendKind::Remote : BackendKind::Mock;
    if (f.given("seed")) s.seed = f.seed;
    if (f.given("sigma-max")) s.sigma_max_epi = f.sigma_max;
    if (f.given("alpha")) s.alpha = f.alpha;
    if (f.given("t-max")) s.t_max = f.t_max;
    if (f.given("delta")) s.delta = f.delta;
    if (f.given("epsilon")) s.epsilon = f.epsilon;
    if (f.given("stall-window")) s.stall_window = f.stall_window;
    if (f.given("n-fail")) s.n_fail = f.n_fail;
    if (f.given("mode")) s.sim_mode = *parse_simulation_mode(f.mode);
    if (f.given("out-dir")) cfg.out_dir = f.out_dir;
    if (f.given("port")) cfg.port = f.port;
    if (f.given("threads")) cfg.backend.threads = f.threads;
    if (f.given("k-samples")) cfg.backend.k_samples = f.k_samples;
    if (f.given("mock-noise")) cfg.mock_noise = f.mock_noise;
    if (f.given("gating-policy")) s.gating_policy = *parse_gating_policy(f.gating_policy);
    if (f.given("max-depth")) s.max_depth = f.max_depth;
    if (f.given("rollout-depth")) s.rollout_depth = f.rollout_depth;
    if (f.given("lenient")) cfg.strict_corpus = false;
    if (cfg.backend.kind == BackendKind::Remote) {
        if (cfg.backend.credential.empty())
            if (const char* v = std::getenv(cfg.credential_env.c_str())) cfg.backend.credential = v;
        apply_environment(cfg.backend);
    }
    validate(cfg);
    return cfg;
}

std::vector<CorpusRecord> load_records(const RunConfig& cfg, const std::string& only) {
    if (cfg.corpus_path.empty()) throw Error(ErrorCode::ConfigError, "no corpus given (--corpus or config key corpus)");
    std::vector<std::string> warnings;
    auto records = load_corpus(cfg.corpus_path, LoadOptions{cfg.strict_corpus, &warnings});
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (only.empty()) return records;
    for (auto& r : records)
        if (r.claim.claim_id == only) return {std::move(r)};
    throw Error(ErrorCode::InvalidInput, "record '" + only + "' not in corpus");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Fatal("cannot write " + path.string());
    out << content;
}

std::string result_document(const SearchResult& r, const RunConfig& cfg) {
    auto doc = to_json(r);
    doc["config"] = config_echo(cfg);
    return doc.dump(2) + "\n";
}

int cmd_run(const CommonFlags& f, const std::string& only) {
    const auto cfg = build_config(f);
    const auto records = load_records(cfg, only);
    const std::filesystem::path out_dir = cfg.out_dir;
    std::filesystem::create_directories(out_dir);
    Json summary = Json::array();
    int failures = 0;
    for (const auto& rec : records) {
        const auto dir = out_dir / rec.claim.claim_id;
        std::filesystem::create_directories(dir);
        std::string audit;
        RunHooks hooks;
        hooks.audit = [&](const AuditRecord& r) { audit += audit_line(r) + "\n"; };
        Json row{{"record_id", rec.claim.claim_id}};
        try {
            const auto run = run_record(rec, cfg, AblationVariant{"full"}, hooks);
            write_file(dir / "result.json", result_document(run.result, cfg));
            write_file(dir / "curve.csv", reward_curve(run.result.reward_trace));
            row["failed"] = false;
            row["best_reward"] = run.result.best_reward;
            row["termination_reason"] = std::string(to_string(run.result.termination_reason));
            row["iterations"] = run.result.iterations;
            std::cout << rec.claim.claim_id << ": best_reward " << text::format_double(run.result.best_reward)
                      << " after " << run.result.iterations << " iterations ("
                      << to_string(run.result.termination_reason) << ")\n";
        } catch (const std::exception& e) {
            ++failures;
            row["failed"] = true;
            row["error"] = e.what();
            std::cerr << "error: record " << rec.claim.claim_id << ": " << e.what() << "\n";
        }
        write_file(dir / "audit.jsonl", audit);
        summary.push_back(std::move(row));
    }
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    if (failures > 0 && cfg.strict_corpus) return 1;
    return 0;
}

int cmd_ablate(const CommonFlags& f, const std::string& variants_arg) {
    const auto cfg = build_config(f);
    const auto records = load_records(cfg, "");
    std::vector<AblationVariant> variants;
    std::stringstream ss(variants_arg);
    for (std::string name; std::getline(ss, name, ',');)
        if (!name.empty()) variants.push_back(variant_by_name(name));
    if (variants.empty()) throw Error(ErrorCode::ConfigError, "no ablation variants given");
    const auto rows = run_ablation(records, variants, cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = std::filesystem::path(cfg.out_dir) / "ablation.csv";
    write_file(path, ablation_csv(rows));
    std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
    for (const auto& r : rows)
        if (r.failed && cfg.strict_corpus) return 1;
    return 0;
}

int cmd_sweep(const CommonFlags& f, SensitivityGrid grid) {
    const auto cfg = build_config(f);
    const auto records = load_records(cfg, "");
    // Unset axes fall back to the configured value.
    if (grid.sigma_max.empty()) grid.sigma_max = {cfg.search.sigma_max_epi};
    if (grid.alpha.empty()) grid.alpha = {cfg.search.alpha};
    if (grid.t_max.empty()) grid.t_max = {cfg.search.t_max};
    for (double s : grid.sigma_max)
        for (double a : grid.alpha)
            for (int t : grid.t_max) {
                auto probe = cfg;
                probe.search.sigma_max_epi = s;
                probe.search.alpha = a;
                probe.search.t_max = t;
                validate(probe);
            }
    const auto rows = run_sensitivity(records, grid, cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = std::filesystem::path(cfg.out_dir) / "sensitivity.csv";
    write_file(path, sensitivity_csv(rows));
    std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
    for (const auto& r : rows)
        if (r.failed && cfg.strict_corpus) return 1;
    return 0;
}

int cmd_gen_corpus(std::uint64_t seed, int n, const std::string& output, const SyntheticSpec& spec) {
    if (n < 1) throw Error(ErrorCode::ConfigError, "--n must be at least 1");
    const auto records = generate_synthetic(seed, n, spec);
    if (output.empty() || output == "-") {
        std::cout << dump_corpus(records);
    } else {
        const auto parent = std::filesystem::path(output).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        save_corpus(output, records);
        std::cerr << "wrote " << records.size() << " records to " << output << "\n";
    }
    return 0;
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_serve(const CommonFlags& f, const std::string& only, int step_delay_ms, const std::string& host,
              bool exit_when_done) {
    const auto cfg = build_config(f);
    auto records = load_records(cfg, only);
    if (records.empty()) throw Error(ErrorCode::InvalidInput, "corpus is empty");
    const auto rec = records.front();
    ServeSession session(rec, cfg, std::chrono::milliseconds(step_delay_ms));
    httplib::Server server;
    register_routes(server, session);

    int port = cfg.port;
    if (port == 0) {
        port = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
        throw Fatal("cannot bind " + host + ":" + std::to_string(port));
    }
    if (port < 0) throw Fatal("cannot bind " + host);
    std::cout << "listening on http://" << host << ":" << port << " (record " << rec.claim.claim_id << ")"
              << std::endl;

    session.start(std::filesystem::path(cfg.out_dir) / rec.claim.claim_id);
    std::thread watcher;
    if (exit_when_done)
        watcher = std::thread([&] {
            session.join();
            // Give SSE readers a moment to drain the closed log.
            std::this_thread::sleep_for(std::chrono::milliseconds(200));
            server.stop();
        });
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen_after_bind();
    g_server = nullptr;
    session.queue().request_abort();
    session.join();
    if (watcher.joinable()) watcher.join();
    if (!session.error().empty()) {
        std::cerr << "error: " << session.error() << "\n";
        return 1;
    }
    return 0;
}

int cmd_replay(const std::string& audit_path, const std::string& result_path) {
    const auto records = read_audit_file(audit_path);
    const auto replay = replay_audit(records);
    Json out{{"best_claim", replay.best_claim},
             {"best_reward", replay.best_reward},
             {"node_count", replay.nodes.size()},
             {"iterations", replay.iterations}};
    if (result_path.empty()) {
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::ifstream in(result_path, std::ios::binary);
    if (!in) throw Fatal("cannot open " + result_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    Json result;
    try {
        result = Json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw Fatal(std::string("result is not valid JSON: ") + e.what());
    }
    const auto diffs = compare_replay(replay, result);
    out["matches_result"] = diffs.empty();
    std::cout << out.dump(2) << "\n";
    for (const auto& d : diffs) std::cerr << "mismatch: " << d << "\n";
    return diffs.empty() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Uncertainty-aware tree search over patent-claim edits", "toc"};
    app.require_subcommand(1);

    CommonFlags run_flags, ablate_flags, sweep_flags, serve_flags;
    std::string run_record_id, serve_record_id, variants = "full,no-gating,no-widening,single-agent";

    auto* run = app.add_subcommand("run", "search every corpus record and write result.json, audit.jsonl, curve.csv");
    add_common(run, run_flags, false);
    run->add_option("--record", run_record_id, "only this claim id");

    auto* ablate = app.add_subcommand("ablate", "run ablation variants and write ablation.csv");
    add_common(ablate, ablate_flags, false);
    ablate->add_option("--variants", variants, "comma-separated variant names");

    auto* sweep = app.add_subcommand("sweep", "grid over sigma_max, alpha, t_max and write sensitivity.csv");
    add_common(sweep, sweep_flags, true);
    SensitivityGrid sweep_grid;
    sweep->add_option("--sigma-max", sweep_grid.sigma_max, "comma-separated values")->delimiter(',');
    sweep->add_option("--alpha", sweep_grid.alpha, "comma-separated values")->delimiter(',');
    sweep->add_option("--t-max", sweep_grid.t_max, "comma-separated values")->delimiter(',');

    auto* gen = app.add_subcommand("gen-corpus", "write a seeded synthetic corpus");
    std::uint64_t gen_seed = 0;
    int gen_n = 10;
    std::string gen_output;
    SyntheticSpec spec;
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--n", gen_n, "number of records");
    gen->add_option("--output,-o", gen_output, "output file (default stdout)");
    gen->add_option("--min-elements", spec.min_elements, "fewest elements per claim, preamble included");
    gen->add_option("--max-elements", spec.max_elements, "most elements per claim, preamble included");
    gen->add_option("--min-disclosed", spec.min_disclosed, "floor on disclosed body elements");
    gen->add_option("--max-disclosed", spec.max_disclosed, "cap on disclosed body elements (0 = none)");
    gen->add_option("--disclosed-rate", spec.disclosed_rate, "chance a body element is disclosed");
    gen->add_option("--borderline-rate", spec.borderline_rate, "chance a disclosed element is borderline");

    auto* serve = app.add_subcommand("serve", "run one search behind the HTTP review interface");
    add_common(serve, serve_flags, false);
    int step_delay_ms = 0;
    std::string host = "127.0.0.1";
    bool exit_when_done = false;
    serve->add_option("--record", serve_record_id, "claim id to search (default: first record)");
    serve->add_option("--step-delay-ms", step_delay_ms, "pause between iterations");
    serve->add_option("--host", host, "bind address");
    serve->add_flag("--exit-when-done", exit_when_done, "stop serving once the search finishes");

    auto* replay = app.add_subcommand("replay", "rebuild the best state from audit.jsonl and check it");
    std::string audit_path, result_path;
    replay->add_option("--audit", audit_path, "audit.jsonl path")->required();
    replay->add_option("--result", result_path, "result.json to compare against");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (*run) return cmd_run(run_flags, run_record_id);
        if (*ablate) return cmd_ablate(ablate_flags, variants);
        if (*sweep) return cmd_sweep(sweep_flags, sweep_grid);
        if (*gen) return cmd_gen_corpus(gen_seed, gen_n, gen_output, spec);
        if (*serve) return cmd_serve(serve_flags, serve_record_id, step_delay_ms, host, exit_when_done);
        if (*replay) return cmd_replay(audit_path, result_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace toc
