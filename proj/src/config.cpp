#include "toc/config.hpp"

#include <fstream>
#include <sstream>

#include "toc/error.hpp"

namespace toc {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& msg) {
    throw Error(ErrorCode::ConfigError, "config key '" + key + "': " + msg);
}

template <typename T>
T get(const Json& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) bad(key, "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) bad(key, "expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) bad(key, "expected a number");
        } else {
            if (!v.is_string()) bad(key, "expected a string");
        }
        return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
        bad(key, e.what());
    }
}

void apply_weights(RewardWeights& w, const Json& doc) {
    if (!doc.is_object()) bad("weights", "expected an object");
    for (const auto& [k, v] : doc.items()) {
        const auto key = "weights." + k;
        if (k == "w1") w.w1 = get<double>(v, key);
        else if (k == "w2") w.w2 = get<double>(v, key);
        else if (k == "w3") w.w3 = get<double>(v, key);
        else if (k == "w4") w.w4 = get<double>(v, key);
        else if (k == "w5") w.w5 = get<double>(v, key);
        else bad(key, "unknown key");
    }
}

void apply_backend(RunConfig& cfg, const Json& doc) {
    if (!doc.is_object()) bad("backend", "expected an object");
    auto& b = cfg.backend;
    for (const auto& [k, v] : doc.items()) {
        const auto key = "backend." + k;
        if (k == "kind") {
            const auto s = get<std::string>(v, key);
            if (s == "mock") b.kind = BackendKind::Mock;
            else if (s == "remote") b.kind = BackendKind::Remote;
            else bad(key, "expected mock or remote");
        } else if (k == "endpoint") b.endpoint = get<std::string>(v, key);
        else if (k == "credential_env") cfg.credential_env = get<std::string>(v, key);
        else if (k == "k_samples") b.k_samples = get<int>(v, key);
        else if (k == "temperature") b.temperature = get<double>(v, key);
        else if (k == "timeout_ms") b.timeout = std::chrono::milliseconds(get<long>(v, key));
        else if (k == "max_retries") b.max_retries = get<int>(v, key);
        else if (k == "threads") b.threads = get<int>(v, key);
        else if (k == "mock_noise") cfg.mock_noise = get<double>(v, key);
        else if (k == "mock_max_plan_ops") cfg.mock_max_plan_ops = get<int>(v, key);
        else bad(key, "unknown key");
    }
}

}  // namespace

void apply_config_json(RunConfig& cfg, const Json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
    auto& s = cfg.search;
    for (const auto& [k, v] : doc.items()) {
        if (k == "exploration_c") s.exploration_c = get<double>(v, k);
        else if (k == "sigma_max") s.sigma_max_epi = get<double>(v, k);
        else if (k == "alpha") s.alpha = get<double>(v, k);
        else if (k == "delta") s.delta = get<double>(v, k);
        else if (k == "t_max") s.t_max = get<int>(v, k);
        else if (k == "epsilon") s.epsilon = get<double>(v, k);
        else if (k == "t_search") s.t_search_secs = get<int>(v, k);
        else if (k == "n_fail") s.n_fail = get<int>(v, k);
        else if (k == "mode") {
            const auto m = parse_simulation_mode(get<std::string>(v, k));
            if (!m) bad(k, "expected entropy, confidence or hybrid");
            s.sim_mode = *m;
        } else if (k == "hybrid_weights") {
            if (!v.is_object()) bad(k, "expected an object");
            for (const auto& [hk, hv] : v.items()) {
                if (hk == "entropy") s.hybrid_w_entropy = get<double>(hv, k + "." + hk);
                else if (hk == "confidence") s.hybrid_w_confidence = get<double>(hv, k + "." + hk);
                else bad(k + "." + hk, "unknown key");
            }
        } else if (k == "rollout_depth") s.rollout_depth = get<int>(v, k);
        else if (k == "max_depth") s.max_depth = get<int>(v, k);
        else if (k == "stall_window") s.stall_window = get<int>(v, k);
        else if (k == "seed") s.seed = get<std::uint64_t>(v, k);
        else if (k == "gating_policy") {
            const auto p = parse_gating_policy(get<std::string>(v, k));
            if (!p) bad(k, "expected prune, flag-for-human or strategy-switch");
            s.gating_policy = *p;
        } else if (k == "gating_enabled") s.gating_enabled = get<bool>(v, k);
        else if (k == "widening_enabled") s.widening_enabled = get<bool>(v, k);
        else if (k == "intervention_timeout") s.intervention_timeout = get<int>(v, k);
        else if (k == "intervention_timeout_resolution") {
            const auto st = parse_intervention_status(get<std::string>(v, k));
            if (!st || *st == InterventionStatus::Pending) bad(k, "expected approved or rejected");
            s.timeout_resolution = *st;
        } else if (k == "weights") apply_weights(s.weights, v);
        else if (k == "novelty_ops") {
            if (!v.is_array()) bad(k, "expected an array");
            s.novelty_ops.clear();
            for (const auto& op : v) {
                const auto parsed = parse_operation_type(get<std::string>(op, k));
                if (!parsed) bad(k, "unknown operation type");
                s.novelty_ops.push_back(*parsed);
            }
        } else if (k == "backend") apply_backend(cfg, v);
        else if (k == "corpus") cfg.corpus_path = get<std::string>(v, k);
        else if (k == "out_dir") cfg.out_dir = get<std::string>(v, k);
        else if (k == "port") cfg.port = get<int>(v, k);
        else if (k == "strict_corpus") cfg.strict_corpus = get<bool>(v, k);
        else bad(k, "unknown key");
    }
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    Json doc;
    try {
        doc = Json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    apply_config_json(base, doc);
    return base;
}

Json config_echo(const RunConfig& cfg) {
    const auto& s = cfg.search;
    const auto& b = cfg.backend;
    Json novelty = Json::array();
    for (auto op : s.novelty_ops) novelty.push_back(std::string(to_string(op)));
    return Json{{"exploration_c", s.exploration_c},
                {"sigma_max", s.sigma_max_epi},
                {"alpha", s.alpha},
                {"delta", s.delta},
                {"t_max", s.t_max},
                {"epsilon", s.epsilon},
                {"t_search", s.t_search_secs},
                {"n_fail", s.n_fail},
                {"mode", std::string(to_string(s.sim_mode))},
                {"hybrid_weights", Json{{"entropy", s.hybrid_w_entropy}, {"confidence", s.hybrid_w_confidence}}},
                {"rollout_depth", s.rollout_depth},
                {"max_depth", s.max_depth},
                {"stall_window", s.stall_window},
                {"seed", s.seed},
                {"gating_policy", std::string(to_string(s.gating_policy))},
                {"gating_enabled", s.gating_enabled},
                {"widening_enabled", s.widening_enabled},
                {"intervention_timeout", s.intervention_timeout},
                {"intervention_timeout_resolution", std::string(to_string(s.timeout_resolution))},
                {"weights", to_json(s.weights)},
                {"novelty_ops", std::move(novelty)},
                {"backend",
                 Json{{"kind", b.kind == BackendKind::Mock ? "mock" : "remote"},
                      {"endpoint", b.endpoint},
                      {"credential_env", cfg.credential_env},
                      {"k_samples", b.k_samples},
                      {"temperature", b.temperature},
                      {"timeout_ms", b.timeout.count()},
                      {"max_retries", b.max_retries},
                      {"mock_noise", cfg.mock_noise},
                      {"mock_max_plan_ops", cfg.mock_max_plan_ops}}},
                {"corpus", cfg.corpus_path},
                {"port", cfg.port},
                {"strict_corpus", cfg.strict_corpus}};
}

void validate(const RunConfig& cfg) {
    validate(cfg.search);
    validate(cfg.backend);
    if (!(cfg.mock_noise >= 0.0 && cfg.mock_noise <= 1.0)) throw Error(ErrorCode::ConfigError, "mock_noise must lie in [0,1]");
    if (cfg.mock_max_plan_ops < 1) throw Error(ErrorCode::ConfigError, "mock_max_plan_ops must be at least 1");
    if (cfg.port < 0 || cfg.port > 65535) throw Error(ErrorCode::ConfigError, "port out of range");
}

}  // namespace toc
