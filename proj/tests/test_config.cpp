#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "toc/config.hpp"
#include "toc/error.hpp"

using namespace toc;

TEST(Config, DefaultsEchoTheReferenceConstants) {
    const auto e = config_echo(RunConfig{});
    EXPECT_EQ(e["sigma_max"], 0.2);
    EXPECT_EQ(e["alpha"], 2.0);
    EXPECT_EQ(e["delta"], 0.5);
    EXPECT_EQ(e["exploration_c"], 1.414);
    EXPECT_EQ(e["t_max"], 800);
    EXPECT_EQ(e["epsilon"], 0.01);
    EXPECT_EQ(e["t_search"], 3600);
    EXPECT_EQ(e["n_fail"], 20);
    EXPECT_EQ(e["mode"], "hybrid");
    EXPECT_EQ(e["hybrid_weights"]["entropy"], 0.6);
    EXPECT_EQ(e["hybrid_weights"]["confidence"], 0.4);
    EXPECT_EQ(e["rollout_depth"], 3);
    EXPECT_EQ(e["backend"]["k_samples"], 5);
    EXPECT_EQ(e["backend"]["max_retries"], 2);
    EXPECT_EQ(e["weights"], (Json{{"w1", 1.0}, {"w2", 0.5}, {"w3", 1.5}, {"w4", 0.8}, {"w5", 0.3}}));
}

TEST(Config, EchoRoundTripsThroughTheLoader) {
    RunConfig a;
    a.search.sigma_max_epi = 0.35;
    a.search.alpha = 0.6;
    a.search.t_max = 15;
    a.search.gating_policy = GatingPolicy::Prune;
    a.search.weights.w3 = 2.5;
    a.search.novelty_ops = {EditOperationType::AddLimitation};
    a.mock_noise = 0.1;
    a.backend.k_samples = 7;
    const auto echo = config_echo(a);
    RunConfig b;
    apply_config_json(b, echo);
    EXPECT_EQ(b.search, a.search);
    EXPECT_EQ(config_echo(b), echo);
    // And the defaults too.
    RunConfig c;
    apply_config_json(c, config_echo(RunConfig{}));
    EXPECT_EQ(c.search, SearchConfig{});
}

TEST(Config, UnknownAndMistypedKeysAreRejected) {
    RunConfig c;
    EXPECT_THROW(apply_config_json(c, Json{{"sigma", 0.2}}), Error);
    EXPECT_THROW(apply_config_json(c, Json{{"t_max", "800"}}), Error);
    EXPECT_THROW(apply_config_json(c, Json{{"t_max", 1.5}}), Error);
    EXPECT_THROW(apply_config_json(c, Json{{"weights", Json{{"w9", 1.0}}}}), Error);
    EXPECT_THROW(apply_config_json(c, Json{{"backend", Json{{"api_key", "x"}}}}), Error);
    EXPECT_THROW(apply_config_json(c, Json{{"mode", "greedy"}}), Error);
    EXPECT_THROW(apply_config_json(c, Json::array()), Error);
    try {
        apply_config_json(c, Json{{"weights", Json{{"w9", 1.0}}}});
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        EXPECT_NE(std::string(e.what()).find("weights.w9"), std::string::npos);
    }
}

TEST(Config, EchoNeverContainsTheCredential) {
    RunConfig c;
    c.backend.kind = BackendKind::Remote;
    c.backend.endpoint = "http://127.0.0.1:9/x";
    c.backend.credential = "s3cr3t-value";
    const auto dump = config_echo(c).dump();
    EXPECT_EQ(dump.find("s3cr3t-value"), std::string::npos);
    EXPECT_NE(dump.find("TOC_LLM_API_KEY"), std::string::npos);
}

TEST(Config, EchoIgnoresExecutionOnlySettings) {
    RunConfig a;
    RunConfig b;
    b.backend.threads = 4;
    b.out_dir = "elsewhere";
    EXPECT_EQ(config_echo(a), config_echo(b));
}

TEST(Config, FileLoadingAndValidation) {
    const auto path = std::filesystem::temp_directory_path() / "toc_cfg_test.json";
    {
        std::ofstream out(path);
        out << R"({"t_max": 15, "alpha": 0.6, "backend": {"kind": "mock", "mock_noise": 0.2}})";
    }
    const auto c = load_run_config(path);
    EXPECT_EQ(c.search.t_max, 15);
    EXPECT_EQ(c.search.alpha, 0.6);
    EXPECT_EQ(c.mock_noise, 0.2);
    {
        std::ofstream out(path);
        out << "{ broken";
    }
    EXPECT_THROW(load_run_config(path), Error);
    std::filesystem::remove(path);
    EXPECT_THROW(load_run_config(path), Error);

    RunConfig bad;
    bad.mock_noise = 2.0;
    EXPECT_THROW(validate(bad), Error);
    bad = {};
    bad.search.sigma_max_epi = -0.1;
    EXPECT_THROW(validate(bad), Error);
}
