#pragma once

// Run configuration: search parameters, backend selection, reward weights
// and file locations. Precedence is flags > config file > defaults.

#include <filesystem>
#include <string>

#include "toc/backend.hpp"
#include "toc/search.hpp"
#include "toc/serialize.hpp"

namespace toc {

struct RunConfig {
    SearchConfig search;
    AgentBackendConfig backend;
    /// Name of the environment variable holding the remote credential.
    std::string credential_env = "TOC_LLM_API_KEY";
    double mock_noise = 0.05;
    int mock_max_plan_ops = 3;
    std::string corpus_path;
    std::string out_dir = "out";
    int port = 8080;
    bool strict_corpus = true;
};

/// Overlays a config document onto cfg. Unknown keys throw ConfigError.
void apply_config_json(RunConfig& cfg, const Json& doc);
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Effective configuration in the config-file shape. Leaves out secrets and
/// the execution-only keys backend.threads and out_dir, so the echo is the
/// same for every run that must produce identical results.
Json config_echo(const RunConfig& cfg);

void validate(const RunConfig& cfg);

}  // namespace toc
