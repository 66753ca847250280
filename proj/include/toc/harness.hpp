#pragma once

// Per-record runs and the ablation / sensitivity / reward-curve harnesses.

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "toc/config.hpp"
#include "toc/corpus.hpp"
#include "toc/metrics.hpp"
#include "toc/search.hpp"

namespace toc {

struct AblationVariant {
    std::string name;
    bool gating_enabled = true;
    bool widening_enabled = true;
    /// false: editor only, the examiner is a constant-Disclosed stub.
    bool multi_agent = true;
};

/// full, no-gating, no-widening, single-agent.
std::vector<AblationVariant> standard_variants();
AblationVariant variant_by_name(const std::string& name);

/// Backend selected by the run config (mock or remote).
std::unique_ptr<AgentBackend> make_backend(const RunConfig& cfg, bool constant_disclosed = false);

struct RunHooks {
    AuditSink audit;
    InterventionQueue* queue = nullptr;
    std::function<void(std::shared_ptr<const TreeSnapshot>)> snapshot;
    std::function<void(const SearchEngine&)> on_iteration;
    std::chrono::milliseconds step_delay{0};
};

struct RecordRun {
    SearchResult result;
    MetricReport metrics;
    long agent_failures = 0;
};

/// One search over one record. Metrics are always computed with the
/// configured examiner, also for the editor-only variant.
RecordRun run_record(const CorpusRecord& record, const RunConfig& cfg, const AblationVariant& variant = {"full"},
                     const RunHooks& hooks = {});

struct AblationRow {
    std::string variant;
    std::string record_id;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    MetricReport metrics;
    double best_reward = 0.0;
    SearchResult result;
};

std::vector<AblationRow> run_ablation(const std::vector<CorpusRecord>& corpus,
                                      const std::vector<AblationVariant>& variants, const RunConfig& cfg);
std::string ablation_csv(const std::vector<AblationRow>& rows);

struct SensitivityGrid {
    std::vector<double> sigma_max;
    std::vector<double> alpha;
    std::vector<int> t_max;
};

struct SensitivityRow {
    double sigma_max = 0.0;
    double alpha = 0.0;
    int t_max = 0;
    std::string record_id;
    bool failed = false;
    std::string error;
    double best_reward = 0.0;
    double coverage = 0.0;
};

/// Rows ordered by record, then sigma_max, alpha, t_max in grid order.
std::vector<SensitivityRow> run_sensitivity(const std::vector<CorpusRecord>& corpus, const SensitivityGrid& grid,
                                            const RunConfig& cfg);
std::string sensitivity_csv(const std::vector<SensitivityRow>& rows);

/// iteration,best_so_far rows. Throws InternalInvariant on a decreasing trace.
std::string reward_curve(const std::vector<std::pair<long, double>>& trace);

}  // namespace toc
