#pragma once

// Examiner and editor agents on top of an AgentBackend: prompt building,
// strict validation with bounded retries, and K-sample epistemic estimates.

#include <atomic>
#include <span>

#include "toc/agent_json.hpp"
#include "toc/backend.hpp"
#include "toc/error.hpp"

namespace toc {

/// Counters shared by the agents of one run. failures grows by exactly one
/// per call that exhausted its retries, never per retry.
struct AgentStats {
    std::atomic<long> calls{0};
    std::atomic<long> responses{0};
    std::atomic<long> valid_responses{0};
    std::atomic<long> failures{0};

    double json_completeness() const {
        const long n = responses.load();
        return n == 0 ? 1.0 : static_cast<double>(valid_responses.load()) / static_cast<double>(n);
    }
};

struct EpistemicEstimate {
    double sigma_epi = 0.0;
    ReasoningChain consensus;
};

/// sigma_epi = 1 - (share of the most common status). Ties between statuses
/// yield a PartiallyDisclosed consensus. Invariant under sample order.
EpistemicEstimate estimate_epistemic(std::span<const ReasoningChain> samples);

/// Seed handed to the backend for a given sample of a call.
std::uint64_t sample_seed(std::uint64_t run_seed, int sample_index);

class ExaminerAgent {
public:
    ExaminerAgent(AgentBackend& backend, AgentBackendConfig cfg, AgentStats* stats = nullptr);

    /// Runs k_samples examinations (concurrently when threads > 1) and folds
    /// them into one chain. human_review is recomputed from uncertainty.
    ReasoningChain examine(const ClaimElement& element, const PriorArtDocument& prior_art);

    const AgentBackendConfig& config() const { return cfg_; }

private:
    AgentBackend& backend_;
    AgentBackendConfig cfg_;
    AgentStats* stats_;
};

class EditorAgent {
public:
    EditorAgent(AgentBackend& backend, AgentBackendConfig cfg, AgentStats* stats = nullptr);

    /// Throws NothingToEdit for NotDisclosed chains.
    EditorPlan plan(const ClaimElement& element, const ReasoningChain& chain);

    AppliedEdit apply_operation(const ClaimElement& element, const ReasoningChain& chain, EditOperationType op);

private:
    AgentBackend& backend_;
    AgentBackendConfig cfg_;
    AgentStats* stats_;
};

}  // namespace toc
