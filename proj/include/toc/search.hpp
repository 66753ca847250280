#pragma once

// Uncertainty-aware MCTS over claim states: UCT selection with sigma gating,
// progressive-widening expansion, policy rollouts and backpropagation.

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toc/agents.hpp"
#include "toc/intervention.hpp"
#include "toc/reward.hpp"

namespace toc {

enum class SimulationMode { EntropyBased, ConfidenceBased, Hybrid };
enum class GatingPolicy { Prune, FlagForHuman, StrategySwitch };
enum class TerminationReason { MaxIterations, Stall, TimeBudget, FailureBudget, HumanAbort };
enum class InterventionState { None, Flagged, Approved, Rejected };

std::string_view to_string(SimulationMode m) noexcept;
std::string_view to_string(GatingPolicy p) noexcept;
std::string_view to_string(TerminationReason r) noexcept;
std::string_view to_string(InterventionState s) noexcept;
std::optional<SimulationMode> parse_simulation_mode(std::string_view s) noexcept;
std::optional<GatingPolicy> parse_gating_policy(std::string_view s) noexcept;
std::optional<TerminationReason> parse_termination_reason(std::string_view s) noexcept;

struct SearchConfig {
    double exploration_c = 1.414;
    double sigma_max_epi = 0.2;
    double alpha = 2.0;
    double delta = 0.5;
    int t_max = 800;
    double epsilon = 0.01;
    int t_search_secs = 3600;
    int n_fail = 20;
    SimulationMode sim_mode = SimulationMode::Hybrid;
    double hybrid_w_entropy = 0.6;
    double hybrid_w_confidence = 0.4;
    int rollout_depth = 3;
    /// Longest edit sequence a tree node may carry.
    int max_depth = 3;
    int stall_window = 50;
    std::uint64_t seed = 0;
    GatingPolicy gating_policy = GatingPolicy::StrategySwitch;
    bool gating_enabled = true;
    bool widening_enabled = true;
    /// Iterations a flagged item may stay pending before auto-resolution.
    int intervention_timeout = 100;
    InterventionStatus timeout_resolution = InterventionStatus::Rejected;
    RewardWeights weights;
    std::vector<EditOperationType> novelty_ops = default_novelty_ops();
    std::vector<PrecedenceRule> precedence = default_precedence_rules();
    /// Re-check tree invariants after every iteration; violations throw.
    bool debug_checks = false;

    bool operator==(const SearchConfig&) const = default;
};

/// Throws Error(ConfigError) on invalid values.
void validate(const SearchConfig& cfg);

/// Q/N + c*sqrt(ln(parent_visits)/N); +infinity when N = 0.
double uct_score(double q_value, long visits, long parent_visits, double c);

/// max(1, ceil(alpha * visits^delta)).
long widening_limit(long visits, double alpha, double delta);

/// An edit proposed for a state, with the chain that triggered it.
struct Candidate {
    EditAction action;
    Claim claim_after;
    ReasoningChain chain;
};

struct SearchNode {
    int id = 0;
    int parent = -1;
    int depth = 0;
    Claim claim;
    std::vector<EditAction> op_history;
    double q_value = 0.0;
    long visits = 0;
    long own_simulations = 0;
    double sigma_epi = 0.0;
    double sigma_ale = 0.0;
    std::optional<ReasoningChain> chain;  // triggering chain; empty for the root
    std::vector<int> children;
    InterventionState intervention_state = InterventionState::None;
    bool gated = false;   // sigma_epi above the gate when created
    bool pruned = false;
    bool terminal = false;
    bool candidates_ready = false;
    std::vector<Candidate> candidates;
    std::size_t next_candidate = 0;
    std::uint64_t claim_hash = 0;
};

struct RunningStats {
    long iteration = 0;
    long stall_count = 0;
    long consecutive_failures = 0;
    double elapsed_secs = 0.0;
};

/// Priority: max-iterations, stall, time-budget, failure-budget.
std::optional<TerminationReason> should_terminate(const RunningStats& stats, const SearchConfig& cfg);

/// Rollout policy scores for a candidate set. Entropy: sigma_epi of the
/// triggering chain; confidence: action confidence; hybrid: weighted sum of
/// min-max normalized sigma (1.0 when all equal) and confidence.
std::vector<double> policy_scores(const std::vector<Candidate>& candidates, SimulationMode mode,
                                  const SearchConfig& cfg);

/// q += reward and visits += 1 on every node from leaf to root.
void backpropagate(std::vector<SearchNode>& nodes, int leaf, double reward);

enum class AuditPhase { Select, Expand, Gate, Simulate, Backprop, Intervention };

std::string_view to_string(AuditPhase p) noexcept;
std::optional<AuditPhase> parse_audit_phase(std::string_view s) noexcept;

struct AuditRecord {
    long iteration = 0;
    AuditPhase phase = AuditPhase::Select;
    int node_id = 0;
    std::optional<int> parent_id;
    std::optional<EditAction> action;
    std::optional<std::string> claim_before;
    std::optional<std::string> claim_after;
    std::optional<ReasoningChain> chain;
    std::optional<RewardComponents> reward_components;
    std::optional<double> reward;
    std::optional<double> sigma_epi;
    std::optional<int> step;
    std::optional<int> item_id;
    std::string detail;
    long timestamp = 0;

    bool operator==(const AuditRecord&) const = default;
};

using AuditSink = std::function<void(const AuditRecord&)>;

struct StateEval {
    std::vector<ReasoningChain> chains;
    RewardComponents components;
    double reward = 0.0;
};

/// Agent access for search: per-element examination combined over all
/// prior-art documents, candidate generation and state scoring, with caches.
class EditEnvironment {
public:
    EditEnvironment(ExaminerAgent& examiner, EditorAgent& editor, std::vector<PriorArtDocument> prior_art,
                    std::vector<PrecedenceRule> precedence = default_precedence_rules(),
                    std::vector<EditOperationType> novelty_ops = default_novelty_ops(), RewardWeights weights = {});

    /// The most severe verdict over all documents (then higher confidence,
    /// then earlier document). NotDisclosed when there is no prior art.
    ReasoningChain examine_element(const ClaimElement& element);
    std::vector<ReasoningChain> examine(const Claim& claim);

    /// Edits for every disclosed element, precedence-filtered against the
    /// history, applicable, ranked by confidence (stable).
    std::vector<Candidate> candidates(const Claim& claim, const std::vector<EditAction>& history,
                                      const std::vector<ReasoningChain>& chains);

    void set_original(const Claim& original);
    const Claim& original() const { return original_; }
    const std::vector<ReasoningChain>& original_chains() const { return original_chains_; }

    StateEval evaluate(const Claim& claim, const std::vector<EditAction>& history);

    const RewardWeights& weights() const { return weights_; }

private:
    ExaminerAgent& examiner_;
    EditorAgent& editor_;
    std::vector<PriorArtDocument> prior_art_;
    std::vector<PrecedenceRule> precedence_;
    std::vector<EditOperationType> novelty_ops_;
    RewardWeights weights_;
    Claim original_;
    std::vector<ReasoningChain> original_chains_;
    std::map<std::string, ReasoningChain> examine_cache_;
    std::map<std::string, EditorPlan> plan_cache_;
};

struct SearchResult {
    Claim original_claim;
    std::vector<ReasoningChain> original_chains;
    double original_reward = 0.0;
    Claim best_claim;
    std::vector<EditAction> best_path;
    /// sigma_epi of the chain behind each step of best_path.
    std::vector<double> best_path_sigmas;
    double best_reward = 0.0;
    RewardComponents best_components;
    std::vector<ReasoningChain> best_chains;
    std::vector<std::pair<long, double>> reward_trace;
    TerminationReason termination_reason = TerminationReason::MaxIterations;
    std::vector<int> interventions;
    long iterations = 0;
    std::size_t node_count = 0;
    /// Visited nodes whose sigma_epi exceeds the gate threshold.
    long committed_high_sigma = 0;
    /// Largest excess of children over widening_limit(visits), taken after every expansion.
    long max_widening_excess = 0;
    long expansion_failures = 0;
};

struct NodeView {
    int id = 0;
    int parent = -1;
    int depth = 0;
    long visits = 0;
    double q_value = 0.0;
    double sigma_epi = 0.0;
    double sigma_ale = 0.0;
    bool gated = false;
    bool pruned = false;
    bool terminal = false;
    InterventionState intervention_state = InterventionState::None;
    std::string claim_text;
    std::vector<EditAction> op_history;
    std::optional<ReasoningChain> chain;
};

struct TreeSnapshot {
    long iteration = 0;
    std::vector<NodeView> nodes;
    std::vector<std::pair<long, double>> reward_trace;
    double best_reward = 0.0;
    std::string best_claim;
    bool finished = false;
    std::optional<TerminationReason> termination_reason;
};

class SearchEngine {
public:
    SearchEngine(SearchConfig cfg, EditEnvironment& env);

    void set_audit_sink(AuditSink sink) { sink_ = std::move(sink); }
    /// External queue (serve mode); otherwise an internal one is used.
    void set_intervention_queue(InterventionQueue* queue) { queue_ = queue; }
    void set_snapshot_callback(std::function<void(std::shared_ptr<const TreeSnapshot>)> cb) {
        snapshot_cb_ = std::move(cb);
    }
    /// Called after every completed iteration (tests, progress reporting).
    void set_iteration_callback(std::function<void(const SearchEngine&)> cb) { iteration_cb_ = std::move(cb); }
    /// Delay between iterations; used only by serve mode so humans can keep up.
    void set_step_delay(std::chrono::milliseconds d) { step_delay_ = d; }

    SearchResult run(const Claim& claim);

    // Step-level access for tests.
    void reset(const Claim& claim);
    struct Selection {
        int node = 0;
        bool expand = false;
        bool exhausted = false;
    };
    Selection select();
    std::vector<int> expand(int node);
    /// Rollout from a node; returns the final claim and its reward.
    std::pair<Claim, double> simulate(int node, SimulationMode mode);
    void check_invariants() const;

    const std::vector<SearchNode>& nodes() const { return nodes_; }
    const SearchConfig& config() const { return cfg_; }
    long iteration() const { return stats_.iteration; }
    std::shared_ptr<const TreeSnapshot> snapshot(bool finished = false) const;

private:
    bool eligible(const SearchNode& n) const;
    bool expandable(const SearchNode& n) const;
    int add_child(int parent, const Candidate& c);
    void emit(AuditRecord r);
    void consider_best(const Claim& claim, const std::vector<EditAction>& path, const std::vector<double>& sigmas,
                       const StateEval& eval);
    void apply_decisions();
    std::vector<double> path_sigmas(int node) const;
    void run_iteration();
    InterventionQueue& queue() { return queue_ ? *queue_ : *own_queue_; }

    SearchConfig cfg_;
    EditEnvironment& env_;
    AuditSink sink_;
    std::unique_ptr<InterventionQueue> own_queue_;
    InterventionQueue* queue_ = nullptr;
    std::function<void(std::shared_ptr<const TreeSnapshot>)> snapshot_cb_;
    std::function<void(const SearchEngine&)> iteration_cb_;
    std::chrono::milliseconds step_delay_{0};

    std::vector<SearchNode> nodes_;
    RunningStats stats_;
    long timestamp_ = 0;
    long current_iteration_ = 0;
    SimulationMode iteration_mode_ = SimulationMode::Hybrid;
    SearchResult result_;
    std::map<int, int> flagged_items_;  // item id -> node id
    std::optional<TerminationReason> finished_reason_;
};

}  // namespace toc
