#include "toc/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "toc/error.hpp"
#include "toc/text.hpp"

namespace toc {

namespace {

int severity(DisclosureStatus s) {
    switch (s) {
        case DisclosureStatus::Disclosed: return 2;
        case DisclosureStatus::PartiallyDisclosed: return 1;
        case DisclosureStatus::NotDisclosed: return 0;
    }
    return 0;
}

bool all_not_disclosed(const std::vector<ReasoningChain>& chains) {
    return std::none_of(chains.begin(), chains.end(), [](const ReasoningChain& c) { return is_disclosed(c.status); });
}

bool is_agent_error(const Error& e) {
    return e.code() == ErrorCode::AgentFailure || e.code() == ErrorCode::TransportFailure;
}

bool is_apply_error(const Error& e) {
    switch (e.code()) {
        case ErrorCode::InvalidAction:
        case ErrorCode::TargetNotFound:
        case ErrorCode::ScopeDestroying:
        case ErrorCode::InvalidInput: return true;
        default: return false;
    }
}

std::uint64_t hash_claim(const Claim& c) {
    std::string key = c.claim_id + "\x1e" + c.raw_text;
    for (const auto& e : c.elements) key += "\x1e" + e.element_id + "\x1f" + e.element_type + "\x1f" + e.text;
    return text::fnv1a(key);
}

}  // namespace

std::string_view to_string(SimulationMode m) noexcept {
    switch (m) {
        case SimulationMode::EntropyBased: return "entropy";
        case SimulationMode::ConfidenceBased: return "confidence";
        case SimulationMode::Hybrid: return "hybrid";
    }
    return "hybrid";
}

std::string_view to_string(GatingPolicy p) noexcept {
    switch (p) {
        case GatingPolicy::Prune: return "prune";
        case GatingPolicy::FlagForHuman: return "flag-for-human";
        case GatingPolicy::StrategySwitch: return "strategy-switch";
    }
    return "prune";
}

std::string_view to_string(TerminationReason r) noexcept {
    switch (r) {
        case TerminationReason::MaxIterations: return "max-iterations";
        case TerminationReason::Stall: return "stall";
        case TerminationReason::TimeBudget: return "time-budget";
        case TerminationReason::FailureBudget: return "failure-budget";
        case TerminationReason::HumanAbort: return "human-abort";
    }
    return "max-iterations";
}

std::string_view to_string(InterventionState s) noexcept {
    switch (s) {
        case InterventionState::None: return "none";
        case InterventionState::Flagged: return "flagged";
        case InterventionState::Approved: return "approved";
        case InterventionState::Rejected: return "rejected";
    }
    return "none";
}

std::string_view to_string(AuditPhase p) noexcept {
    switch (p) {
        case AuditPhase::Select: return "select";
        case AuditPhase::Expand: return "expand";
        case AuditPhase::Gate: return "gate";
        case AuditPhase::Simulate: return "simulate";
        case AuditPhase::Backprop: return "backprop";
        case AuditPhase::Intervention: return "intervention";
    }
    return "select";
}

std::optional<SimulationMode> parse_simulation_mode(std::string_view s) noexcept {
    for (auto m : {SimulationMode::EntropyBased, SimulationMode::ConfidenceBased, SimulationMode::Hybrid})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

std::optional<GatingPolicy> parse_gating_policy(std::string_view s) noexcept {
    for (auto p : {GatingPolicy::Prune, GatingPolicy::FlagForHuman, GatingPolicy::StrategySwitch})
        if (to_string(p) == s) return p;
    return std::nullopt;
}

std::optional<TerminationReason> parse_termination_reason(std::string_view s) noexcept {
    for (auto r : {TerminationReason::MaxIterations, TerminationReason::Stall, TerminationReason::TimeBudget,
                   TerminationReason::FailureBudget, TerminationReason::HumanAbort})
        if (to_string(r) == s) return r;
    return std::nullopt;
}

std::optional<AuditPhase> parse_audit_phase(std::string_view s) noexcept {
    for (auto p : {AuditPhase::Select, AuditPhase::Expand, AuditPhase::Gate, AuditPhase::Simulate,
                   AuditPhase::Backprop, AuditPhase::Intervention})
        if (to_string(p) == s) return p;
    return std::nullopt;
}

void validate(const SearchConfig& c) {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::ConfigError, m); };
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!finite_nonneg(c.exploration_c)) fail("exploration_c must be a finite non-negative number");
    if (!(c.sigma_max_epi >= 0.0 && c.sigma_max_epi <= 1.0)) fail("sigma_max must lie in [0,1]");
    if (!(std::isfinite(c.alpha) && c.alpha > 0.0)) fail("alpha must be positive");
    if (!(c.delta > 0.0 && c.delta < 1.0)) fail("delta must lie in (0,1)");
    if (c.t_max < 0) fail("t_max must be non-negative");
    if (!finite_nonneg(c.epsilon)) fail("epsilon must be non-negative");
    if (c.t_search_secs <= 0) fail("t_search must be positive");
    if (c.n_fail < 1) fail("n_fail must be at least 1");
    if (!finite_nonneg(c.hybrid_w_entropy) || !finite_nonneg(c.hybrid_w_confidence) ||
        std::abs(c.hybrid_w_entropy + c.hybrid_w_confidence - 1.0) > 1e-12)
        fail("hybrid weights must be non-negative and sum to 1");
    if (c.rollout_depth < 0) fail("rollout_depth must be non-negative");
    if (c.max_depth < 1) fail("max_depth must be at least 1");
    if (c.stall_window < 1) fail("stall_window must be at least 1");
    if (c.intervention_timeout < 1) fail("intervention_timeout must be at least 1");
    if (c.timeout_resolution == InterventionStatus::Pending) fail("timeout resolution must be approved or rejected");
    const auto& w = c.weights;
    for (double v : {w.w1, w.w2, w.w3, w.w4, w.w5})
        if (!finite_nonneg(v)) fail("reward weights must be finite and non-negative");
    if (!is_acyclic(c.precedence)) fail("precedence rules contain a cycle");
}

double uct_score(double q_value, long visits, long parent_visits, double c) {
    if (visits == 0) return std::numeric_limits<double>::infinity();
    if (parent_visits < 1) throw Error(ErrorCode::InvalidInput, "parent_visits must be at least 1");
    const auto n = static_cast<double>(visits);
    return q_value / n + c * std::sqrt(std::log(static_cast<double>(parent_visits)) / n);
}

long widening_limit(long visits, double alpha, double delta) {
    if (visits < 0) throw Error(ErrorCode::InvalidInput, "visits must be non-negative");
    const double v = std::ceil(alpha * std::pow(static_cast<double>(visits), delta));
    return std::max(1L, static_cast<long>(v));
}

std::optional<TerminationReason> should_terminate(const RunningStats& s, const SearchConfig& cfg) {
    if (s.iteration >= cfg.t_max) return TerminationReason::MaxIterations;
    if (s.stall_count >= cfg.stall_window) return TerminationReason::Stall;
    if (s.elapsed_secs > static_cast<double>(cfg.t_search_secs)) return TerminationReason::TimeBudget;
    if (s.consecutive_failures >= cfg.n_fail) return TerminationReason::FailureBudget;
    return std::nullopt;
}

std::vector<double> policy_scores(const std::vector<Candidate>& candidates, SimulationMode mode,
                                  const SearchConfig& cfg) {
    std::vector<double> out;
    out.reserve(candidates.size());
    if (candidates.empty()) return out;
    double lo = candidates.front().chain.uncertainty;
    double hi = lo;
    for (const auto& c : candidates) {
        lo = std::min(lo, c.chain.uncertainty);
        hi = std::max(hi, c.chain.uncertainty);
    }
    for (const auto& c : candidates) {
        switch (mode) {
            case SimulationMode::EntropyBased: out.push_back(c.chain.uncertainty); break;
            case SimulationMode::ConfidenceBased: out.push_back(c.action.confidence); break;
            case SimulationMode::Hybrid: {
                const double norm = hi > lo ? (c.chain.uncertainty - lo) / (hi - lo) : 1.0;
                out.push_back(cfg.hybrid_w_entropy * norm + cfg.hybrid_w_confidence * c.action.confidence);
                break;
            }
        }
    }
    return out;
}

void backpropagate(std::vector<SearchNode>& nodes, int leaf, double reward) {
    if (leaf < 0 || leaf >= static_cast<int>(nodes.size()))
        throw Error(ErrorCode::InvalidInput, "leaf is not part of the tree");
    for (int n = leaf; n != -1; n = nodes[static_cast<std::size_t>(n)].parent) {
        auto& node = nodes[static_cast<std::size_t>(n)];
        node.q_value += reward;
        ++node.visits;
    }
}

// ---------------------------------------------------------------------------

EditEnvironment::EditEnvironment(ExaminerAgent& examiner, EditorAgent& editor, std::vector<PriorArtDocument> prior_art,
                                 std::vector<PrecedenceRule> precedence, std::vector<EditOperationType> novelty_ops,
                                 RewardWeights weights)
    : examiner_(examiner),
      editor_(editor),
      prior_art_(std::move(prior_art)),
      precedence_(std::move(precedence)),
      novelty_ops_(std::move(novelty_ops)),
      weights_(weights) {}

ReasoningChain EditEnvironment::examine_element(const ClaimElement& element) {
    if (prior_art_.empty()) {
        ReasoningChain none;
        none.element_id = element.element_id;
        none.reasoning = "No prior art supplied.";
        none.confidence = 1.0;
        return none;
    }
    std::optional<ReasoningChain> best;
    for (const auto& doc : prior_art_) {
        const auto key = element.element_type + "\x1f" + element.text + "\x1f" + doc.doc_id;
        auto it = examine_cache_.find(key);
        if (it == examine_cache_.end()) it = examine_cache_.emplace(key, examiner_.examine(element, doc)).first;
        const auto& c = it->second;
        if (!best || severity(c.status) > severity(best->status) ||
            (severity(c.status) == severity(best->status) && c.confidence > best->confidence))
            best = c;
    }
    best->element_id = element.element_id;
    return *best;
}

std::vector<ReasoningChain> EditEnvironment::examine(const Claim& claim) {
    std::vector<ReasoningChain> out;
    out.reserve(claim.elements.size());
    for (const auto& e : claim.elements) out.push_back(examine_element(e));
    return out;
}

std::vector<Candidate> EditEnvironment::candidates(const Claim& claim, const std::vector<EditAction>& history,
                                                   const std::vector<ReasoningChain>& chains) {
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < claim.elements.size() && i < chains.size(); ++i) {
        const auto& element = claim.elements[i];
        const auto& chain = chains[i];
        if (!is_disclosed(chain.status)) continue;
        const auto key = element.element_id + "\x1f" + element.element_type + "\x1f" + element.text + "\x1f" +
                         std::string(to_string(chain.status)) + "\x1f" + chain.evidence_text;
        auto it = plan_cache_.find(key);
        if (it == plan_cache_.end()) it = plan_cache_.emplace(key, editor_.plan(element, chain)).first;

        for (const auto& action : it->second.operations) {
            auto seq = history;
            seq.push_back(action);
            const auto last = seq.size() - 1;
            const auto violations = validate_sequence(seq, precedence_);
            if (std::any_of(violations.begin(), violations.end(), [&](const PrecedenceViolation& v) {
                    return v.earlier_index == last || v.later_index == last;
                }))
                continue;
            Claim after;
            try {
                after = apply_action(claim, action);
            } catch (const Error& e) {
                if (is_apply_error(e)) continue;
                throw;
            }
            if (after == claim) continue;
            out.push_back({action, std::move(after), chain});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        return a.action.confidence > b.action.confidence;
    });
    return out;
}

void EditEnvironment::set_original(const Claim& original) {
    original_ = original;
    original_chains_ = examine(original);
}

StateEval EditEnvironment::evaluate(const Claim& claim, const std::vector<EditAction>& history) {
    StateEval ev;
    ev.chains = examine(claim);
    ev.components = compute_components(original_, original_chains_, claim, ev.chains, history, novelty_ops_);
    ev.reward = aggregate(ev.components, weights_);
    return ev;
}

// ---------------------------------------------------------------------------

SearchEngine::SearchEngine(SearchConfig cfg, EditEnvironment& env)
    : cfg_(std::move(cfg)), env_(env), own_queue_(std::make_unique<InterventionQueue>()) {
    validate(cfg_);
}

void SearchEngine::emit(AuditRecord r) {
    r.timestamp = ++timestamp_;
    if (sink_) sink_(r);
}

void SearchEngine::reset(const Claim& claim) {
    nodes_.clear();
    stats_ = {};
    timestamp_ = 0;
    current_iteration_ = 0;
    result_ = {};
    flagged_items_.clear();
    finished_reason_.reset();
    own_queue_ = std::make_unique<InterventionQueue>();

    env_.set_original(claim);
    SearchNode root;
    root.claim = claim;
    root.claim_hash = hash_claim(claim);
    root.terminal = cfg_.max_depth <= 0;
    nodes_.push_back(std::move(root));

    const auto ev = env_.evaluate(claim, {});
    result_.original_claim = claim;
    result_.original_chains = env_.original_chains();
    result_.original_reward = ev.reward;
    result_.best_claim = claim;
    result_.best_reward = ev.reward;
    result_.best_components = ev.components;
    result_.best_chains = ev.chains;
    result_.reward_trace.emplace_back(0, ev.reward);
    if (all_not_disclosed(ev.chains)) nodes_[0].terminal = true;

    AuditRecord r;
    r.iteration = 0;
    r.phase = AuditPhase::Simulate;
    r.node_id = 0;
    r.step = 0;
    r.claim_after = claim.raw_text;
    r.reward_components = ev.components;
    r.reward = ev.reward;
    r.detail = "initial";
    emit(std::move(r));
}

bool SearchEngine::eligible(const SearchNode& n) const {
    if (n.pruned) return false;
    if (n.intervention_state == InterventionState::Flagged || n.intervention_state == InterventionState::Rejected)
        return false;
    if (n.gated && cfg_.gating_policy != GatingPolicy::FlagForHuman) return false;
    return true;
}

bool SearchEngine::expandable(const SearchNode& n) const {
    if (n.terminal || n.depth >= cfg_.max_depth) return false;
    if (n.candidates_ready && n.next_candidate >= n.candidates.size()) return false;
    if (!cfg_.widening_enabled) return true;
    return static_cast<long>(n.children.size()) < widening_limit(n.visits, cfg_.alpha, cfg_.delta);
}

SearchEngine::Selection SearchEngine::select() {
    int n = 0;
    while (true) {
        const auto& node = nodes_[static_cast<std::size_t>(n)];
        if (n != 0 && node.visits == 0) return {n, false, false};
        if (node.terminal) return {n, false, false};
        if (expandable(node)) return {n, true, false};

        int best = -1;
        double best_score = 0.0;
        for (int c : node.children) {
            const auto& child = nodes_[static_cast<std::size_t>(c)];
            if (child.gated && cfg_.gating_enabled && cfg_.gating_policy == GatingPolicy::StrategySwitch)
                iteration_mode_ = SimulationMode::ConfidenceBased;
            if (!eligible(child)) continue;
            const double s = uct_score(child.q_value, child.visits, std::max(1L, node.visits), cfg_.exploration_c);
            if (best == -1 || s > best_score) {
                best = c;
                best_score = s;
            }
        }
        if (best == -1) return {n, false, n == 0};
        n = best;
    }
}

int SearchEngine::add_child(int parent, const Candidate& c) {
    SearchNode child;
    const auto& p = nodes_[static_cast<std::size_t>(parent)];
    child.id = static_cast<int>(nodes_.size());
    child.parent = parent;
    child.depth = p.depth + 1;
    child.claim = c.claim_after;
    child.op_history = p.op_history;
    child.op_history.push_back(c.action);
    child.sigma_epi = c.chain.uncertainty;
    child.sigma_ale = 1.0 - c.chain.confidence;
    child.chain = c.chain;
    child.gated = cfg_.gating_enabled && child.sigma_epi > cfg_.sigma_max_epi;
    child.terminal = child.depth >= cfg_.max_depth;
    child.claim_hash = hash_claim(child.claim);
    const int id = child.id;
    nodes_.push_back(std::move(child));
    nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
}

std::vector<int> SearchEngine::expand(int n) {
    auto* node = &nodes_[static_cast<std::size_t>(n)];
    if (!node->candidates_ready) {
        const auto chains = env_.examine(node->claim);
        node->candidates = env_.candidates(node->claim, node->op_history, chains);
        node->candidates_ready = true;
    }
    if (node->candidates.empty()) {
        node->terminal = true;
        ++result_.expansion_failures;
        AuditRecord r;
        r.iteration = current_iteration_;
        r.phase = AuditPhase::Expand;
        r.node_id = n;
        r.claim_before = node->claim.raw_text;
        r.detail = "expansion-failure";
        emit(std::move(r));
        return {};
    }

    std::size_t take = node->candidates.size() - node->next_candidate;
    if (cfg_.widening_enabled) {
        const auto room = widening_limit(node->visits, cfg_.alpha, cfg_.delta) - static_cast<long>(node->children.size());
        take = std::min(take, static_cast<std::size_t>(std::max(0L, room)));
    }

    std::vector<int> kids;
    kids.reserve(take);
    for (std::size_t k = 0; k < take; ++k) {
        node = &nodes_[static_cast<std::size_t>(n)];
        const Candidate cand = node->candidates[node->next_candidate++];
        const int id = add_child(n, cand);
        kids.push_back(id);
        const auto& child = nodes_[static_cast<std::size_t>(id)];

        AuditRecord r;
        r.iteration = current_iteration_;
        r.phase = AuditPhase::Expand;
        r.node_id = id;
        r.parent_id = n;
        r.action = cand.action;
        r.claim_before = nodes_[static_cast<std::size_t>(n)].claim.raw_text;
        r.claim_after = child.claim.raw_text;
        r.chain = cand.chain;
        r.sigma_epi = child.sigma_epi;
        emit(std::move(r));

        if (!child.gated) continue;
        AuditRecord g;
        g.iteration = current_iteration_;
        g.phase = AuditPhase::Gate;
        g.node_id = id;
        g.sigma_epi = child.sigma_epi;
        g.detail = std::string(to_string(cfg_.gating_policy));
        auto& mut = nodes_[static_cast<std::size_t>(id)];
        switch (cfg_.gating_policy) {
            case GatingPolicy::Prune: mut.pruned = true; break;
            case GatingPolicy::FlagForHuman: {
                mut.intervention_state = InterventionState::Flagged;
                const int item = queue().submit(id, cand.chain, cand.action, current_iteration_);
                flagged_items_[item] = id;
                result_.interventions.push_back(id);
                g.item_id = item;
                break;
            }
            case GatingPolicy::StrategySwitch: iteration_mode_ = SimulationMode::ConfidenceBased; break;
        }
        emit(std::move(g));
    }
    // Visits only grow, so the excess over the bound peaks right after an expansion.
    const auto& expanded = nodes_[static_cast<std::size_t>(n)];
    result_.max_widening_excess =
        std::max(result_.max_widening_excess, static_cast<long>(expanded.children.size()) -
                                                  widening_limit(expanded.visits, cfg_.alpha, cfg_.delta));
    return kids;
}

std::vector<double> SearchEngine::path_sigmas(int n) const {
    std::vector<double> out;
    for (; n > 0; n = nodes_[static_cast<std::size_t>(n)].parent) out.push_back(nodes_[static_cast<std::size_t>(n)].sigma_epi);
    std::reverse(out.begin(), out.end());
    return out;
}

void SearchEngine::consider_best(const Claim& claim, const std::vector<EditAction>& path,
                                 const std::vector<double>& sigmas, const StateEval& ev) {
    if (!(ev.reward > result_.best_reward)) return;
    result_.best_claim = claim;
    result_.best_path = path;
    result_.best_path_sigmas = sigmas;
    result_.best_reward = ev.reward;
    result_.best_components = ev.components;
    result_.best_chains = ev.chains;
}

std::pair<Claim, double> SearchEngine::simulate(int n, SimulationMode mode) {
    const auto& start = nodes_[static_cast<std::size_t>(n)];
    Claim claim = start.claim;
    auto history = start.op_history;
    auto sigmas = path_sigmas(n);
    const int steps = std::min(cfg_.rollout_depth, cfg_.max_depth - start.depth);

    StateEval ev;
    try {
        ev = env_.evaluate(claim, history);
    } catch (const Error& e) {
        if (!is_agent_error(e)) throw;
        ++stats_.consecutive_failures;
        AuditRecord r;
        r.iteration = current_iteration_;
        r.phase = AuditPhase::Simulate;
        r.node_id = n;
        r.step = 0;
        r.detail = std::string("agent-failure: ") + e.what();
        emit(std::move(r));
        return {claim, 0.0};
    }

    auto record = [&](int step, const std::optional<EditAction>& action, const std::string& before,
                      std::optional<double> sigma) {
        AuditRecord r;
        r.iteration = current_iteration_;
        r.phase = AuditPhase::Simulate;
        r.node_id = n;
        r.step = step;
        r.action = action;
        if (action) r.claim_before = before;
        r.claim_after = claim.raw_text;
        r.reward_components = ev.components;
        r.reward = ev.reward;
        r.sigma_epi = sigma;
        emit(std::move(r));
    };

    record(0, std::nullopt, {}, std::nullopt);
    consider_best(claim, history, sigmas, ev);
    if (all_not_disclosed(ev.chains)) nodes_[static_cast<std::size_t>(n)].terminal = true;

    for (int step = 1; step <= steps; ++step) {
        if (all_not_disclosed(ev.chains)) break;
        std::vector<Candidate> cands;
        try {
            cands = env_.candidates(claim, history, ev.chains);
        } catch (const Error& e) {
            if (!is_agent_error(e)) throw;
            break;
        }
        if (cfg_.gating_enabled)
            std::erase_if(cands, [&](const Candidate& c) { return c.chain.uncertainty > cfg_.sigma_max_epi; });
        if (cands.empty()) break;
        const auto scores = policy_scores(cands, mode, cfg_);
        const auto pick = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
        const auto& chosen = cands[pick];

        StateEval next;
        try {
            next = env_.evaluate(chosen.claim_after, [&] {
                auto h = history;
                h.push_back(chosen.action);
                return h;
            }());
        } catch (const Error& e) {
            if (!is_agent_error(e)) throw;
            break;
        }
        const auto before = claim.raw_text;
        claim = chosen.claim_after;
        history.push_back(chosen.action);
        sigmas.push_back(chosen.chain.uncertainty);
        ev = std::move(next);
        record(step, chosen.action, before, chosen.chain.uncertainty);
        consider_best(claim, history, sigmas, ev);
    }
    return {claim, ev.reward};
}

void SearchEngine::apply_decisions() {
    auto& q = queue();
    q.expire(stats_.iteration, cfg_.intervention_timeout, cfg_.timeout_resolution);
    for (const auto& item : q.drain()) {
        auto it = flagged_items_.find(item.item_id);
        if (it == flagged_items_.end()) continue;
        auto& node = nodes_[static_cast<std::size_t>(it->second)];
        if (item.status == InterventionStatus::Approved) {
            node.intervention_state = InterventionState::Approved;
        } else {
            node.intervention_state = InterventionState::Rejected;
            node.pruned = true;
        }
        AuditRecord r;
        r.iteration = current_iteration_;
        r.phase = AuditPhase::Intervention;
        r.node_id = node.id;
        r.item_id = item.item_id;
        r.action = item.proposed_action;
        r.chain = item.chain;
        r.detail = std::string(to_string(item.status)) + (item.timed_out ? " (timeout)" : "");
        emit(std::move(r));
    }
}

void SearchEngine::run_iteration() {
    iteration_mode_ = cfg_.sim_mode;
    const auto sel = select();
    {
        AuditRecord r;
        r.iteration = current_iteration_;
        r.phase = AuditPhase::Select;
        r.node_id = sel.node;
        r.detail = sel.exhausted ? "exhausted" : sel.expand ? "expand" : "simulate";
        emit(std::move(r));
    }

    int leaf = sel.node;
    if (sel.exhausted) ++stats_.consecutive_failures;
    if (sel.expand) {
        try {
            const auto kids = expand(sel.node);
            if (kids.empty()) {
                ++stats_.consecutive_failures;
            } else {
                stats_.consecutive_failures = 0;
                for (int k : kids)
                    if (eligible(nodes_[static_cast<std::size_t>(k)])) {
                        leaf = k;
                        break;
                    }
            }
        } catch (const Error& e) {
            if (!is_agent_error(e)) throw;
            ++stats_.consecutive_failures;
            AuditRecord r;
            r.iteration = current_iteration_;
            r.phase = AuditPhase::Expand;
            r.node_id = sel.node;
            r.detail = std::string("agent-failure: ") + e.what();
            emit(std::move(r));
        }
    }

    const double prev_best = result_.best_reward;
    const double reward = simulate(leaf, iteration_mode_).second;
    backpropagate(nodes_, leaf, reward);
    ++nodes_[static_cast<std::size_t>(leaf)].own_simulations;
    {
        AuditRecord r;
        r.iteration = current_iteration_;
        r.phase = AuditPhase::Backprop;
        r.node_id = leaf;
        r.reward = reward;
        r.detail = std::string(to_string(iteration_mode_));
        emit(std::move(r));
    }

    ++stats_.iteration;
    result_.reward_trace.emplace_back(stats_.iteration, result_.best_reward);
    if (std::abs(result_.best_reward - prev_best) < cfg_.epsilon)
        ++stats_.stall_count;
    else
        stats_.stall_count = 0;
    if (cfg_.debug_checks) check_invariants();
}

void SearchEngine::check_invariants() const {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::InternalInvariant, m); };
    if (nodes_.empty()) return;
    if (nodes_.front().visits != stats_.iteration)
        fail("root visits " + std::to_string(nodes_.front().visits) + " != iterations " +
             std::to_string(stats_.iteration));
    for (const auto& n : nodes_) {
        long child_visits = 0;
        for (int c : n.children) child_visits += nodes_[static_cast<std::size_t>(c)].visits;
        if (n.visits != child_visits + n.own_simulations)
            fail("visit conservation broken at node " + std::to_string(n.id));
        if (cfg_.widening_enabled &&
            static_cast<long>(n.children.size()) > widening_limit(n.visits, cfg_.alpha, cfg_.delta))
            fail("widening bound broken at node " + std::to_string(n.id));
        if (hash_claim(n.claim) != n.claim_hash) fail("claim of node " + std::to_string(n.id) + " was mutated");
        if (!std::isfinite(n.q_value)) fail("non-finite q at node " + std::to_string(n.id));
    }
}

std::shared_ptr<const TreeSnapshot> SearchEngine::snapshot(bool finished) const {
    auto snap = std::make_shared<TreeSnapshot>();
    snap->iteration = stats_.iteration;
    snap->reward_trace = result_.reward_trace;
    snap->best_reward = result_.best_reward;
    snap->best_claim = result_.best_claim.raw_text;
    snap->finished = finished;
    snap->termination_reason = finished_reason_;
    snap->nodes.reserve(nodes_.size());
    for (const auto& n : nodes_) {
        NodeView v;
        v.id = n.id;
        v.parent = n.parent;
        v.depth = n.depth;
        v.visits = n.visits;
        v.q_value = n.q_value;
        v.sigma_epi = n.sigma_epi;
        v.sigma_ale = n.sigma_ale;
        v.gated = n.sigma_epi > cfg_.sigma_max_epi;
        v.pruned = n.pruned;
        v.terminal = n.terminal;
        v.intervention_state = n.intervention_state;
        v.claim_text = n.claim.raw_text;
        v.op_history = n.op_history;
        v.chain = n.chain;
        snap->nodes.push_back(std::move(v));
    }
    return snap;
}

SearchResult SearchEngine::run(const Claim& claim) {
    reset(claim);
    const auto start = std::chrono::steady_clock::now();
    if (snapshot_cb_) snapshot_cb_(snapshot());
    while (true) {
        current_iteration_ = stats_.iteration + 1;
        apply_decisions();
        stats_.elapsed_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::optional<TerminationReason> reason;
        if (queue().abort_requested())
            reason = TerminationReason::HumanAbort;
        else
            reason = should_terminate(stats_, cfg_);
        if (reason) {
            finished_reason_ = reason;
            break;
        }
        run_iteration();
        if (iteration_cb_) iteration_cb_(*this);
        if (snapshot_cb_) snapshot_cb_(snapshot());
        if (step_delay_.count() > 0) std::this_thread::sleep_for(step_delay_);
    }

    result_.termination_reason = *finished_reason_;
    result_.iterations = stats_.iteration;
    result_.node_count = nodes_.size();
    result_.committed_high_sigma = 0;
    for (const auto& n : nodes_) {
        if (n.visits > 0 && n.sigma_epi > cfg_.sigma_max_epi) ++result_.committed_high_sigma;
        result_.max_widening_excess =
            std::max(result_.max_widening_excess, static_cast<long>(n.children.size()) -
                                                      widening_limit(n.visits, cfg_.alpha, cfg_.delta));
    }
    if (snapshot_cb_) snapshot_cb_(snapshot(true));
    return result_;
}

}  // namespace toc
