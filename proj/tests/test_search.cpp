#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "toc/corpus.hpp"
#include "toc/error.hpp"
#include "toc/mock_backend.hpp"
#include "toc/search.hpp"

using namespace toc;

namespace {

/// Mock agents plus an environment for one record.
struct Rig {
    explicit Rig(const CorpusRecord& rec, MockOptions mo = {}, AgentBackendConfig bc = {})
        : backend(mo), examiner(backend, bc), editor(backend, bc), env(examiner, editor, rec.prior_art) {}
    MockBackend backend;
    ExaminerAgent examiner;
    EditorAgent editor;
    EditEnvironment env;
};

CorpusRecord record_with_disclosed(int min_disclosed, int max_elements = 4, std::uint64_t seed = 42) {
    SyntheticSpec spec;
    spec.min_elements = max_elements;
    spec.max_elements = max_elements;
    spec.min_disclosed = min_disclosed;
    spec.disclosed_rate = 1.0;
    spec.partial_rate = 0.0;
    return generate_synthetic(seed, 1, spec).front();
}

Candidate cand(double sigma, double confidence) {
    Candidate c;
    c.chain.uncertainty = sigma;
    c.action.confidence = confidence;
    return c;
}

/// Independent descent over a node table, following the documented rule.
int oracle_select(const std::vector<SearchNode>& nodes, const SearchConfig& cfg) {
    auto limit = [&](long v) {
        return std::max(1L, static_cast<long>(std::ceil(cfg.alpha * std::pow(static_cast<double>(v), cfg.delta))));
    };
    int n = 0;
    while (true) {
        const auto& node = nodes[static_cast<std::size_t>(n)];
        if (n != 0 && node.visits == 0) return n;
        if (node.terminal) return n;
        const bool out_of_candidates = node.candidates_ready && node.next_candidate >= node.candidates.size();
        if (node.depth < cfg.max_depth && !out_of_candidates &&
            (!cfg.widening_enabled || static_cast<long>(node.children.size()) < limit(node.visits)))
            return n;
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c : node.children) {
            const auto& ch = nodes[static_cast<std::size_t>(c)];
            if (ch.pruned || ch.intervention_state == InterventionState::Flagged ||
                ch.intervention_state == InterventionState::Rejected)
                continue;
            if (ch.gated && cfg.gating_policy != GatingPolicy::FlagForHuman) continue;
            const double s = ch.visits == 0
                                 ? std::numeric_limits<double>::infinity()
                                 : ch.q_value / static_cast<double>(ch.visits) +
                                       cfg.exploration_c * std::sqrt(std::log(static_cast<double>(std::max(1L, node.visits))) /
                                                                     static_cast<double>(ch.visits));
            if (s > best_score) {
                best = c;
                best_score = s;
            }
        }
        if (best == -1) return n;
        n = best;
    }
}

}  // namespace

// --- closed forms ------------------------------------------------------------------

TEST(Uct, HandValues) {
    EXPECT_NEAR(uct_score(2.0, 4, 16, 1.414), 0.5 + 1.414 * std::sqrt(std::log(16.0) / 4.0), 1e-12);
    EXPECT_NEAR(uct_score(2.0, 4, 16, 1.414), 1.6772, 1e-4);
    EXPECT_EQ(uct_score(0.0, 1, 1, 7.0), 0.0);
    EXPECT_TRUE(std::isinf(uct_score(0.0, 0, 5, 1.414)));
    EXPECT_GT(uct_score(0.0, 0, 5, 1.414), 0.0);
}

TEST(Widening, HandValues) {
    EXPECT_EQ(widening_limit(4, 2.0, 0.5), 4);
    EXPECT_EQ(widening_limit(9, 2.0, 0.5), 6);
    EXPECT_EQ(widening_limit(0, 2.0, 0.5), 1);
    EXPECT_EQ(widening_limit(1, 2.0, 0.5), 2);
    EXPECT_EQ(widening_limit(2, 2.0, 0.5), 3);  // ceil(2.828)
    EXPECT_EQ(widening_limit(0, 0.1, 0.5), 1);
}

TEST(Policy, HybridAndConfidenceHandExample) {
    SearchConfig cfg;
    const std::vector<Candidate> cs{cand(0.3, 0.5), cand(0.1, 0.9)};
    const auto h = policy_scores(cs, SimulationMode::Hybrid, cfg);
    EXPECT_NEAR(h[0], 0.6 * 1.0 + 0.4 * 0.5, 1e-12);
    EXPECT_NEAR(h[1], 0.6 * 0.0 + 0.4 * 0.9, 1e-12);
    EXPECT_GT(h[0], h[1]);
    const auto c = policy_scores(cs, SimulationMode::ConfidenceBased, cfg);
    EXPECT_GT(c[1], c[0]);
    const auto e = policy_scores(cs, SimulationMode::EntropyBased, cfg);
    EXPECT_EQ(e[0], 0.3);
    EXPECT_EQ(e[1], 0.1);
    // Equal sigmas normalize to 1.
    const auto flat = policy_scores({cand(0.2, 0.5), cand(0.2, 0.7)}, SimulationMode::Hybrid, cfg);
    EXPECT_NEAR(flat[0], 0.6 + 0.2, 1e-12);
}

TEST(Backprop, DepthThreePathUpdatesFourNodes) {
    std::vector<SearchNode> nodes(6);
    for (int i = 0; i < 6; ++i) nodes[static_cast<std::size_t>(i)].id = i;
    nodes[1].parent = 0;
    nodes[2].parent = 1;
    nodes[3].parent = 2;
    nodes[4].parent = 0;  // off the path
    nodes[5].parent = 4;
    auto before = nodes;
    backpropagate(nodes, 3, 1.5);
    for (int i : {0, 1, 2, 3}) {
        EXPECT_EQ(nodes[static_cast<std::size_t>(i)].q_value, 1.5);
        EXPECT_EQ(nodes[static_cast<std::size_t>(i)].visits, 1);
    }
    for (int i : {4, 5}) {
        EXPECT_EQ(nodes[static_cast<std::size_t>(i)].q_value, 0.0);
        EXPECT_EQ(nodes[static_cast<std::size_t>(i)].visits, 0);
    }
    backpropagate(nodes, 3, 0.0);
    EXPECT_EQ(nodes[0].q_value, 1.5);
    EXPECT_EQ(nodes[0].visits, 2);
    backpropagate(before, 3, 0.7);
    backpropagate(before, 3, -0.2);
    EXPECT_DOUBLE_EQ(before[0].q_value, 0.5);
    EXPECT_EQ(before[0].visits, 2);
}

TEST(Terminate, PriorityAndBoundaries) {
    SearchConfig cfg;
    RunningStats s;
    EXPECT_FALSE(should_terminate(s, cfg));
    s.iteration = 800;
    EXPECT_EQ(should_terminate(s, cfg), TerminationReason::MaxIterations);
    s.iteration = 10;
    s.consecutive_failures = 19;
    EXPECT_FALSE(should_terminate(s, cfg));
    s.consecutive_failures = 20;
    EXPECT_EQ(should_terminate(s, cfg), TerminationReason::FailureBudget);
    s.elapsed_secs = 3601;
    EXPECT_EQ(should_terminate(s, cfg), TerminationReason::TimeBudget);
    s.stall_count = 50;
    EXPECT_EQ(should_terminate(s, cfg), TerminationReason::Stall);
    s.iteration = 800;
    EXPECT_EQ(should_terminate(s, cfg), TerminationReason::MaxIterations);
}

TEST(Terminate, FlatTraceStallsAfterWindow) {
    // A constant best-so-far never changes by epsilon, so every iteration extends the streak.
    const std::vector<double> trace(60, 1.25);
    SearchConfig cfg;
    RunningStats s;
    std::optional<long> stalled_at;
    for (std::size_t t = 1; t < trace.size() && !stalled_at; ++t) {
        s.iteration = static_cast<long>(t);
        s.stall_count = std::abs(trace[t] - trace[t - 1]) < cfg.epsilon ? s.stall_count + 1 : 0;
        if (should_terminate(s, cfg)) stalled_at = s.iteration;
    }
    ASSERT_TRUE(stalled_at);
    EXPECT_EQ(*stalled_at, 50);
}

TEST(Config, Validation) {
    SearchConfig ok;
    EXPECT_NO_THROW(validate(ok));
    auto bad = ok;
    bad.exploration_c = -1;
    EXPECT_THROW(validate(bad), Error);
    bad = ok;
    bad.t_max = -1;
    EXPECT_THROW(validate(bad), Error);
    bad = ok;
    bad.alpha = 0;
    EXPECT_THROW(validate(bad), Error);
}

// --- step-level engine behavior ---------------------------------------------------

TEST(Engine, FreshRootIsSelectedForExpansion) {
    const auto rec = record_with_disclosed(2);
    Rig rig(rec);
    SearchEngine eng(SearchConfig{}, rig.env);
    eng.reset(rec.claim);
    const auto sel = eng.select();
    EXPECT_EQ(sel.node, 0);
    EXPECT_TRUE(sel.expand);
    const auto kids = eng.expand(0);
    EXPECT_EQ(kids.size(), 1u);  // widening_limit(0) = 1
    // An unvisited child is always picked before anything else.
    EXPECT_EQ(eng.select().node, kids.front());
}

TEST(Engine, ChildrenFollowTheWideningScheduleExactly) {
    const auto rec = record_with_disclosed(2);
    Rig rig(rec);
    SearchConfig cfg;
    cfg.t_max = 30;
    cfg.stall_window = 1000;
    SearchEngine eng(cfg, rig.env);
    std::size_t max_children = 0;
    eng.set_iteration_callback([&](const SearchEngine& e) {
        const auto& root = e.nodes().front();
        ASSERT_TRUE(root.candidates_ready);
        // The root is expanded every iteration while it has room; at the start of
        // iteration i it has i - 1 visits.
        const auto expected = std::min<std::size_t>(root.candidates.size(),
                                                    static_cast<std::size_t>(widening_limit(e.iteration() - 1, 2.0, 0.5)));
        EXPECT_EQ(root.children.size(), expected) << "iteration " << e.iteration();
        if (e.iteration() == 5) EXPECT_EQ(root.children.size(), std::min<std::size_t>(4, root.candidates.size()));
        max_children = std::max(max_children, root.children.size());
    });
    eng.run(rec.claim);
    EXPECT_GE(eng.nodes().front().candidates.size(), 6u);
    EXPECT_EQ(max_children, eng.nodes().front().candidates.size());
}

TEST(Engine, SelectAgreesWithIndependentDescent) {
    SyntheticSpec spec;
    spec.max_elements = 4;
    spec.min_disclosed = 1;
    spec.borderline_rate = 0.5;
    const auto recs = generate_synthetic(5, 6, spec);
    for (const auto policy : {GatingPolicy::Prune, GatingPolicy::StrategySwitch}) {
        for (const auto& rec : recs) {
            MockOptions mo;
            mo.noise = 0.15;
            Rig rig(rec, mo);
            SearchConfig cfg;
            cfg.t_max = 120;
            cfg.gating_policy = policy;
            SearchEngine eng(cfg, rig.env);
            long checks = 0;
            eng.set_iteration_callback([&](const SearchEngine& e) {
                auto& mut = const_cast<SearchEngine&>(e);
                EXPECT_EQ(mut.select().node, oracle_select(e.nodes(), cfg)) << rec.claim.claim_id;
                ++checks;
            });
            eng.run(rec.claim);
            EXPECT_GT(checks, 0);
        }
    }
}

TEST(Engine, PrunedHighSigmaChildIsNeverSelected) {
    SyntheticSpec spec;
    spec.max_elements = 4;
    spec.min_disclosed = 1;
    spec.borderline_rate = 0.8;
    const auto recs = generate_synthetic(77, 10, spec);
    long gated_seen = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        MockOptions mo;
        mo.noise = 0.15;
        mo.seed = i;
        Rig rig(recs[i], mo);
        SearchConfig cfg;
        cfg.seed = i;
        cfg.gating_policy = GatingPolicy::Prune;
        SearchEngine eng(cfg, rig.env);
        std::vector<AuditRecord> audit;
        eng.set_audit_sink([&](const AuditRecord& r) { audit.push_back(r); });
        const auto res = eng.run(recs[i].claim);
        for (const auto& r : audit) {
            if (r.phase != AuditPhase::Select && r.phase != AuditPhase::Backprop) continue;
            const auto& n = eng.nodes()[static_cast<std::size_t>(r.node_id)];
            EXPECT_LE(n.sigma_epi, 0.2) << "node " << n.id;
        }
        for (const auto& n : eng.nodes()) {
            if (n.sigma_epi > 0.2) {
                ++gated_seen;
                EXPECT_TRUE(n.pruned);
                EXPECT_EQ(n.visits, 0);
            }
        }
        for (double s : res.best_path_sigmas) EXPECT_LE(s, 0.2);
    }
    EXPECT_GT(gated_seen, 0);  // the gate actually fired
}

TEST(Engine, PrecedenceFiltersCandidatesBeforeRanking) {
    const auto rec = record_with_disclosed(1, 2);
    Rig rig(rec);
    rig.env.set_original(rec.claim);
    const auto chains = rig.env.examine(rec.claim);
    const auto& target = rec.claim.elements.back();
    const std::vector<EditAction> history{{EditOperationType::ReplaceSynonym, target.element_id, target.text, "", 0.8}};
    const auto fresh = rig.env.candidates(rec.claim, {}, chains);
    const auto after = rig.env.candidates(rec.claim, history, chains);
    bool fresh_has_feature = false;
    for (const auto& c : fresh) fresh_has_feature |= c.action.op_type == EditOperationType::AddNovelFeature;
    EXPECT_TRUE(fresh_has_feature);
    for (const auto& c : after)
        EXPECT_FALSE(c.action.op_type == EditOperationType::AddNovelFeature && c.action.target_element_id == target.element_id);
    for (std::size_t i = 1; i < fresh.size(); ++i) EXPECT_GE(fresh[i - 1].action.confidence, fresh[i].action.confidence);
}

TEST(Engine, AllNotDisclosedMeansNoEdits) {
    CorpusRecord rec;
    rec.claim = make_claim("nd", "A device, comprising: a turbine blade cooled by steam.");
    rec.prior_art.push_back({"D1", "Toaster", "A toaster heats bread slices quickly.", {}});
    Rig rig(rec);
    SearchEngine eng(SearchConfig{}, rig.env);
    eng.reset(rec.claim);
    EXPECT_TRUE(eng.nodes().front().terminal);
    const auto res = eng.run(rec.claim);
    EXPECT_EQ(res.best_claim, rec.claim);
    EXPECT_TRUE(res.best_path.empty());
    EXPECT_EQ(res.node_count, 1u);
}

TEST(Engine, SimulateStopsAtNotDisclosed) {
    CorpusRecord rec;
    rec.claim = make_claim("nd", "A device, comprising: a turbine blade cooled by steam.");
    rec.prior_art.push_back({"D1", "Toaster", "A toaster heats bread slices quickly.", {}});
    Rig rig(rec);
    SearchEngine eng(SearchConfig{}, rig.env);
    eng.reset(rec.claim);
    const auto [claim, reward] = eng.simulate(0, SimulationMode::Hybrid);
    EXPECT_EQ(claim, rec.claim);
    EXPECT_EQ(reward, rig.env.evaluate(rec.claim, {}).reward);
}

TEST(Engine, TmaxZeroReturnsOriginal) {
    const auto rec = record_with_disclosed(2);
    Rig rig(rec);
    SearchConfig cfg;
    cfg.t_max = 0;
    SearchEngine eng(cfg, rig.env);
    const auto res = eng.run(rec.claim);
    EXPECT_EQ(res.termination_reason, TerminationReason::MaxIterations);
    EXPECT_EQ(res.iterations, 0);
    EXPECT_EQ(res.best_claim, rec.claim);
    EXPECT_EQ(res.best_reward, res.original_reward);
    ASSERT_EQ(res.reward_trace.size(), 1u);
}

TEST(Engine, InvariantsHoldEveryIteration) {
    SyntheticSpec spec;
    spec.max_elements = 5;
    const auto recs = generate_synthetic(8, 8, spec);
    for (const auto& rec : recs) {
        MockOptions mo;
        mo.noise = 0.1;
        Rig rig(rec, mo);
        SearchConfig cfg;
        cfg.debug_checks = true;
        cfg.t_max = 200;
        SearchEngine eng(cfg, rig.env);
        double last = -1e9;
        eng.set_iteration_callback([&](const SearchEngine& e) {
            const auto& nodes = e.nodes();
            EXPECT_EQ(nodes.front().visits, e.iteration());
            for (const auto& n : nodes) {
                long sum = n.own_simulations;
                for (int c : n.children) sum += nodes[static_cast<std::size_t>(c)].visits;
                EXPECT_EQ(n.visits, sum);
                EXPECT_LE(static_cast<long>(n.children.size()), widening_limit(n.visits, 2.0, 0.5));
            }
        });
        const auto res = eng.run(rec.claim);
        for (const auto& [it, v] : res.reward_trace) {
            EXPECT_GE(v, last);
            last = v;
        }
        EXPECT_EQ(res.best_reward, res.reward_trace.back().second);
        EXPECT_EQ(res.max_widening_excess <= 0, true);
    }
}

TEST(Engine, RunTwiceIsBitIdentical) {
    SyntheticSpec spec;
    spec.borderline_rate = 0.5;
    const auto rec = generate_synthetic(31, 1, spec).front();
    auto once = [&] {
        MockOptions mo;
        mo.noise = 0.2;
        mo.seed = 4;
        Rig rig(rec, mo);
        SearchConfig cfg;
        cfg.seed = 4;
        SearchEngine eng(cfg, rig.env);
        std::vector<AuditRecord> audit;
        eng.set_audit_sink([&](const AuditRecord& r) { audit.push_back(r); });
        auto res = eng.run(rec.claim);
        return std::make_pair(res, audit);
    };
    const auto a = once();
    const auto b = once();
    EXPECT_EQ(a.first.reward_trace, b.first.reward_trace);
    EXPECT_EQ(a.first.best_claim, b.first.best_claim);
    EXPECT_EQ(a.first.best_path, b.first.best_path);
    EXPECT_EQ(a.second, b.second);
    EXPECT_GT(a.second.size(), 10u);
}

TEST(Engine, StrategySwitchChangesRolloutMode) {
    SyntheticSpec spec;
    spec.max_elements = 4;
    spec.min_disclosed = 1;
    spec.borderline_rate = 0.8;
    const auto recs = generate_synthetic(77, 10, spec);
    bool switched = false;
    for (const auto& rec : recs) {
        MockOptions mo;
        mo.noise = 0.15;
        Rig rig(rec, mo);
        SearchConfig cfg;
        cfg.gating_policy = GatingPolicy::StrategySwitch;
        SearchEngine eng(cfg, rig.env);
        eng.set_audit_sink([&](const AuditRecord& r) {
            if (r.phase == AuditPhase::Backprop && r.detail == "confidence") switched = true;
        });
        eng.run(rec.claim);
    }
    EXPECT_TRUE(switched);
}
