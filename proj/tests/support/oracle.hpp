#pragma once

// Exhaustive optimum over every valid edit sequence up to a length bound.
// Works directly on the mock backend, the edit algebra and the reward
// functions; it shares no code with the tree search.

#include <algorithm>
#include <functional>
#include <map>
#include <variant>

#include "toc/corpus.hpp"
#include "toc/error.hpp"
#include "toc/mock_backend.hpp"
#include "toc/reward.hpp"

namespace oracle {

using namespace toc;

struct Optimum {
    double reward = 0.0;
    std::string claim;
    std::vector<EditAction> path;
    long states = 0;
    std::size_t max_branching = 0;
};

class Enumerator {
public:
    Enumerator(const CorpusRecord& record, MockOptions opts, RewardWeights weights = {},
               std::vector<EditOperationType> novelty_ops = default_novelty_ops())
        : record_(record), mock_(opts), weights_(weights), novelty_ops_(std::move(novelty_ops)) {
        original_chains_ = chains_of(record_.claim);
    }

    /// A wire round trip keeps the values exactly as an agent would see them.
    ReasoningChain chain_for(const ClaimElement& e) {
        const auto key = e.element_type + "|" + e.text;
        if (auto it = cache_.find(key); it != cache_.end()) {
            auto c = it->second;
            c.element_id = e.element_id;
            return c;
        }
        std::optional<ReasoningChain> best;
        auto rank = [](DisclosureStatus s) {
            return s == DisclosureStatus::Disclosed ? 2 : s == DisclosureStatus::PartiallyDisclosed ? 1 : 0;
        };
        for (const auto& doc : record_.prior_art) {
            auto parsed = validate_agent_json(render_examiner_json(mock_.examine_once(e, doc, 0)), AgentSchema::Examiner);
            auto c = std::get<ReasoningChain>(*parsed.value);
            // Noise-free samples agree, so the K-run dispersion is zero.
            c.uncertainty = 0.0;
            c.human_review = false;
            if (!best || rank(c.status) > rank(best->status) ||
                (rank(c.status) == rank(best->status) && c.confidence > best->confidence))
                best = c;
        }
        if (!best) {
            best = ReasoningChain{};
            best->confidence = 1.0;
        }
        cache_[key] = *best;
        best->element_id = e.element_id;
        return *best;
    }

    std::vector<ReasoningChain> chains_of(const Claim& c) {
        std::vector<ReasoningChain> out;
        for (const auto& e : c.elements) out.push_back(chain_for(e));
        return out;
    }

    double reward_of(const Claim& c, const std::vector<EditAction>& history, const std::vector<ReasoningChain>& chains) {
        return aggregate(
            compute_components(record_.claim, original_chains_, c, chains, history, novelty_ops_), weights_);
    }

    /// Valid successor states: edits planned for disclosed elements that
    /// respect precedence, apply cleanly and change the claim.
    std::vector<std::pair<EditAction, Claim>> successors(const Claim& c, const std::vector<EditAction>& history,
                                                         const std::vector<ReasoningChain>& chains) {
        std::vector<std::pair<EditAction, Claim>> out;
        for (std::size_t i = 0; i < c.elements.size(); ++i) {
            if (chains[i].status == DisclosureStatus::NotDisclosed) continue;
            const auto plan_raw = render_editor_json(mock_.plan(c.elements[i], chains[i]));
            const auto plan = std::get<EditorPlan>(*validate_agent_json(plan_raw, AgentSchema::Editor).value);
            for (const auto& a : plan.operations) {
                auto seq = history;
                seq.push_back(a);
                if (!validate_sequence(seq, default_precedence_rules()).empty()) continue;
                Claim next;
                try {
                    next = apply_action(c, a);
                } catch (const Error&) {
                    continue;
                }
                if (next == c) continue;
                out.emplace_back(a, std::move(next));
            }
        }
        return out;
    }

    Optimum solve(int max_len) {
        Optimum best;
        best.reward = -1e300;
        std::function<void(const Claim&, std::vector<EditAction>&)> dfs = [&](const Claim& c,
                                                                              std::vector<EditAction>& hist) {
            const auto chains = chains_of(c);
            const double r = reward_of(c, hist, chains);
            ++best.states;
            if (r > best.reward) {
                best.reward = r;
                best.claim = c.raw_text;
                best.path = hist;
            }
            if (static_cast<int>(hist.size()) >= max_len) return;
            const auto next = successors(c, hist, chains);
            best.max_branching = std::max(best.max_branching, next.size());
            for (const auto& [a, claim] : next) {
                hist.push_back(a);
                dfs(claim, hist);
                hist.pop_back();
            }
        };
        std::vector<EditAction> hist;
        dfs(record_.claim, hist);
        return best;
    }

private:
    CorpusRecord record_;
    MockBackend mock_;
    RewardWeights weights_;
    std::vector<EditOperationType> novelty_ops_;
    std::vector<ReasoningChain> original_chains_;
    std::map<std::string, ReasoningChain> cache_;
};

}  // namespace oracle
