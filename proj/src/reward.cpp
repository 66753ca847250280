#include "toc/reward.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "toc/error.hpp"
#include "toc/text.hpp"

namespace toc {

namespace {

const ReasoningChain* find_chain(const std::vector<ReasoningChain>& chains, std::string_view id) {
    for (const auto& c : chains)
        if (c.element_id == id) return &c;
    return nullptr;
}

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::vector<EditOperationType> default_novelty_ops() {
    return {EditOperationType::AddNovelFeature, EditOperationType::AddLimitation, EditOperationType::ReframeViaFigure,
            EditOperationType::ModifyRelationship};
}

std::map<std::string, std::string> align_elements(const Claim& original, const Claim& revised) {
    std::map<std::string, std::string> out;
    for (const auto& e : original.elements) {
        if (revised.find(e.element_id))
            out[e.element_id] = e.element_id;
        else if (auto piece = e.element_id + ".1"; revised.find(piece))
            out[e.element_id] = piece;
        else
            out[e.element_id] = std::string(kRemoved);
    }
    return out;
}

double compute_coverage(const std::vector<ReasoningChain>& original, const std::vector<ReasoningChain>& revised,
                        const std::map<std::string, std::string>& alignment) {
    int disclosed = 0;
    int covered = 0;
    for (const auto& chain : original) {
        if (!is_disclosed(chain.status)) continue;
        ++disclosed;
        auto it = alignment.find(chain.element_id);
        if (it == alignment.end())
            throw Error(ErrorCode::InvalidInput, "alignment has no entry for " + chain.element_id);
        if (it->second == kRemoved) continue;
        const auto* r = find_chain(revised, it->second);
        if (!r) throw Error(ErrorCode::InvalidInput, "alignment references unknown id " + it->second);
        if (r->status == DisclosureStatus::NotDisclosed) ++covered;
    }
    return disclosed == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(disclosed);
}

double compute_scope_penalty(const Claim& original, const Claim& revised) {
    const auto a = text::content_token_set(original.raw_text);
    const auto b = text::content_token_set(revised.raw_text);
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& t : a) inter += b.contains(t) ? 1 : 0;
    const auto uni = a.size() + b.size() - inter;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double compute_novelty(const std::vector<EditAction>& actions, const std::vector<ReasoningChain>& revised_chains,
                       const std::vector<EditOperationType>& novelty_ops) {
    // Element id -> whether any of its edits is novelty-eligible.
    std::map<std::string, bool> edited;
    for (const auto& a : actions) {
        if (a.op_type == EditOperationType::ChangeOrder) continue;
        const bool eligible = std::find(novelty_ops.begin(), novelty_ops.end(), a.op_type) != novelty_ops.end();
        for (const auto& id : a.targets()) edited[id] = edited[id] || eligible;
    }
    if (edited.empty()) return 0.0;
    int novel = 0;
    for (const auto& [id, eligible] : edited) {
        if (!eligible) continue;
        const auto* c = find_chain(revised_chains, id);
        if (!c) c = find_chain(revised_chains, id + ".1");
        if (c && c->status == DisclosureStatus::NotDisclosed) ++novel;
    }
    return static_cast<double>(novel) / static_cast<double>(edited.size());
}

double compute_readability(const Claim& claim) {
    const auto& els = claim.elements;
    const bool has_body = std::any_of(els.begin(), els.end(), [](const ClaimElement& e) {
        return e.element_type != kPreambleType;
    });
    if (!has_body) return 0.0;

    double preamble = 0.0;
    if (els.front().element_type == kPreambleType) {
        const auto words = text::word_tokens(els.front().text);
        const auto& first = els.front().text;
        const bool article = text::starts_with_ci(first, "a ") || text::starts_with_ci(first, "an ");
        const bool transition =
            (!words.empty() && words.back() == "comprising") ||
            (words.size() >= 2 && words[words.size() - 2] == "consisting" && words.back() == "of");
        preamble = article && transition ? 1.0 : 0.0;
    }

    int good = 0;
    for (std::size_t i = 0; i < els.size(); ++i) {
        const auto t = text::trim(els[i].text);
        // Punctuation that closes the segment in the rendered claim.
        char closing = '\0';
        if (i + 1 < els.size())
            closing = els[i].element_type == kPreambleType ? ':' : ';';
        else if (!t.empty())
            closing = t.back() == '.' ? '.' : '\0';
        const auto n = text::whitespace_tokens(t).size();
        if (closing != '\0' && n >= 3 && n <= 80) ++good;
    }
    return 0.5 * preamble + 0.5 * static_cast<double>(good) / static_cast<double>(els.size());
}

double compute_coherence(const Claim& claim) {
    const auto tokens = text::word_tokens(claim.raw_text);
    std::set<std::string> introduced;
    int refs = 0;
    int supported = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if ((t == "the" || t == "said") && i + 1 < tokens.size() && !text::is_stop_word(tokens[i + 1])) {
            ++refs;
            supported += introduced.contains(tokens[i + 1]) ? 1 : 0;
            ++i;
            continue;
        }
        if (!text::is_stop_word(t)) introduced.insert(t);
    }
    return refs == 0 ? 1.0 : static_cast<double>(supported) / static_cast<double>(refs);
}

double compute_consistency(const Claim& claim) {
    if (claim.elements.empty()) return 0.0;
    return compute_readability(claim) * compute_coherence(claim);
}

double compute_uncertainty_penalty(const std::vector<ReasoningChain>& chains) {
    if (chains.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& c : chains) sum += c.uncertainty;
    return sum / static_cast<double>(chains.size());
}

UncertaintyDecomposition decompose_uncertainty(double sigma_epi, double confidence) {
    if (!in_unit(sigma_epi) || !in_unit(confidence))
        throw Error(ErrorCode::InvalidInput, "sigma_epi and confidence must lie in [0,1]");
    UncertaintyDecomposition d;
    d.sigma_epi = sigma_epi;
    d.sigma_ale = 1.0 - confidence;
    d.sigma_total = d.sigma_epi + d.sigma_ale;
    return d;
}

double aggregate(const RewardComponents& c, const RewardWeights& w) {
    return w.w1 * c.coverage - w.w2 * c.scope_penalty + w.w3 * c.novelty + w.w4 * c.consistency -
           w.w5 * c.uncertainty_penalty;
}

RewardComponents compute_components(const Claim& original, const std::vector<ReasoningChain>& original_chains,
                                    const Claim& revised, const std::vector<ReasoningChain>& revised_chains,
                                    const std::vector<EditAction>& history,
                                    const std::vector<EditOperationType>& novelty_ops) {
    RewardComponents c;
    c.coverage = compute_coverage(original_chains, revised_chains, align_elements(original, revised));
    c.scope_penalty = compute_scope_penalty(original, revised);
    c.novelty = compute_novelty(history, revised_chains, novelty_ops);
    c.consistency = compute_consistency(revised);
    c.uncertainty_penalty = compute_uncertainty_penalty(revised_chains);
    return c;
}

}  // namespace toc
