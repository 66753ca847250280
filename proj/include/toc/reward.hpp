#pragma once

// Five reward components, uncertainty decomposition and their linear
// aggregation into one scalar per claim state.

#include <map>
#include <string>
#include <vector>

#include "toc/agent_json.hpp"
#include "toc/claim.hpp"

namespace toc {

struct RewardWeights {
    double w1 = 1.0;  // coverage
    double w2 = 0.5;  // scope penalty
    double w3 = 1.5;  // novelty
    double w4 = 0.8;  // consistency
    double w5 = 0.3;  // uncertainty penalty

    bool operator==(const RewardWeights&) const = default;
};

struct RewardComponents {
    double coverage = 0.0;
    double scope_penalty = 0.0;
    double novelty = 0.0;
    double consistency = 0.0;
    double uncertainty_penalty = 0.0;

    bool operator==(const RewardComponents&) const = default;
};

struct UncertaintyDecomposition {
    double sigma_total = 0.0;
    double sigma_epi = 0.0;
    double sigma_ale = 0.0;
};

inline constexpr std::string_view kRemoved = "removed";

/// Operation types whose NotDisclosed outcome counts as novelty.
std::vector<EditOperationType> default_novelty_ops();

/// Maps each original element id to its surviving revised id: the same id,
/// else its first split piece "<id>.1", else "removed".
std::map<std::string, std::string> align_elements(const Claim& original, const Claim& revised);

/// Share of originally disclosed (D or P) elements whose aligned revised
/// status is NotDisclosed. Removed elements never count as covered.
double compute_coverage(const std::vector<ReasoningChain>& original, const std::vector<ReasoningChain>& revised,
                        const std::map<std::string, std::string>& alignment);

/// 1 - Jaccard of the content-token sets of the two raw texts.
double compute_scope_penalty(const Claim& original, const Claim& revised);

double compute_novelty(const std::vector<EditAction>& actions, const std::vector<ReasoningChain>& revised_chains,
                       const std::vector<EditOperationType>& novelty_ops = default_novelty_ops());

/// 0.5 * [preamble "A/An ... comprising|consisting of"] + 0.5 * share of
/// elements whose rendered segment ends in punctuation and spans 3..80
/// tokens. 0 when the claim has no body element.
double compute_readability(const Claim& claim);

/// Share of definite references ("the X", "said X") whose noun X appeared
/// earlier in the claim outside a definite reference. 1 when there are none.
double compute_coherence(const Claim& claim);

double compute_consistency(const Claim& claim);

double compute_uncertainty_penalty(const std::vector<ReasoningChain>& chains);

UncertaintyDecomposition decompose_uncertainty(double sigma_epi, double confidence);

double aggregate(const RewardComponents& c, const RewardWeights& w);

/// All five components for a revised state against the original.
RewardComponents compute_components(const Claim& original, const std::vector<ReasoningChain>& original_chains,
                                    const Claim& revised, const std::vector<ReasoningChain>& revised_chains,
                                    const std::vector<EditAction>& history,
                                    const std::vector<EditOperationType>& novelty_ops = default_novelty_ops());

}  // namespace toc
