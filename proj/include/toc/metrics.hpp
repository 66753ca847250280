#pragma once

// Evaluation metrics over statuses, texts and agent responses.

#include <string>
#include <string_view>
#include <vector>

#include "toc/agent_json.hpp"

namespace toc {

struct MetricReport {
    double coverage_f1 = 0.0;
    double delta_coverage = 0.0;
    double scope_retention = 0.0;
    double novelty = 0.0;
    double consistency = 0.0;
    double uncertainty = 0.0;
    double rouge_l = 0.0;
    double bleu = 0.0;
    double json_completeness = 1.0;
    double chain_entropy = 0.0;
};

/// F1 of the disclosed class (Disclosed and PartiallyDisclosed are positive).
/// 0 when precision or recall is undefined.
double coverage_f1(const std::vector<DisclosureStatus>& predicted, const std::vector<bool>& gold);

double delta_coverage(double before, double after);

/// Length of the longest common subsequence of two token lists.
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// LCS F-measure over lowercased whitespace tokens; 0 when either side is empty.
double rouge_l(std::string_view candidate, std::string_view reference);

/// BLEU-4, uniform weights, add-one smoothing for n >= 2, standard brevity penalty.
double bleu(std::string_view candidate, std::string_view reference);

/// Fraction of responses accepted by the validator; 1 for an empty list.
double json_completeness(const std::vector<std::string>& raw_responses, AgentSchema schema);

/// Shannon entropy (nats) of the status distribution; 0 for an empty list.
double chain_entropy(const std::vector<ReasoningChain>& chains);

}  // namespace toc
