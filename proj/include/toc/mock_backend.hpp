#pragma once

// Deterministic in-process backend. The examiner scores token containment
// of an element in each prior-art sentence; the editor applies fixed
// templates. Same inputs always give the same bytes.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "toc/backend.hpp"

namespace toc {

struct MockOptions {
    double theta_hi = 0.8;
    double theta_lo = 0.4;
    /// Half-width of the uniform perturbation applied to each sample's score.
    double noise = 0.0;
    std::uint64_t seed = 0;
    int max_plan_ops = 3;
    double editor_confidence = 0.80;
    /// Editor-only ablation: the examiner always answers Disclosed.
    bool constant_disclosed = false;
};

/// Fraction of the element's distinct content tokens present in the sentence.
double containment(std::string_view element_text, std::string_view sentence);

struct SentenceMatch {
    std::string sentence;  // empty when the description has no sentences
    double score = 0.0;
};

/// Best-scoring sentence; ties go to the earlier sentence.
SentenceMatch best_sentence(std::string_view element_text, std::string_view description);

DisclosureStatus status_for_score(double score, const MockOptions& opts);

// Template banks exposed for tests and the synthetic corpus generator.
const std::vector<std::string>& novel_feature_bank();
const std::vector<std::string>& limitation_bank();
const std::vector<std::pair<std::string, std::string>>& synonym_table();
inline constexpr std::string_view kFigureClause = "as depicted in FIG. 1";

/// Applies the first synonym-table entry found in the text; nullopt if none applies.
std::optional<std::string> substitute_synonym(std::string_view text);

class MockBackend : public AgentBackend {
public:
    explicit MockBackend(MockOptions opts = {}) : opts_(opts) {}

    std::string complete(const PromptEnvelope& envelope) override;

    ReasoningChain examine_once(const ClaimElement& element, const PriorArtDocument& doc,
                                std::uint64_t sample_seed) const;
    EditorPlan plan(const ClaimElement& element, const ReasoningChain& chain) const;
    AppliedEdit apply(const ClaimElement& element, EditOperationType op) const;

    const MockOptions& options() const { return opts_; }

private:
    MockOptions opts_;
};

}  // namespace toc
