#pragma once

// Corpus files, prior-art evidence filtering and the seeded synthetic
// corpus generator.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toc/agent_json.hpp"
#include "toc/claim.hpp"

namespace toc {

struct CorpusRecord {
    Claim claim;
    std::vector<PriorArtDocument> prior_art;
    std::optional<std::vector<LabeledInstance>> gold_labels;
};

struct LoadOptions {
    /// Unknown keys are errors in strict mode and warnings otherwise.
    bool strict = true;
    std::vector<std::string>* warnings = nullptr;
};

std::vector<CorpusRecord> parse_corpus(std::string_view json_text, const LoadOptions& opts = {});
std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path, const LoadOptions& opts = {});

/// Canonical JSON (fixed key order, two-space indent, trailing newline).
std::string dump_corpus(const std::vector<CorpusRecord>& records);
void save_corpus(const std::filesystem::path& path, const std::vector<CorpusRecord>& records);

struct EvidencePassage {
    std::string doc_id;
    std::string sentence;
    double score = 0.0;
};

/// Pluggable sentence-similarity backend.
class SimilarityBackend {
public:
    virtual ~SimilarityBackend() = default;
    virtual double similarity(std::string_view a, std::string_view b) const = 0;
};

/// Cosine over term-frequency vectors of content tokens.
double tf_cosine(std::string_view a, std::string_view b);

class TfCosineSimilarity : public SimilarityBackend {
public:
    double similarity(std::string_view a, std::string_view b) const override { return tf_cosine(a, b); }
};

/// Top-k sentences of the description by similarity, ties by position.
std::vector<EvidencePassage> filter_evidence(const ClaimElement& element, const PriorArtDocument& doc, int top_k,
                                             const SimilarityBackend& backend = TfCosineSimilarity{});

struct SyntheticSpec {
    int min_elements = 2;  // including the preamble
    int max_elements = 5;
    int min_docs = 1;
    int max_docs = 2;
    /// Upper bound on Disclosed plus PartiallyDisclosed body elements (0 = no bound).
    int max_disclosed = 0;
    /// Lower bound on disclosed body elements; must fit min_elements.
    int min_disclosed = 0;
    /// Per body element: chance of being disclosed, and of a disclosed one
    /// being partial rather than full.
    double disclosed_rate = 0.5;
    double partial_rate = 0.25;
    /// Chance that a fully disclosed element sits exactly on the upper
    /// threshold (4 of 5 terms matched), so sampling noise splits verdicts.
    double borderline_rate = 0.0;
};

/// Deterministic in seed. Gold labels mark elements disclosed exactly when
/// the mock examiner (noise 0, default thresholds) finds them Disclosed or
/// PartiallyDisclosed.
std::vector<CorpusRecord> generate_synthetic(std::uint64_t seed, int n_records, const SyntheticSpec& spec = {});

}  // namespace toc
