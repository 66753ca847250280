#pragma once

// Claims, prior art and the ten-operation edit algebra.
//
// A claim is an ordered list of elements. The rendered text joins elements
// with ": " after a preamble element and "; " everywhere else, so that
// decompose_claim(render(elements)) reproduces the element texts.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace toc {

inline constexpr std::string_view kPreambleType = "preamble";
inline constexpr std::string_view kSplitMarker = "||";
inline constexpr std::string_view kDropSentinel = "[DROP]";

struct ClaimElement {
    std::string element_id;
    std::string element_type;
    std::string text;

    bool operator==(const ClaimElement&) const = default;
};

struct Claim {
    std::string claim_id;
    std::vector<ClaimElement> elements;
    std::string raw_text;

    const ClaimElement* find(std::string_view element_id) const;
    bool operator==(const Claim&) const = default;
};

struct PriorArtDocument {
    std::string doc_id;
    std::string title;
    std::string description;
    std::vector<std::string> figure_refs;

    bool operator==(const PriorArtDocument&) const = default;
};

enum class EditOperationType {
    AddNovelFeature,
    ReplaceSynonym,
    ReframeViaFigure,
    DropElement,
    MergeElements,
    SplitElement,
    AddLimitation,
    ModifyRelationship,
    ChangeOrder,
    AddDependency,
};

inline constexpr EditOperationType kAllOperationTypes[] = {
    EditOperationType::AddNovelFeature,  EditOperationType::ReplaceSynonym,
    EditOperationType::ReframeViaFigure, EditOperationType::DropElement,
    EditOperationType::MergeElements,    EditOperationType::SplitElement,
    EditOperationType::AddLimitation,    EditOperationType::ModifyRelationship,
    EditOperationType::ChangeOrder,      EditOperationType::AddDependency,
};

std::string_view to_string(EditOperationType op) noexcept;
std::optional<EditOperationType> parse_operation_type(std::string_view s) noexcept;

/// One atomic edit. MergeElements lists its targets comma-separated in
/// target_element_id; ChangeOrder carries the new order (or a two-id swap) as
/// comma-separated ids in modified_text.
struct EditAction {
    EditOperationType op_type = EditOperationType::AddNovelFeature;
    std::string target_element_id;
    std::string modified_text;
    std::string rationale;
    double confidence = 0.0;

    std::vector<std::string> targets() const;
    bool operator==(const EditAction&) const = default;
};

struct PrecedenceRule {
    EditOperationType before;
    EditOperationType after;

    bool operator==(const PrecedenceRule&) const = default;
};

/// { AddNovelFeature before ReplaceSynonym }.
std::vector<PrecedenceRule> default_precedence_rules();

/// True when the "must precede" relation has no cycle.
bool is_acyclic(const std::vector<PrecedenceRule>& rules);

struct PrecedenceViolation {
    std::size_t earlier_index;  // action of the rule's "after" type, placed too early
    std::size_t later_index;    // action of the rule's "before" type, placed too late
    PrecedenceRule rule;
    std::string element_id;

    bool operator==(const PrecedenceViolation&) const = default;
};

struct LabeledInstance {
    ClaimElement element;
    bool disclosed = false;
    std::string evidence;
    std::string justification;
};

std::vector<ClaimElement> decompose_claim(std::string_view raw_text);

/// Builds a claim from raw text; ids are e1..en.
Claim make_claim(std::string claim_id, std::string_view raw_text);

std::string render(const std::vector<ClaimElement>& elements);

/// Re-renders raw_text from elements.
Claim with_elements(const Claim& base, std::vector<ClaimElement> elements);

Claim apply_action(const Claim& claim, const EditAction& action);

std::vector<PrecedenceViolation> validate_sequence(const std::vector<EditAction>& history,
                                                   const std::vector<PrecedenceRule>& rules);

struct TokenEdit {
    enum class Kind { Keep, Insert, Delete };
    Kind kind;
    std::string token;

    bool operator==(const TokenEdit&) const = default;
};

struct ClaimDiff {
    std::vector<std::string> added;
    std::vector<std::string> removed;
    std::vector<std::string> modified;
    bool reordered = false;
    std::vector<TokenEdit> tokens;

    bool empty() const;
    std::vector<std::string> inserted_tokens() const;
    std::vector<std::string> deleted_tokens() const;
};

ClaimDiff diff_claims(const Claim& a, const Claim& b);

/// Element text split into body and trailing period (if any).
std::pair<std::string, std::string> split_terminal(std::string_view text);

}  // namespace toc
