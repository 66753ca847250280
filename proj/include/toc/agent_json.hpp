#pragma once

// Wire types exchanged with examiner/editor backends and the strict
// validator that guards every response.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "toc/claim.hpp"

namespace toc {

enum class DisclosureStatus { Disclosed, PartiallyDisclosed, NotDisclosed };

std::string_view to_string(DisclosureStatus s) noexcept;
std::optional<DisclosureStatus> parse_status(std::string_view s) noexcept;

/// Disclosed and PartiallyDisclosed both count as "disclosed" for editing
/// and for coverage metrics.
inline bool is_disclosed(DisclosureStatus s) { return s != DisclosureStatus::NotDisclosed; }

inline constexpr double kHumanReviewThreshold = 0.2;

struct ReasoningChain {
    std::string element_id;  // not part of the examiner payload; filled by the caller
    DisclosureStatus status = DisclosureStatus::NotDisclosed;
    std::string evidence_text = "None";
    std::string reasoning;
    double confidence = 0.0;
    double uncertainty = 0.0;
    bool human_review = false;

    bool operator==(const ReasoningChain&) const = default;
};

/// human_review := uncertainty > 0.2
inline bool needs_human_review(double uncertainty) { return uncertainty > kHumanReviewThreshold; }

struct EditorPlan {
    std::vector<EditAction> operations;

    bool operator==(const EditorPlan&) const = default;
};

/// Result of the single-operation prompt.
struct AppliedEdit {
    std::string modified_text;
    std::string reasoning;
    double confidence = 0.0;

    bool operator==(const AppliedEdit&) const = default;
};

enum class AgentSchema { Examiner, Editor, ApplyOperation };

enum class RejectReason {
    NotJson,
    TrailingText,
    MissingKey,
    ExtraKey,
    BadType,
    OutOfRange,
    BadEnum,
    EmptyValue,
    Inconsistent,
};

std::string_view to_string(RejectReason r) noexcept;

struct ValidationError {
    RejectReason reason;
    std::string detail;
};

using AgentPayload = std::variant<ReasoningChain, EditorPlan, AppliedEdit>;

struct ValidationResult {
    std::optional<AgentPayload> value;
    std::optional<ValidationError> error;

    bool ok() const { return value.has_value(); }
};

/// Accepts exactly one JSON object with the documented key set for the
/// schema. Any text before or after the object (markdown fences, prose) is
/// rejected as trailing-text.
ValidationResult validate_agent_json(std::string_view raw, AgentSchema schema);

/// Canonical emission: documented key order, floats with two decimals.
std::string render_examiner_json(const ReasoningChain& chain);
std::string render_editor_json(const EditorPlan& plan);
std::string render_apply_json(const AppliedEdit& edit);

}  // namespace toc
