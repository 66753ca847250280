#include "toc/agent_json.hpp"

#include <array>
#include <cctype>

#include "json.hpp"

#include "toc/text.hpp"

namespace toc {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kExaminerKeys = {
    "status", "evidence_text", "reasoning", "confidence", "uncertainty", "human_review",
};
constexpr std::array<std::string_view, 1> kEditorKeys = {"operations"};
constexpr std::array<std::string_view, 5> kOperationKeys = {
    "operation_type", "target_element_id", "modified_text", "rationale", "confidence",
};
constexpr std::array<std::string_view, 3> kApplyKeys = {"modified_text", "reasoning", "confidence"};

ValidationResult reject(RejectReason reason, std::string detail) {
    return ValidationResult{std::nullopt, ValidationError{reason, std::move(detail)}};
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Returns the [begin, end) span of the first balanced top-level object, or
// npos when the braces never close.
std::pair<std::size_t, std::size_t> object_span(std::string_view s, std::size_t begin) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = begin; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        if (c == '{') ++depth;
        if (c == '}' && --depth == 0) return {begin, i + 1};
    }
    return {begin, std::string_view::npos};
}

template <std::size_t N>
std::optional<ValidationError> check_keys(const json& obj, const std::array<std::string_view, N>& keys,
                                          std::string_view where) {
    for (auto k : keys)
        if (!obj.contains(k))
            return ValidationError{RejectReason::MissingKey, std::string(where) + ": missing \"" + std::string(k) + "\""};
    for (const auto& [k, _] : obj.items()) {
        bool known = false;
        for (auto expected : keys) known = known || expected == k;
        if (!known) return ValidationError{RejectReason::ExtraKey, std::string(where) + ": unexpected \"" + k + "\""};
    }
    return std::nullopt;
}

std::optional<ValidationError> expect_string(const json& obj, std::string_view key, bool non_empty) {
    const auto& v = obj.at(std::string(key));
    if (!v.is_string()) return ValidationError{RejectReason::BadType, "\"" + std::string(key) + "\" must be a string"};
    if (non_empty && text::trim(v.get_ref<const std::string&>()).empty())
        return ValidationError{RejectReason::EmptyValue, "\"" + std::string(key) + "\" is empty"};
    return std::nullopt;
}

std::optional<ValidationError> expect_unit_float(const json& obj, std::string_view key) {
    const auto& v = obj.at(std::string(key));
    if (!v.is_number()) return ValidationError{RejectReason::BadType, "\"" + std::string(key) + "\" must be a number"};
    const double d = v.get<double>();
    if (!(d >= 0.0 && d <= 1.0))
        return ValidationError{RejectReason::OutOfRange, "\"" + std::string(key) + "\" outside [0, 1]"};
    return std::nullopt;
}

#define TOC_TRY(expr)                                                   \
    if (auto err_ = (expr)) return ValidationResult{std::nullopt, *err_}

ValidationResult parse_examiner(const json& obj) {
    TOC_TRY(check_keys(obj, kExaminerKeys, "examiner"));
    TOC_TRY(expect_string(obj, "status", false));
    TOC_TRY(expect_string(obj, "evidence_text", false));
    TOC_TRY(expect_string(obj, "reasoning", false));
    TOC_TRY(expect_unit_float(obj, "confidence"));
    TOC_TRY(expect_unit_float(obj, "uncertainty"));
    if (!obj.at("human_review").is_boolean()) return reject(RejectReason::BadType, "\"human_review\" must be a boolean");
    auto status = parse_status(obj.at("status").get<std::string>());
    if (!status) return reject(RejectReason::BadEnum, "unknown status \"" + obj.at("status").get<std::string>() + "\"");

    ReasoningChain chain;
    chain.status = *status;
    chain.evidence_text = obj.at("evidence_text").get<std::string>();
    chain.reasoning = obj.at("reasoning").get<std::string>();
    chain.confidence = obj.at("confidence").get<double>();
    chain.uncertainty = obj.at("uncertainty").get<double>();
    chain.human_review = obj.at("human_review").get<bool>();
    const auto evidence = text::trim(chain.evidence_text);
    if (chain.status == DisclosureStatus::Disclosed && (evidence.empty() || evidence == "None"))
        return reject(RejectReason::Inconsistent, "Disclosed status requires evidence_text");
    return {chain, std::nullopt};
}

ValidationResult parse_editor(const json& obj) {
    TOC_TRY(check_keys(obj, kEditorKeys, "editor"));
    const auto& ops = obj.at("operations");
    if (!ops.is_array()) return reject(RejectReason::BadType, "\"operations\" must be a list");
    if (ops.empty()) return reject(RejectReason::EmptyValue, "\"operations\" is empty");
    EditorPlan plan;
    for (const auto& op : ops) {
        if (!op.is_object()) return reject(RejectReason::BadType, "operation entries must be objects");
        TOC_TRY(check_keys(op, kOperationKeys, "operation"));
        TOC_TRY(expect_string(op, "operation_type", false));
        TOC_TRY(expect_string(op, "target_element_id", true));
        TOC_TRY(expect_string(op, "modified_text", true));
        TOC_TRY(expect_string(op, "rationale", false));
        TOC_TRY(expect_unit_float(op, "confidence"));
        auto type = parse_operation_type(op.at("operation_type").get<std::string>());
        if (!type)
            return reject(RejectReason::BadEnum,
                          "unknown operation_type \"" + op.at("operation_type").get<std::string>() + "\"");
        EditAction a;
        a.op_type = *type;
        a.target_element_id = op.at("target_element_id").get<std::string>();
        a.modified_text = op.at("modified_text").get<std::string>();
        a.rationale = op.at("rationale").get<std::string>();
        a.confidence = op.at("confidence").get<double>();
        plan.operations.push_back(std::move(a));
    }
    return {plan, std::nullopt};
}

ValidationResult parse_apply(const json& obj) {
    TOC_TRY(check_keys(obj, kApplyKeys, "apply-op"));
    TOC_TRY(expect_string(obj, "modified_text", true));
    TOC_TRY(expect_string(obj, "reasoning", false));
    TOC_TRY(expect_unit_float(obj, "confidence"));
    AppliedEdit e;
    e.modified_text = obj.at("modified_text").get<std::string>();
    e.reasoning = obj.at("reasoning").get<std::string>();
    e.confidence = obj.at("confidence").get<double>();
    return {e, std::nullopt};
}

#undef TOC_TRY

std::string quote(std::string_view s) { return json(std::string(s)).dump(); }

}  // namespace

std::string_view to_string(DisclosureStatus s) noexcept {
    switch (s) {
        case DisclosureStatus::Disclosed: return "Disclosed";
        case DisclosureStatus::PartiallyDisclosed: return "PartiallyDisclosed";
        case DisclosureStatus::NotDisclosed: return "NotDisclosed";
    }
    return "NotDisclosed";
}

std::optional<DisclosureStatus> parse_status(std::string_view s) noexcept {
    if (s == "Disclosed") return DisclosureStatus::Disclosed;
    if (s == "PartiallyDisclosed") return DisclosureStatus::PartiallyDisclosed;
    if (s == "NotDisclosed") return DisclosureStatus::NotDisclosed;
    return std::nullopt;
}

std::string_view to_string(RejectReason r) noexcept {
    switch (r) {
        case RejectReason::NotJson: return "not-json";
        case RejectReason::TrailingText: return "trailing-text";
        case RejectReason::MissingKey: return "missing-key";
        case RejectReason::ExtraKey: return "extra-key";
        case RejectReason::BadType: return "bad-type";
        case RejectReason::OutOfRange: return "out-of-range";
        case RejectReason::BadEnum: return "bad-enum";
        case RejectReason::EmptyValue: return "empty-value";
        case RejectReason::Inconsistent: return "inconsistent";
    }
    return "unknown";
}

ValidationResult validate_agent_json(std::string_view raw, AgentSchema schema) {
    std::size_t b = 0;
    while (b < raw.size() && is_space(raw[b])) ++b;
    if (b == raw.size()) return reject(RejectReason::NotJson, "empty response");
    if (raw[b] != '{') {
        if (raw.find('{', b) == std::string_view::npos) return reject(RejectReason::NotJson, "no JSON object found");
        return reject(RejectReason::TrailingText, "text before the JSON object");
    }
    auto [begin, end] = object_span(raw, b);
    if (end == std::string_view::npos) return reject(RejectReason::NotJson, "unterminated JSON object");
    for (std::size_t i = end; i < raw.size(); ++i)
        if (!is_space(raw[i])) return reject(RejectReason::TrailingText, "text after the JSON object");

    const json obj = json::parse(raw.substr(begin, end - begin), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) return reject(RejectReason::NotJson, "malformed JSON");

    switch (schema) {
        case AgentSchema::Examiner: return parse_examiner(obj);
        case AgentSchema::Editor: return parse_editor(obj);
        case AgentSchema::ApplyOperation: return parse_apply(obj);
    }
    return reject(RejectReason::NotJson, "unknown schema");
}

std::string render_examiner_json(const ReasoningChain& c) {
    std::string out = "{";
    out += "\"status\": " + quote(to_string(c.status));
    out += ", \"evidence_text\": " + quote(c.evidence_text);
    out += ", \"reasoning\": " + quote(c.reasoning);
    out += ", \"confidence\": " + text::format_2dp(c.confidence);
    out += ", \"uncertainty\": " + text::format_2dp(c.uncertainty);
    out += std::string(", \"human_review\": ") + (c.human_review ? "true" : "false");
    out += "}";
    return out;
}

std::string render_editor_json(const EditorPlan& plan) {
    std::string out = "{\"operations\": [";
    for (std::size_t i = 0; i < plan.operations.size(); ++i) {
        const auto& a = plan.operations[i];
        if (i > 0) out += ", ";
        out += "{\"operation_type\": " + quote(to_string(a.op_type));
        out += ", \"target_element_id\": " + quote(a.target_element_id);
        out += ", \"modified_text\": " + quote(a.modified_text);
        out += ", \"rationale\": " + quote(a.rationale);
        out += ", \"confidence\": " + text::format_2dp(a.confidence) + "}";
    }
    out += "]}";
    return out;
}

std::string render_apply_json(const AppliedEdit& e) {
    std::string out = "{";
    out += "\"modified_text\": " + quote(e.modified_text);
    out += ", \"reasoning\": " + quote(e.reasoning);
    out += ", \"confidence\": " + text::format_2dp(e.confidence);
    out += "}";
    return out;
}

}  // namespace toc
