#include "toc/mock_backend.hpp"

#include <algorithm>
#include <cmath>

#include "toc/text.hpp"

namespace toc {

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

bool contains_phrase(std::string_view text, std::string_view phrase) {
    return text::to_lower(text).find(text::to_lower(phrase)) != std::string::npos;
}

bool has_any(std::string_view text, const std::vector<std::string>& bank) {
    return std::any_of(bank.begin(), bank.end(), [&](const std::string& p) { return contains_phrase(text, p); });
}

// Cue words steering each bank entry (same order as the banks); an element
// mentioning a cue gets that entry, anything else a hash-chosen one.
const std::vector<std::vector<std::string>>& novel_cues() {
    static const std::vector<std::vector<std::string>> cues = {
        {"image", "images", "pixel", "camera", "filter"},
        {"data", "packet", "memory", "storage", "transmit"},
        {"temperature", "heat", "thermal", "power"},
        {"signal", "monitor", "sensor", "measure"},
    };
    return cues;
}

const std::vector<std::vector<std::string>>& limitation_cues() {
    static const std::vector<std::vector<std::string>> cues = {
        {"image", "images", "pixel", "camera", "filter", "enhancement"},
        {"transmit", "network", "channel", "data", "packet"},
        {"sensor", "detector", "measure", "calibration"},
        {"output", "sample", "samples", "signal"},
    };
    return cues;
}

const std::string& pick(const std::vector<std::string>& bank, const std::vector<std::vector<std::string>>& cues,
                        std::string_view text) {
    const auto tokens = text::content_token_set(text);
    for (std::size_t i = 0; i < bank.size() && i < cues.size(); ++i)
        for (const auto& cue : cues[i])
            if (tokens.contains(cue)) return bank[i];
    std::string key;
    for (const auto& t : text::content_tokens(text)) key += t + " ";
    return bank[text::mix64(text::fnv1a(key)) % bank.size()];
}

std::string append_clause(std::string_view text, std::string_view clause) {
    auto [body, terminal] = split_terminal(text);
    return body + ", " + std::string(clause) + terminal;
}

// Whole-word, case-insensitive search.
std::size_t find_word_phrase(std::string_view text, std::string_view phrase) {
    const auto lower = text::to_lower(text);
    const auto needle = text::to_lower(phrase);
    auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    for (std::size_t pos = lower.find(needle); pos != std::string::npos; pos = lower.find(needle, pos + 1)) {
        const bool left_ok = pos == 0 || !is_word(lower[pos - 1]);
        const bool right_ok = pos + needle.size() == lower.size() || !is_word(lower[pos + needle.size()]);
        if (left_ok && right_ok) return pos;
    }
    return std::string::npos;
}

std::string split_payload(std::string_view text) {
    const auto t = text::trim(text);
    if (auto pos = t.find(" and "); pos != std::string::npos)
        return text::trim(std::string_view(t).substr(0, pos)) + " " + std::string(kSplitMarker) + " " +
               text::trim(std::string_view(t).substr(pos + 1));
    if (auto pos = t.find(", "); pos != std::string::npos)
        return text::trim(std::string_view(t).substr(0, pos)) + " " + std::string(kSplitMarker) + " " +
               text::trim(std::string_view(t).substr(pos + 2));
    return t + " " + std::string(kSplitMarker) + " " + t;
}

}  // namespace

double containment(std::string_view element_text, std::string_view sentence) {
    const auto element = text::content_token_set(element_text);
    if (element.empty()) return 0.0;
    const auto other = text::content_token_set(sentence);
    std::size_t hit = 0;
    for (const auto& t : element) hit += other.contains(t) ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(element.size());
}

SentenceMatch best_sentence(std::string_view element_text, std::string_view description) {
    SentenceMatch best;
    bool first = true;
    for (auto& s : text::split_sentences(description)) {
        const double score = containment(element_text, s);
        if (first || score > best.score) {
            best = {std::move(s), score};
            first = false;
        }
    }
    return best;
}

DisclosureStatus status_for_score(double score, const MockOptions& opts) {
    if (score >= opts.theta_hi) return DisclosureStatus::Disclosed;
    if (score >= opts.theta_lo) return DisclosureStatus::PartiallyDisclosed;
    return DisclosureStatus::NotDisclosed;
}

const std::vector<std::string>& novel_feature_bank() {
    static const std::vector<std::string> bank = {
        "and perform adaptive contrast enhancement",
        "and compute a redundancy checksum automatically",
        "and execute predictive thermal compensation",
        "and maintain a rolling anomaly score",
    };
    return bank;
}

const std::vector<std::string>& limitation_bank() {
    static const std::vector<std::string> bank = {
        "wherein the enhancement is performed only on grayscale images",
        "wherein operation is restricted to encrypted channels",
        "wherein calibration is repeated at fixed intervals",
        "wherein output is limited to verified samples",
    };
    return bank;
}

const std::vector<std::pair<std::string, std::string>>& synonym_table() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"apply a filter to the image", "process the image"},
        {"receive", "acquire"},
        {"processor", "processing unit"},
        {"transmit", "send"},
        {"memory", "storage medium"},
        {"sensor", "detector"},
        {"display", "screen"},
        {"determine", "ascertain"},
        {"store", "retain"},
        {"measure", "sense"},
        {"signal", "indication"},
        {"controller", "control circuit"},
    };
    return table;
}

std::optional<std::string> substitute_synonym(std::string_view text) {
    for (const auto& [from, to] : synonym_table()) {
        const auto pos = find_word_phrase(text, from);
        if (pos == std::string::npos) continue;
        std::string out(text);
        out.replace(pos, from.size(), to);
        return out;
    }
    return std::nullopt;
}

ReasoningChain MockBackend::examine_once(const ClaimElement& element, const PriorArtDocument& doc,
                                         std::uint64_t sample_seed) const {
    ReasoningChain chain;
    chain.element_id = element.element_id;
    if (opts_.constant_disclosed) {
        chain.status = DisclosureStatus::Disclosed;
        chain.evidence_text = element.text;
        chain.reasoning = "Editor-only configuration: every element is treated as disclosed.";
        chain.confidence = 1.0;
        return chain;
    }

    const auto match = best_sentence(element.text, doc.description);
    double score = match.score;
    if (opts_.noise > 0.0) {
        const auto h = text::mix64(text::fnv1a(element.text + "\x1f" + doc.doc_id) ^ text::mix64(sample_seed ^ opts_.seed));
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        score = std::clamp(score + (2.0 * u - 1.0) * opts_.noise, 0.0, 1.0);
    }
    score = round2(score);

    chain.status = status_for_score(score, opts_);
    chain.confidence = score;
    const auto element_tokens = text::content_token_set(element.text).size();
    const auto matched = static_cast<std::size_t>(std::lround(match.score * static_cast<double>(element_tokens)));
    if (chain.status == DisclosureStatus::NotDisclosed || match.sentence.empty()) {
        chain.status = DisclosureStatus::NotDisclosed;
        chain.evidence_text = "None";
        chain.reasoning = "No passage of " + doc.doc_id + " teaches the element; best overlap " +
                          text::format_2dp(score) + ".";
    } else {
        chain.evidence_text = match.sentence;
        chain.reasoning = "Matched " + std::to_string(matched) + " of " + std::to_string(element_tokens) +
                          " content terms of " + element.element_id + " in " + doc.doc_id + " (overlap " +
                          text::format_2dp(score) + ").";
    }
    return chain;
}

AppliedEdit MockBackend::apply(const ClaimElement& element, EditOperationType op) const {
    AppliedEdit e;
    e.confidence = opts_.editor_confidence;
    switch (op) {
        case EditOperationType::AddNovelFeature:
            e.modified_text = append_clause(element.text, pick(novel_feature_bank(), novel_cues(), element.text));
            e.reasoning = "Introduce novel technical content to improve distinctiveness.";
            break;
        case EditOperationType::AddLimitation:
            e.modified_text = append_clause(element.text, pick(limitation_bank(), limitation_cues(), element.text));
            e.reasoning = "Restrict technical scope to reinforce inventive distinction.";
            break;
        case EditOperationType::ReplaceSynonym:
            e.modified_text = substitute_synonym(element.text).value_or(element.text);
            e.reasoning = "Improve clarity and broaden scope using alternate terminology.";
            break;
        case EditOperationType::ReframeViaFigure:
            e.modified_text = append_clause(element.text, kFigureClause);
            e.reasoning = "Anchor the element to the disclosed embodiment of the figure.";
            break;
        case EditOperationType::DropElement:
            e.modified_text = std::string(kDropSentinel);
            e.reasoning = "Remove the element that is fully anticipated.";
            break;
        case EditOperationType::MergeElements:
            e.modified_text = element.text;
            e.reasoning = "Merging requires sibling elements; text left unchanged.";
            break;
        case EditOperationType::SplitElement:
            e.modified_text = split_payload(element.text);
            e.reasoning = "Separate compound limitations so each can be examined alone.";
            break;
        case EditOperationType::ModifyRelationship:
            if (auto pos = find_word_phrase(element.text, "configured to"); pos != std::string::npos) {
                e.modified_text = element.text;
                e.modified_text.replace(pos, std::string_view("configured to").size(), "operable to");
            } else {
                e.modified_text = append_clause(element.text, "in operative communication with a control unit");
            }
            e.reasoning = "Recast the functional relationship between components.";
            break;
        case EditOperationType::ChangeOrder:
            e.modified_text = element.element_id + "," + element.element_id;
            e.reasoning = "Element order left unchanged.";
            break;
        case EditOperationType::AddDependency:
            e.modified_text = "dependent upon a preceding element";
            e.reasoning = "Tie the element to a preceding element.";
            break;
    }
    return e;
}

EditorPlan MockBackend::plan(const ClaimElement& element, const ReasoningChain& chain) const {
    std::vector<EditOperationType> preferred;
    if (chain.status == DisclosureStatus::PartiallyDisclosed)
        preferred = {EditOperationType::AddLimitation, EditOperationType::AddNovelFeature,
                     EditOperationType::ReplaceSynonym};
    else
        preferred = {EditOperationType::AddNovelFeature, EditOperationType::AddLimitation,
                     EditOperationType::ReplaceSynonym};

    auto available = [&](EditOperationType op) {
        switch (op) {
            case EditOperationType::AddNovelFeature: return !has_any(element.text, novel_feature_bank());
            case EditOperationType::AddLimitation: return !has_any(element.text, limitation_bank());
            case EditOperationType::ReplaceSynonym: return substitute_synonym(element.text).has_value();
            case EditOperationType::ReframeViaFigure: return !contains_phrase(element.text, kFigureClause);
            default: return true;
        }
    };

    std::vector<EditOperationType> chosen;
    for (auto op : preferred)
        if (available(op)) chosen.push_back(op);
    if (chosen.empty()) {
        if (available(EditOperationType::ReframeViaFigure))
            chosen.push_back(EditOperationType::ReframeViaFigure);
        else
            chosen.push_back(EditOperationType::DropElement);
    }
    if (opts_.max_plan_ops > 0 && chosen.size() > static_cast<std::size_t>(opts_.max_plan_ops))
        chosen.resize(static_cast<std::size_t>(opts_.max_plan_ops));

    EditorPlan plan;
    for (auto op : chosen) {
        auto applied = apply(element, op);
        EditAction a;
        a.op_type = op;
        a.target_element_id = element.element_id;
        a.modified_text = std::move(applied.modified_text);
        a.rationale = std::move(applied.reasoning);
        a.confidence = opts_.editor_confidence;
        plan.operations.push_back(std::move(a));
    }
    return plan;
}

std::string MockBackend::complete(const PromptEnvelope& envelope) {
    const std::uint64_t sample_seed = envelope.seed.value_or(static_cast<std::uint64_t>(envelope.sample_index));
    return std::visit(
        [&](const auto& req) -> std::string {
            using T = std::decay_t<decltype(req)>;
            if constexpr (std::is_same_v<T, ExamineRequest>) {
                return render_examiner_json(examine_once(req.element, req.prior_art, sample_seed));
            } else if constexpr (std::is_same_v<T, PlanRequest>) {
                return render_editor_json(plan(req.element, req.chain));
            } else {
                return render_apply_json(apply(req.element, req.op_type));
            }
        },
        envelope.request);
}

}  // namespace toc
