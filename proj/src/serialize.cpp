#include "toc/serialize.hpp"

#include "toc/error.hpp"

namespace toc {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, std::string>)
        return *v;
    else
        return to_json(*v);
}

Json trace_json(const std::vector<std::pair<long, double>>& trace) {
    Json out = Json::array();
    for (const auto& [it, v] : trace) out.push_back(Json::array({it, v}));
    return out;
}

const Json& at(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("missing key ") + key);
    return j.at(key);
}

}  // namespace

Json to_json(const ClaimElement& e) {
    return Json{{"element_id", e.element_id}, {"element_type", e.element_type}, {"text", e.text}};
}

Json to_json(const Claim& c) {
    Json els = Json::array();
    for (const auto& e : c.elements) els.push_back(to_json(e));
    return Json{{"claim_id", c.claim_id}, {"raw_text", c.raw_text}, {"elements", std::move(els)}};
}

Json to_json(const PriorArtDocument& d) {
    return Json{{"doc_id", d.doc_id},
                {"title", d.title},
                {"description", d.description},
                {"figure_refs", d.figure_refs}};
}

Json to_json(const EditAction& a) {
    return Json{{"operation_type", std::string(to_string(a.op_type))},
                {"target_element_id", a.target_element_id},
                {"modified_text", a.modified_text},
                {"rationale", a.rationale},
                {"confidence", a.confidence}};
}

Json to_json(const ReasoningChain& c) {
    return Json{{"element_id", c.element_id},
                {"status", std::string(to_string(c.status))},
                {"evidence_text", c.evidence_text},
                {"reasoning", c.reasoning},
                {"confidence", c.confidence},
                {"uncertainty", c.uncertainty},
                {"human_review", c.human_review}};
}

Json to_json(const RewardComponents& c) {
    return Json{{"coverage", c.coverage},
                {"scope_penalty", c.scope_penalty},
                {"novelty", c.novelty},
                {"consistency", c.consistency},
                {"uncertainty_penalty", c.uncertainty_penalty}};
}

Json to_json(const RewardWeights& w) {
    return Json{{"w1", w.w1}, {"w2", w.w2}, {"w3", w.w3}, {"w4", w.w4}, {"w5", w.w5}};
}

Json to_json(const AuditRecord& r) {
    Json j{{"iteration", r.iteration}, {"phase", std::string(to_string(r.phase))}, {"node_id", r.node_id}};
    if (r.parent_id) j["parent_id"] = *r.parent_id;
    if (r.step) j["step"] = *r.step;
    if (r.item_id) j["item_id"] = *r.item_id;
    j["action"] = optional_json(r.action);
    j["claim_before"] = optional_json(r.claim_before);
    j["claim_after"] = optional_json(r.claim_after);
    j["chain"] = optional_json(r.chain);
    j["reward_components"] = optional_json(r.reward_components);
    j["reward"] = optional_json(r.reward);
    if (r.sigma_epi) j["sigma_epi"] = *r.sigma_epi;
    if (!r.detail.empty()) j["detail"] = r.detail;
    j["timestamp"] = r.timestamp;
    return j;
}

Json to_json(const SearchResult& r) {
    Json path = Json::array();
    for (const auto& a : r.best_path) path.push_back(to_json(a));
    Json best_chains = Json::array();
    for (const auto& c : r.best_chains) best_chains.push_back(to_json(c));
    Json original_chains = Json::array();
    for (const auto& c : r.original_chains) original_chains.push_back(to_json(c));
    return Json{{"claim_id", r.original_claim.claim_id},
                {"original_claim", to_json(r.original_claim)},
                {"original_chains", std::move(original_chains)},
                {"original_reward", r.original_reward},
                {"best_claim", to_json(r.best_claim)},
                {"best_path", std::move(path)},
                {"best_path_sigmas", r.best_path_sigmas},
                {"best_reward", r.best_reward},
                {"best_components", to_json(r.best_components)},
                {"best_chains", std::move(best_chains)},
                {"reward_trace", trace_json(r.reward_trace)},
                {"termination_reason", std::string(to_string(r.termination_reason))},
                {"interventions", r.interventions},
                {"iterations", r.iterations},
                {"node_count", r.node_count},
                {"committed_high_sigma", r.committed_high_sigma},
                {"max_widening_excess", r.max_widening_excess},
                {"expansion_failures", r.expansion_failures}};
}

Json to_json(const NodeView& n) {
    Json history = Json::array();
    for (const auto& a : n.op_history) history.push_back(to_json(a));
    return Json{{"id", n.id},
                {"parent", n.parent < 0 ? Json(nullptr) : Json(n.parent)},
                {"depth", n.depth},
                {"visits", n.visits},
                {"q_value", n.q_value},
                {"mean_reward", n.visits > 0 ? Json(n.q_value / static_cast<double>(n.visits)) : Json(nullptr)},
                {"sigma_epi", n.sigma_epi},
                {"sigma_ale", n.sigma_ale},
                {"gated", n.gated},
                {"pruned", n.pruned},
                {"terminal", n.terminal},
                {"intervention_state", std::string(to_string(n.intervention_state))},
                {"claim", n.claim_text},
                {"op_history", std::move(history)},
                {"chain", optional_json(n.chain)}};
}

Json to_json(const TreeSnapshot& s) {
    Json nodes = Json::array();
    for (const auto& n : s.nodes) nodes.push_back(to_json(n));
    return Json{{"iteration", s.iteration},
                {"node_count", s.nodes.size()},
                {"nodes", std::move(nodes)},
                {"best_reward", s.best_reward},
                {"best_claim", s.best_claim},
                {"finished", s.finished},
                {"termination_reason",
                 s.termination_reason ? Json(std::string(to_string(*s.termination_reason))) : Json(nullptr)}};
}

Json to_json(const InterventionItem& i) {
    return Json{{"item_id", i.item_id},
                {"node_id", i.node_id},
                {"status", std::string(to_string(i.status))},
                {"chain", to_json(i.chain)},
                {"proposed_action", to_json(i.proposed_action)},
                {"created_iteration", i.created_iteration},
                {"timed_out", i.timed_out}};
}

ClaimElement element_from_json(const Json& j) {
    return {at(j, "element_id").get<std::string>(), at(j, "element_type").get<std::string>(),
            at(j, "text").get<std::string>()};
}

Claim claim_from_json(const Json& j) {
    Claim c;
    c.claim_id = at(j, "claim_id").get<std::string>();
    c.raw_text = at(j, "raw_text").get<std::string>();
    for (const auto& e : at(j, "elements")) c.elements.push_back(element_from_json(e));
    return c;
}

EditAction action_from_json(const Json& j) {
    EditAction a;
    const auto op = at(j, "operation_type").get<std::string>();
    const auto parsed = parse_operation_type(op);
    if (!parsed) throw Error(ErrorCode::InvalidInput, "unknown operation_type " + op);
    a.op_type = *parsed;
    a.target_element_id = at(j, "target_element_id").get<std::string>();
    a.modified_text = at(j, "modified_text").get<std::string>();
    a.rationale = at(j, "rationale").get<std::string>();
    a.confidence = at(j, "confidence").get<double>();
    return a;
}

ReasoningChain chain_from_json(const Json& j) {
    ReasoningChain c;
    c.element_id = at(j, "element_id").get<std::string>();
    const auto st = at(j, "status").get<std::string>();
    const auto parsed = parse_status(st);
    if (!parsed) throw Error(ErrorCode::InvalidInput, "unknown status " + st);
    c.status = *parsed;
    c.evidence_text = at(j, "evidence_text").get<std::string>();
    c.reasoning = at(j, "reasoning").get<std::string>();
    c.confidence = at(j, "confidence").get<double>();
    c.uncertainty = at(j, "uncertainty").get<double>();
    c.human_review = at(j, "human_review").get<bool>();
    return c;
}

RewardComponents components_from_json(const Json& j) {
    return {at(j, "coverage").get<double>(), at(j, "scope_penalty").get<double>(), at(j, "novelty").get<double>(),
            at(j, "consistency").get<double>(), at(j, "uncertainty_penalty").get<double>()};
}

AuditRecord audit_from_json(const Json& j) {
    AuditRecord r;
    r.iteration = at(j, "iteration").get<long>();
    const auto phase = at(j, "phase").get<std::string>();
    const auto parsed = parse_audit_phase(phase);
    if (!parsed) throw Error(ErrorCode::InvalidInput, "unknown audit phase " + phase);
    r.phase = *parsed;
    r.node_id = at(j, "node_id").get<int>();
    if (j.contains("parent_id")) r.parent_id = j.at("parent_id").get<int>();
    if (j.contains("step")) r.step = j.at("step").get<int>();
    if (j.contains("item_id")) r.item_id = j.at("item_id").get<int>();
    if (j.contains("action") && !j.at("action").is_null()) r.action = action_from_json(j.at("action"));
    if (j.contains("claim_before") && !j.at("claim_before").is_null())
        r.claim_before = j.at("claim_before").get<std::string>();
    if (j.contains("claim_after") && !j.at("claim_after").is_null())
        r.claim_after = j.at("claim_after").get<std::string>();
    if (j.contains("chain") && !j.at("chain").is_null()) r.chain = chain_from_json(j.at("chain"));
    if (j.contains("reward_components") && !j.at("reward_components").is_null())
        r.reward_components = components_from_json(j.at("reward_components"));
    if (j.contains("reward") && !j.at("reward").is_null()) r.reward = j.at("reward").get<double>();
    if (j.contains("sigma_epi")) r.sigma_epi = j.at("sigma_epi").get<double>();
    if (j.contains("detail")) r.detail = j.at("detail").get<std::string>();
    r.timestamp = at(j, "timestamp").get<long>();
    return r;
}

std::string audit_line(const AuditRecord& r) { return to_json(r).dump(); }

}  // namespace toc
