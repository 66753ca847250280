#include "toc/backend.hpp"
#include "toc/error.hpp"

namespace toc {

std::string_view to_string(AgentRole role) noexcept {
    switch (role) {
        case AgentRole::Examiner: return "examiner";
        case AgentRole::Editor: return "editor";
        case AgentRole::ApplyOperation: return "apply-operation";
    }
    return "examiner";
}

void validate(const AgentBackendConfig& cfg) {
    if (cfg.k_samples < 1) throw Error(ErrorCode::ConfigError, "k_samples must be >= 1");
    if (cfg.temperature < 0.0) throw Error(ErrorCode::ConfigError, "temperature must be >= 0");
    if (cfg.max_retries < 0) throw Error(ErrorCode::ConfigError, "max_retries must be >= 0");
    if (cfg.threads < 1) throw Error(ErrorCode::ConfigError, "threads must be >= 1");
    if (cfg.kind == BackendKind::Remote && cfg.endpoint.empty())
        throw Error(ErrorCode::ConfigError, "remote backend requires an endpoint");
}

std::string examiner_system_message() {
    return "You are a professional patent examiner with extensive experience in patent examination. "
           "Your tasks are:\n"
           "1. Carefully analyze the technical features of the claim\n"
           "2. Search for corresponding technical content in the prior art\n"
           "3. Determine whether the claim is disclosed by the prior art\n"
           "4. Provide a detailed reasoning process and evidence\n"
           "5. Assess the confidence of the examination result\n"
           "Please strictly provide your response in the required JSON format.";
}

std::string examiner_user_message(const ClaimElement& element, const PriorArtDocument& prior_art) {
    std::string m =
        "As a professional patent examiner, please determine whether the following claim element is "
        "disclosed by the given prior art document. Based on the content of the prior art and your "
        "professional judgment, output a structured conclusion.\n\n";
    m += "[Claim Element]\n";
    m += "ID: " + element.element_id + "\n";
    m += "Type: " + element.element_type + "\n";
    m += "Text: " + element.text + "\n\n";
    m += "[Prior Art Content]\n";
    m += prior_art.description + "\n";
    if (!prior_art.figure_refs.empty()) {
        m += "Figures:";
        for (const auto& f : prior_art.figure_refs) m += " " + f;
        m += "\n";
    }
    m += "\nSTRICTLY output the following JSON (no markdown, no backticks):\n"
         "{\n"
         "  \"status\": \"Disclosed|PartiallyDisclosed|NotDisclosed\",\n"
         "  \"evidence_text\": \"verbatim quote(s) from prior art or 'None'\",\n"
         "  \"reasoning\": \"concise reasoning (<120 words) with equivalence mapping\",\n"
         "  \"confidence\": 0.00,\n"
         "  \"uncertainty\": 0.00,\n"
         "  \"human_review\": false\n"
         "}\n\n"
         "Notes:\n"
         "- \"status\" is a single label (case-sensitive).\n"
         "- \"confidence\" in [0.00, 1.00].\n"
         "- \"uncertainty\" in [0.00, 1.00] and denotes epistemic variance (K stochastic runs).\n"
         "- Set \"human_review\": true iff uncertainty > 0.20 (sigma-epi gating threshold).\n"
         "- Use exact quotes for \"evidence_text\" when available; otherwise \"None\".\n"
         "- Output only valid JSON; double quotes; floats with 2 decimals.\n\n"
         "Ensure the output is complete, accurate, and professional.";
    return m;
}

std::string editor_system_message() {
    return "You are a professional patent attorney with extensive experience in patent drafting and "
           "amendment. Your tasks are:\n"
           "1. Analyze the disclosure status of claim elements\n"
           "2. Select appropriate edit operations\n"
           "3. Modify the claim to avoid being disclosed by the prior art\n"
           "4. Maintain the integrity and feasibility of the technical solution\n"
           "5. Preserve an appropriate scope of protection\n"
           "Please strictly provide your response in the required JSON format.";
}

std::string editor_plan_message(const ClaimElement& element, const ReasoningChain& chain) {
    std::string m = "Please modify the following disclosed claim element to avoid being disclosed by the prior art:\n\n";
    m += "Original Claim Element:\n";
    m += "ID: " + element.element_id + "\n";
    m += "Type: " + element.element_type + "\n";
    m += "Text: " + element.text + "\n\n";
    m += "Disclosure Information:\n";
    m += "Status: " + std::string(to_string(chain.status)) + "\n";
    m += "Evidence: " + chain.evidence_text + "\n";
    m += "Reasoning: " + chain.reasoning + "\n\n";
    m += "Available Edit Operations:\n";
    for (auto op : kAllOperationTypes) m += "- " + std::string(to_string(op)) + "\n";
    m += "\nSTRICTLY output the following JSON:\n"
         "{\n"
         "  \"operations\": [\n"
         "    {\n"
         "      \"operation_type\": \"<one of the Allowed Atomic Operations>\",\n"
         "      \"target_element_id\": \"" + element.element_id + "\",\n"
         "      \"modified_text\": \"revised text for this element only\",\n"
         "      \"rationale\": \"how it breaks mapped evidence while preserving scope\",\n"
         "      \"confidence\": 0.00\n"
         "    }\n"
         "  ]\n"
         "}\n\n"
         "Rules:\n"
         "- Use only the enumerated operation_type values (exact spellings).\n"
         "- \"modified_text\" must be legally styled, non-trivial, and feasible.\n"
         "- Prefer minimal change that defeats the cited evidence.\n"
         "- confidence in [0.00, 1.00], 2 decimals. No extra keys.";
    return m;
}

std::string apply_operation_message(const ClaimElement& element, const ReasoningChain& chain,
                                    EditOperationType op_type) {
    std::string m = "Please apply the specified edit operation to modify the claim element:\n\n";
    m += "Original Element:\n";
    m += "ID: " + element.element_id + "\n";
    m += "Text: " + element.text + "\n\n";
    m += "Disclosure Information:\n";
    m += chain.reasoning + "\n\n";
    m += "Edit Operation Type: " + std::string(to_string(op_type)) + "\n\n";
    m += "Please provide the modified text and reasoning in the following format:\n"
         "{\n"
         "  \"modified_text\": \"Modified text\",\n"
         "  \"reasoning\": \"Reason for modification\",\n"
         "  \"confidence\": 0.85\n"
         "}";
    return m;
}

}  // namespace toc
