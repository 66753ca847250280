#pragma once

#include <string>

#include "toc/backend.hpp"

namespace toc {

/// POSTs {role, system_message, user_message, temperature, seed} as JSON to
/// the configured endpoint and hands the response body back untouched.
class RemoteBackend : public AgentBackend {
public:
    explicit RemoteBackend(const AgentBackendConfig& cfg);

    std::string complete(const PromptEnvelope& envelope) override;

    /// Body sent for an envelope; exposed for wire-format tests.
    static std::string request_body(const PromptEnvelope& envelope);

private:
    std::string base_url_;
    std::string path_;
    std::string credential_;
    std::chrono::milliseconds timeout_;
};

/// Fills endpoint/credential from TOC_LLM_ENDPOINT / TOC_LLM_API_KEY when unset.
void apply_environment(AgentBackendConfig& cfg);

}  // namespace toc
