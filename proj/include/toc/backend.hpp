#pragma once

// Transport-level agent interface. A backend turns a prompt envelope into raw
// response text; the agents layer owns validation, retries and sampling.

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "toc/agent_json.hpp"
#include "toc/claim.hpp"

namespace toc {

enum class AgentRole { Examiner, Editor, ApplyOperation };

std::string_view to_string(AgentRole role) noexcept;

struct ExamineRequest {
    ClaimElement element;
    PriorArtDocument prior_art;
};

struct PlanRequest {
    ClaimElement element;
    ReasoningChain chain;
};

struct ApplyRequest {
    ClaimElement element;
    ReasoningChain chain;
    EditOperationType op_type;
};

/// What goes over the wire is {role, system_message, user_message,
/// temperature, seed}. The structured request rides along for in-process
/// backends and is never serialized.
struct PromptEnvelope {
    AgentRole role = AgentRole::Examiner;
    std::string system_message;
    std::string user_message;
    double temperature = 0.0;
    std::optional<std::uint64_t> seed;
    int sample_index = 0;
    int attempt = 0;
    std::variant<ExamineRequest, PlanRequest, ApplyRequest> request;
};

/// Thrown by backends when the transport itself fails.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AgentBackend {
public:
    virtual ~AgentBackend() = default;

    /// Must be safe to call concurrently.
    virtual std::string complete(const PromptEnvelope& envelope) = 0;
};

enum class BackendKind { Mock, Remote };

struct AgentBackendConfig {
    BackendKind kind = BackendKind::Mock;
    std::string endpoint;
    std::string credential;  // never echoed
    int k_samples = 5;
    double temperature = 0.7;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;
    int threads = 1;
    std::uint64_t seed = 0;
};

/// Throws Error(ConfigError) when the config violates its invariants.
void validate(const AgentBackendConfig& cfg);

// Prompt texts with slot substitution.
std::string examiner_system_message();
std::string examiner_user_message(const ClaimElement& element, const PriorArtDocument& prior_art);
std::string editor_system_message();
std::string editor_plan_message(const ClaimElement& element, const ReasoningChain& chain);
std::string apply_operation_message(const ClaimElement& element, const ReasoningChain& chain,
                                    EditOperationType op_type);

}  // namespace toc
