#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toc {

enum class ErrorCode {
    InvalidInput,
    TargetNotFound,
    ScopeDestroying,
    InvalidAction,
    AgentFailure,
    TransportFailure,
    NothingToEdit,
    ExpansionFailure,
    LoadError,
    ConfigError,
    InternalInvariant,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace toc
