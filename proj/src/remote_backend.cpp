#include "toc/remote_backend.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "toc/error.hpp"

namespace toc {

RemoteBackend::RemoteBackend(const AgentBackendConfig& cfg) : credential_(cfg.credential), timeout_(cfg.timeout) {
    if (cfg.endpoint.empty()) throw Error(ErrorCode::ConfigError, "remote backend requires an endpoint");
    const auto scheme_end = cfg.endpoint.find("://");
    const auto host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_begin = cfg.endpoint.find('/', host_begin);
    base_url_ = cfg.endpoint.substr(0, path_begin);
    path_ = path_begin == std::string::npos ? "/" : cfg.endpoint.substr(path_begin);
}

std::string RemoteBackend::request_body(const PromptEnvelope& envelope) {
    nlohmann::ordered_json body;
    body["role"] = std::string(to_string(envelope.role));
    body["system_message"] = envelope.system_message;
    body["user_message"] = envelope.user_message;
    body["temperature"] = envelope.temperature;
    if (envelope.seed)
        body["seed"] = *envelope.seed;
    else
        body["seed"] = nullptr;
    return body.dump();
}

std::string RemoteBackend::complete(const PromptEnvelope& envelope) {
    httplib::Client client(base_url_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!credential_.empty()) headers.emplace("Authorization", "Bearer " + credential_);

    auto res = client.Post(path_, headers, request_body(envelope), "application/json");
    if (!res) throw TransportError("request to " + base_url_ + path_ + " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
    return res->body;
}

void apply_environment(AgentBackendConfig& cfg) {
    if (cfg.endpoint.empty())
        if (const char* v = std::getenv("TOC_LLM_ENDPOINT")) cfg.endpoint = v;
    if (cfg.credential.empty())
        if (const char* v = std::getenv("TOC_LLM_API_KEY")) cfg.credential = v;
}

}  // namespace toc
