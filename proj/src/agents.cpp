#include "toc/agents.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <map>
#include <tuple>

#include "toc/text.hpp"

namespace toc {

namespace {

using PayloadCheck = std::function<std::optional<std::string>(const AgentPayload&)>;

struct CallFailure {
    bool transport = false;
    std::string detail;
};

// One logical call: first attempt plus up to max_retries re-prompts.
// Does not touch the failure counter; callers count once per exhausted call.
AgentPayload call_with_retries(AgentBackend& backend, PromptEnvelope envelope, AgentSchema schema,
                               const AgentBackendConfig& cfg, AgentStats* stats, const PayloadCheck& check) {
    if (stats) ++stats->calls;
    const auto base_message = envelope.user_message;
    CallFailure last;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        envelope.attempt = attempt;
        std::string raw;
        try {
            raw = backend.complete(envelope);
        } catch (const TransportError& e) {
            last = {true, e.what()};
            continue;
        }
        if (stats) ++stats->responses;
        auto result = validate_agent_json(raw, schema);
        std::string problem;
        if (!result.ok()) {
            problem = std::string(to_string(result.error->reason)) + ": " + result.error->detail;
        } else if (check) {
            if (auto p = check(*result.value)) problem = *p;
        }
        if (problem.empty()) {
            if (stats) ++stats->valid_responses;
            return std::move(*result.value);
        }
        last = {false, problem};
        envelope.user_message = base_message + "\n\nYour previous response was rejected (" + problem +
                                "). Output only the required JSON object.";
    }
    throw Error(last.transport ? ErrorCode::TransportFailure : ErrorCode::AgentFailure,
                std::string(to_string(envelope.role)) + " call failed after " + std::to_string(cfg.max_retries + 1) +
                    " attempts: " + last.detail);
}

// Runs a call and counts one failure when it is exhausted.
template <typename F>
auto counted(AgentStats* stats, F&& fn) {
    try {
        return fn();
    } catch (const Error&) {
        if (stats) ++stats->failures;
        throw;
    }
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t run_seed, int sample_index) {
    return text::mix64(run_seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(sample_index + 1));
}

EpistemicEstimate estimate_epistemic(std::span<const ReasoningChain> samples) {
    if (samples.empty()) throw Error(ErrorCode::InvalidInput, "estimate_epistemic needs at least one sample");

    std::map<DisclosureStatus, int> counts;
    for (const auto& s : samples) ++counts[s.status];
    int top = 0;
    for (const auto& [_, c] : counts) top = std::max(top, c);
    std::vector<DisclosureStatus> tied;
    for (const auto& [st, c] : counts)
        if (c == top) tied.push_back(st);

    const auto k = static_cast<double>(samples.size());
    EpistemicEstimate est;
    est.sigma_epi = samples.size() == 1 ? 0.0 : 1.0 - static_cast<double>(top) / k;

    const auto consensus_status = tied.size() == 1 ? tied.front() : DisclosureStatus::PartiallyDisclosed;
    // Representative sample: content-ordered so the choice ignores sample order.
    const ReasoningChain* rep = nullptr;
    auto key = [](const ReasoningChain& c) {
        return std::make_tuple(c.evidence_text != "None", c.confidence, c.evidence_text, c.reasoning);
    };
    for (const auto& s : samples) {
        if (std::find(tied.begin(), tied.end(), s.status) == tied.end()) continue;
        if (!rep || key(s) > key(*rep)) rep = &s;
    }

    std::vector<double> conf;
    for (const auto& s : samples) conf.push_back(s.confidence);
    std::sort(conf.begin(), conf.end());
    double sum = 0.0;
    for (double c : conf) sum += c;

    auto& out = est.consensus;
    out.element_id = rep->element_id;
    out.status = consensus_status;
    out.evidence_text = consensus_status == DisclosureStatus::NotDisclosed ? "None" : rep->evidence_text;
    out.reasoning = rep->reasoning;
    out.confidence = sum / k;
    out.uncertainty = est.sigma_epi;
    out.human_review = needs_human_review(out.uncertainty);
    return est;
}

ExaminerAgent::ExaminerAgent(AgentBackend& backend, AgentBackendConfig cfg, AgentStats* stats)
    : backend_(backend), cfg_(std::move(cfg)), stats_(stats) {
    validate(cfg_);
}

ReasoningChain ExaminerAgent::examine(const ClaimElement& element, const PriorArtDocument& prior_art) {
    return counted(stats_, [&] {
        const int k = cfg_.k_samples;
        auto one = [&](int index) {
            PromptEnvelope env;
            env.role = AgentRole::Examiner;
            env.system_message = examiner_system_message();
            env.user_message = examiner_user_message(element, prior_art);
            env.temperature = cfg_.temperature;
            env.seed = sample_seed(cfg_.seed, index);
            env.sample_index = index;
            env.request = ExamineRequest{element, prior_art};
            auto chain = std::get<ReasoningChain>(
                call_with_retries(backend_, std::move(env), AgentSchema::Examiner, cfg_, stats_, {}));
            chain.element_id = element.element_id;
            return chain;
        };

        std::vector<ReasoningChain> samples(static_cast<std::size_t>(k));
        if (cfg_.threads <= 1 || k == 1) {
            for (int i = 0; i < k; ++i) samples[static_cast<std::size_t>(i)] = one(i);
        } else {
            // Batches of at most `threads` concurrent calls; results land by index.
            for (int start = 0; start < k; start += cfg_.threads) {
                const int end = std::min(k, start + cfg_.threads);
                std::vector<std::future<ReasoningChain>> batch;
                for (int i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, one, i));
                std::exception_ptr first_error;
                for (int i = start; i < end; ++i) {
                    try {
                        samples[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i - start)].get();
                    } catch (...) {
                        if (!first_error) first_error = std::current_exception();
                    }
                }
                if (first_error) std::rethrow_exception(first_error);
            }
        }

        ReasoningChain chain;
        if (k == 1) {
            chain = samples.front();
        } else {
            chain = estimate_epistemic(samples).consensus;
        }
        chain.element_id = element.element_id;
        chain.human_review = needs_human_review(chain.uncertainty);
        return chain;
    });
}

EditorAgent::EditorAgent(AgentBackend& backend, AgentBackendConfig cfg, AgentStats* stats)
    : backend_(backend), cfg_(std::move(cfg)), stats_(stats) {
    validate(cfg_);
}

EditorPlan EditorAgent::plan(const ClaimElement& element, const ReasoningChain& chain) {
    if (chain.status == DisclosureStatus::NotDisclosed)
        throw Error(ErrorCode::NothingToEdit, "element " + element.element_id + " is not disclosed");
    return counted(stats_, [&] {
        PromptEnvelope env;
        env.role = AgentRole::Editor;
        env.system_message = editor_system_message();
        env.user_message = editor_plan_message(element, chain);
        env.temperature = cfg_.temperature;
        env.seed = sample_seed(cfg_.seed, 0);
        env.request = PlanRequest{element, chain};
        const PayloadCheck targets_element = [&](const AgentPayload& p) -> std::optional<std::string> {
            for (const auto& a : std::get<EditorPlan>(p).operations) {
                const auto ids = a.targets();
                if (std::find(ids.begin(), ids.end(), element.element_id) == ids.end())
                    return "operation targets " + a.target_element_id + " instead of " + element.element_id;
            }
            return std::nullopt;
        };
        return std::get<EditorPlan>(
            call_with_retries(backend_, std::move(env), AgentSchema::Editor, cfg_, stats_, targets_element));
    });
}

AppliedEdit EditorAgent::apply_operation(const ClaimElement& element, const ReasoningChain& chain,
                                         EditOperationType op) {
    return counted(stats_, [&] {
        PromptEnvelope env;
        env.role = AgentRole::ApplyOperation;
        env.system_message = editor_system_message();
        env.user_message = apply_operation_message(element, chain, op);
        env.temperature = cfg_.temperature;
        env.seed = sample_seed(cfg_.seed, 0);
        env.request = ApplyRequest{element, chain, op};
        return std::get<AppliedEdit>(
            call_with_retries(backend_, std::move(env), AgentSchema::ApplyOperation, cfg_, stats_, {}));
    });
}

}  // namespace toc
