#pragma once

// Human-intervention queue: the only structure shared between the search
// loop and HTTP handlers. Handlers record decisions; the search loop drains
// them at iteration boundaries.

#include <atomic>
#include <mutex>
#include <optional>
#include <vector>

#include "toc/agent_json.hpp"
#include "toc/claim.hpp"

namespace toc {

enum class InterventionStatus { Pending, Approved, Rejected };

std::string_view to_string(InterventionStatus s) noexcept;
std::optional<InterventionStatus> parse_intervention_status(std::string_view s) noexcept;

struct InterventionItem {
    int item_id = 0;
    int node_id = 0;
    ReasoningChain chain;
    EditAction proposed_action;
    InterventionStatus status = InterventionStatus::Pending;
    long created_iteration = 0;
    /// Set when a decision was recorded but the search loop has not applied it yet.
    bool applied = false;
    bool timed_out = false;
};

enum class DecisionOutcome { Ok, NotFound, Conflict };

class InterventionQueue {
public:
    /// Adds a pending item and returns its id.
    int submit(int node_id, const ReasoningChain& chain, const EditAction& proposed, long iteration);

    /// Records a decision. Only pending items can be decided, once.
    DecisionOutcome decide(int item_id, InterventionStatus decision);

    /// Resolves items pending for at least `timeout` iterations.
    void expire(long iteration, long timeout, InterventionStatus resolution);

    /// Decided items not yet applied by the search loop, in decision order.
    std::vector<InterventionItem> drain();

    std::vector<InterventionItem> list() const;

    void request_abort() { abort_.store(true); }
    bool abort_requested() const { return abort_.load(); }

private:
    mutable std::mutex mu_;
    std::vector<InterventionItem> items_;
    std::vector<int> decided_;  // decision order
    std::atomic<bool> abort_{false};
};

}  // namespace toc
