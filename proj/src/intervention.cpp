#include "toc/intervention.hpp"

namespace toc {

std::string_view to_string(InterventionStatus s) noexcept {
    switch (s) {
        case InterventionStatus::Pending: return "pending";
        case InterventionStatus::Approved: return "approved";
        case InterventionStatus::Rejected: return "rejected";
    }
    return "pending";
}

std::optional<InterventionStatus> parse_intervention_status(std::string_view s) noexcept {
    if (s == "pending") return InterventionStatus::Pending;
    if (s == "approved") return InterventionStatus::Approved;
    if (s == "rejected") return InterventionStatus::Rejected;
    return std::nullopt;
}

int InterventionQueue::submit(int node_id, const ReasoningChain& chain, const EditAction& proposed, long iteration) {
    std::lock_guard lock(mu_);
    InterventionItem item;
    item.item_id = static_cast<int>(items_.size()) + 1;
    item.node_id = node_id;
    item.chain = chain;
    item.proposed_action = proposed;
    item.created_iteration = iteration;
    items_.push_back(std::move(item));
    return items_.back().item_id;
}

DecisionOutcome InterventionQueue::decide(int item_id, InterventionStatus decision) {
    if (decision == InterventionStatus::Pending) return DecisionOutcome::Conflict;
    std::lock_guard lock(mu_);
    if (item_id < 1 || item_id > static_cast<int>(items_.size())) return DecisionOutcome::NotFound;
    auto& item = items_[static_cast<std::size_t>(item_id - 1)];
    if (item.status != InterventionStatus::Pending) return DecisionOutcome::Conflict;
    item.status = decision;
    decided_.push_back(item_id);
    return DecisionOutcome::Ok;
}

void InterventionQueue::expire(long iteration, long timeout, InterventionStatus resolution) {
    std::lock_guard lock(mu_);
    for (auto& item : items_) {
        if (item.status != InterventionStatus::Pending || iteration - item.created_iteration < timeout) continue;
        item.status = resolution;
        item.timed_out = true;
        decided_.push_back(item.item_id);
    }
}

std::vector<InterventionItem> InterventionQueue::drain() {
    std::lock_guard lock(mu_);
    std::vector<InterventionItem> out;
    for (int id : decided_) {
        auto& item = items_[static_cast<std::size_t>(id - 1)];
        item.applied = true;
        out.push_back(item);
    }
    decided_.clear();
    return out;
}

std::vector<InterventionItem> InterventionQueue::list() const {
    std::lock_guard lock(mu_);
    return items_;
}

}  // namespace toc
