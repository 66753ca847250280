#pragma once

// Rebuilds the search tree and the best state from an audit trail alone.

#include <filesystem>
#include <string>
#include <vector>

#include "toc/serialize.hpp"

namespace toc {

struct ReplayNode {
    int id = 0;
    int parent = -1;
    std::string claim_text;
    std::vector<EditAction> op_history;
};

struct ReplayResult {
    std::vector<ReplayNode> nodes;
    std::string best_claim;
    std::vector<EditAction> best_path;
    double best_reward = 0.0;
    RewardComponents best_components;
    long iterations = 0;
};

/// Throws InvalidInput when the trail is inconsistent (unknown parent,
/// claim_before not matching the parent's claim, missing initial record).
ReplayResult replay_audit(const std::vector<AuditRecord>& records);
std::vector<AuditRecord> read_audit_file(const std::filesystem::path& path);

/// Empty when the replay agrees with a result document; otherwise one
/// message per mismatching field.
std::vector<std::string> compare_replay(const ReplayResult& replay, const Json& result);

}  // namespace toc
