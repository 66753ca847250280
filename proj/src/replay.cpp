#include "toc/replay.hpp"

#include <fstream>
#include <map>

#include "toc/error.hpp"

namespace toc {

namespace {

[[noreturn]] void broken(const AuditRecord& r, const std::string& msg) {
    throw Error(ErrorCode::InvalidInput,
                "audit record " + std::to_string(r.timestamp) + " (" + std::string(to_string(r.phase)) + "): " + msg);
}

}  // namespace

ReplayResult replay_audit(const std::vector<AuditRecord>& records) {
    ReplayResult out;
    std::map<int, std::size_t> index;
    bool have_best = false;
    // Rollout state of the simulation currently being read.
    std::vector<EditAction> path;

    for (const auto& r : records) {
        out.iterations = std::max(out.iterations, r.iteration);
        if (r.phase == AuditPhase::Expand && r.parent_id) {
            auto p = index.find(*r.parent_id);
            if (p == index.end()) broken(r, "unknown parent " + std::to_string(*r.parent_id));
            if (index.count(r.node_id)) broken(r, "node " + std::to_string(r.node_id) + " created twice");
            if (!r.action || !r.claim_after) broken(r, "expansion without action or claim");
            const auto& parent = out.nodes[p->second];
            if (r.claim_before && *r.claim_before != parent.claim_text) broken(r, "claim_before differs from parent");
            ReplayNode node{r.node_id, parent.id, *r.claim_after, parent.op_history};
            node.op_history.push_back(*r.action);
            index[r.node_id] = out.nodes.size();
            out.nodes.push_back(std::move(node));
            continue;
        }
        if (r.phase != AuditPhase::Simulate || !r.step || !r.reward) continue;

        if (*r.step == 0) {
            if (r.detail == "initial") {
                if (!out.nodes.empty()) broken(r, "second initial record");
                out.nodes.push_back(ReplayNode{0, -1, r.claim_after.value_or(""), {}});
                index[0] = 0;
            }
            auto it = index.find(r.node_id);
            if (it == index.end()) broken(r, "simulation of unknown node " + std::to_string(r.node_id));
            const auto& node = out.nodes[it->second];
            if (r.claim_after && *r.claim_after != node.claim_text) broken(r, "start state differs from node claim");
            path = node.op_history;
        } else {
            if (!r.action) broken(r, "rollout step without action");
            path.push_back(*r.action);
        }
        if (!have_best || *r.reward > out.best_reward) {
            have_best = true;
            out.best_reward = *r.reward;
            out.best_claim = r.claim_after.value_or("");
            out.best_path = path;
            if (r.reward_components) out.best_components = *r.reward_components;
        }
    }
    if (!have_best) throw Error(ErrorCode::InvalidInput, "audit trail has no initial simulation record");
    return out;
}

std::vector<AuditRecord> read_audit_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open audit trail " + path.string());
    std::vector<AuditRecord> out;
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            out.push_back(audit_from_json(Json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidInput, "audit line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<std::string> compare_replay(const ReplayResult& replay, const Json& result) {
    std::vector<std::string> diffs;
    const auto claim = result.at("best_claim").at("raw_text").get<std::string>();
    if (claim != replay.best_claim) diffs.push_back("best_claim: '" + replay.best_claim + "' vs '" + claim + "'");
    const auto reward = result.at("best_reward").get<double>();
    if (reward != replay.best_reward) diffs.push_back("best_reward differs");
    Json path = Json::array();
    for (const auto& a : replay.best_path) path.push_back(to_json(a));
    if (path != result.at("best_path")) diffs.push_back("best_path differs");
    if (result.contains("node_count") && result.at("node_count").get<std::size_t>() != replay.nodes.size())
        diffs.push_back("node_count differs");
    return diffs;
}

}  // namespace toc
