#pragma once

// Serve mode: one search on a background thread, HTTP readers on immutable
// snapshots, and the intervention queue as the only shared mutable state.

#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "toc/harness.hpp"
#include "toc/serialize.hpp"

namespace httplib {
class Server;
}

namespace toc {

/// Append-only list of serialized audit lines with blocking waits for SSE readers.
class EventLog {
public:
    void append(std::string line);
    void close();
    /// Blocks until more than `seen` lines exist or the log is closed (or the
    /// timeout passes). Returns the lines from index `seen` on.
    std::vector<std::string> wait_from(std::size_t seen, std::chrono::milliseconds timeout);
    bool closed() const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::vector<std::string> lines_;
    bool closed_ = false;
};

class ServeSession {
public:
    /// The run config's gating policy is forced to flag-for-human.
    ServeSession(CorpusRecord record, RunConfig cfg, std::chrono::milliseconds step_delay = {});
    ~ServeSession();

    ServeSession(const ServeSession&) = delete;
    ServeSession& operator=(const ServeSession&) = delete;

    /// Launches the search thread. Artifacts go to out_dir when set.
    void start(std::optional<std::filesystem::path> out_dir = std::nullopt);
    void join();
    bool finished() const;

    std::shared_ptr<const TreeSnapshot> snapshot() const;
    InterventionQueue& queue() { return queue_; }
    EventLog& events() { return events_; }
    /// Set once the search thread is done; holds the error text on failure.
    std::optional<SearchResult> result() const;
    std::string error() const;
    const RunConfig& config() const { return cfg_; }

private:
    CorpusRecord record_;
    RunConfig cfg_;
    std::chrono::milliseconds step_delay_;
    InterventionQueue queue_;
    EventLog events_;
    std::thread worker_;
    mutable std::mutex mu_;
    std::shared_ptr<const TreeSnapshot> snapshot_;
    std::optional<SearchResult> result_;
    std::string error_;
    bool finished_ = false;
};

/// Registers GET /tree, /reward-trace, /interventions, /events and
/// POST /interventions/{id}/decision on the server.
void register_routes(httplib::Server& server, ServeSession& session);

}  // namespace toc
