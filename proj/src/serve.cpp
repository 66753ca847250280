#include "toc/serve.hpp"

#include <fstream>

#include "httplib.h"

#include "toc/error.hpp"

namespace toc {

void EventLog::append(std::string line) {
    {
        std::lock_guard lock(mu_);
        lines_.push_back(std::move(line));
    }
    cv_.notify_all();
}

void EventLog::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

std::vector<std::string> EventLog::wait_from(std::size_t seen, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return closed_ || lines_.size() > seen; });
    if (seen >= lines_.size()) return {};
    return {lines_.begin() + static_cast<long>(seen), lines_.end()};
}

bool EventLog::closed() const {
    std::lock_guard lock(mu_);
    return closed_;
}

std::size_t EventLog::size() const {
    std::lock_guard lock(mu_);
    return lines_.size();
}

ServeSession::ServeSession(CorpusRecord record, RunConfig cfg, std::chrono::milliseconds step_delay)
    : record_(std::move(record)), cfg_(std::move(cfg)), step_delay_(step_delay) {
    cfg_.search.gating_policy = GatingPolicy::FlagForHuman;
    validate(cfg_);
}

ServeSession::~ServeSession() {
    queue_.request_abort();
    join();
}

void ServeSession::start(std::optional<std::filesystem::path> out_dir) {
    if (worker_.joinable()) throw Error(ErrorCode::InternalInvariant, "serve session already started");
    worker_ = std::thread([this, out_dir] {
        std::ofstream audit_file;
        if (out_dir) {
            std::filesystem::create_directories(*out_dir);
            audit_file.open(*out_dir / "audit.jsonl", std::ios::binary | std::ios::trunc);
        }
        RunHooks hooks;
        hooks.queue = &queue_;
        hooks.step_delay = step_delay_;
        hooks.audit = [&](const AuditRecord& r) {
            auto line = audit_line(r);
            if (audit_file) audit_file << line << '\n';
            events_.append(std::move(line));
        };
        hooks.snapshot = [this](std::shared_ptr<const TreeSnapshot> s) {
            std::lock_guard lock(mu_);
            snapshot_ = std::move(s);
        };
        try {
            auto run = run_record(record_, cfg_, AblationVariant{"full"}, hooks);
            if (out_dir) {
                auto doc = to_json(run.result);
                doc["config"] = config_echo(cfg_);
                std::ofstream(*out_dir / "result.json", std::ios::binary | std::ios::trunc) << doc.dump(2) << '\n';
                std::ofstream(*out_dir / "curve.csv", std::ios::binary | std::ios::trunc)
                    << reward_curve(run.result.reward_trace);
            }
            std::lock_guard lock(mu_);
            result_ = std::move(run.result);
        } catch (const std::exception& e) {
            std::lock_guard lock(mu_);
            error_ = e.what();
        }
        audit_file.close();
        {
            std::lock_guard lock(mu_);
            finished_ = true;
        }
        events_.close();
    });
}

void ServeSession::join() {
    if (worker_.joinable()) worker_.join();
}

bool ServeSession::finished() const {
    std::lock_guard lock(mu_);
    return finished_;
}

std::shared_ptr<const TreeSnapshot> ServeSession::snapshot() const {
    std::lock_guard lock(mu_);
    return snapshot_;
}

std::optional<SearchResult> ServeSession::result() const {
    std::lock_guard lock(mu_);
    return result_;
}

std::string ServeSession::error() const {
    std::lock_guard lock(mu_);
    return error_;
}

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& msg) {
    send_json(res, status, Json{{"error", code}, {"message", msg}});
}

}  // namespace

void register_routes(httplib::Server& server, ServeSession& session) {
    server.Get("/tree", [&](const httplib::Request&, httplib::Response& res) {
        const auto snap = session.snapshot();
        if (!snap) {
            send_json(res, 200, to_json(TreeSnapshot{}));
            return;
        }
        send_json(res, 200, to_json(*snap));
    });

    server.Get("/reward-trace", [&](const httplib::Request&, httplib::Response& res) {
        const auto snap = session.snapshot();
        Json trace = Json::array();
        if (snap)
            for (const auto& [i, v] : snap->reward_trace) trace.push_back(Json::array({i, v}));
        send_json(res, 200, Json{{"iteration", snap ? snap->iteration : 0}, {"reward_trace", std::move(trace)}});
    });

    server.Get("/interventions", [&](const httplib::Request&, httplib::Response& res) {
        Json items = Json::array();
        for (const auto& item : session.queue().list()) items.push_back(to_json(item));
        send_json(res, 200, items);
    });

    server.Post(R"(/interventions/(\d+)/decision)", [&](const httplib::Request& req, httplib::Response& res) {
        int id = 0;
        try {
            id = std::stoi(req.matches[1].str());
        } catch (const std::exception&) {
            send_error(res, 404, "not-found", "no such intervention item");
            return;
        }
        Json body;
        try {
            body = Json::parse(req.body);
        } catch (const nlohmann::json::exception&) {
            send_error(res, 400, "bad-request", "body must be JSON");
            return;
        }
        if (!body.is_object() || !body.contains("decision") || !body["decision"].is_string()) {
            send_error(res, 400, "bad-request", "body must be {\"decision\": \"approved\"|\"rejected\"}");
            return;
        }
        const auto decision = parse_intervention_status(body["decision"].get<std::string>());
        if (!decision || *decision == InterventionStatus::Pending) {
            send_error(res, 400, "bad-request", "decision must be approved or rejected");
            return;
        }
        switch (session.queue().decide(id, *decision)) {
            case DecisionOutcome::NotFound: send_error(res, 404, "not-found", "no such intervention item"); return;
            case DecisionOutcome::Conflict: send_error(res, 409, "conflict", "item is no longer pending"); return;
            case DecisionOutcome::Ok: break;
        }
        for (const auto& item : session.queue().list())
            if (item.item_id == id) {
                send_json(res, 200, to_json(item));
                return;
            }
        send_error(res, 404, "not-found", "no such intervention item");
    });

    server.Get("/events", [&](const httplib::Request& req, httplib::Response& res) {
        std::size_t from = 0;
        const auto resume = req.has_header("Last-Event-ID") ? req.get_header_value("Last-Event-ID")
                                                            : req.get_param_value("from");
        if (!resume.empty()) {
            try {
                from = std::stoul(resume);
            } catch (const std::exception&) {
                send_error(res, 400, "bad-request", "bad event cursor");
                return;
            }
        }
        auto cursor = std::make_shared<std::size_t>(from);
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [&session, cursor](std::size_t, httplib::DataSink& sink) {
            const auto lines = session.events().wait_from(*cursor, std::chrono::milliseconds(500));
            std::string chunk;
            for (const auto& line : lines) {
                ++*cursor;
                chunk += "id: " + std::to_string(*cursor) + "\nevent: audit\ndata: " + line + "\n\n";
            }
            if (lines.empty() && !session.events().closed()) chunk = ": keep-alive\n\n";
            if (!chunk.empty() && !sink.write(chunk.data(), chunk.size())) return false;
            if (session.events().closed() && *cursor >= session.events().size()) {
                const std::string end = "event: end\ndata: {}\n\n";
                sink.write(end.data(), end.size());
                sink.done();
            }
            return true;
        });
    });
}

}  // namespace toc
