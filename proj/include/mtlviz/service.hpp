#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "mtlviz/checker.hpp"
#include "mtlviz/machine.hpp"
#include "mtlviz/render.hpp"
#include "mtlviz/snippets.hpp"

namespace mtlviz::service {

// ==============================================================================
// HTTP session API
// ==============================================================================
//
//   POST /sessions                  {source, mode?, inputs?, step_cap?}
//   POST /sessions/{id}/step
//   POST /sessions/{id}/input       {value}
//   POST /sessions/{id}/run
//   GET  /sessions/{id}/trace
//   GET  /sessions/{id}/snapshot/{k}
//   POST /snippets                  {kind, params}
//   GET  /healthz
//
// Requests against one session are serialized by that session's mutex;
// different sessions run in parallel.

using Clock = std::chrono::steady_clock;

struct Config {
    std::chrono::minutes idle_ttl{30};
    std::optional<std::filesystem::path> persist_dir;
    std::string allow_origin;  // empty disables CORS headers
    std::size_t default_step_cap = kDefaultStepCap;
    std::function<Clock::time_point()> now = [] { return Clock::now(); };
};

struct SessionRecord {
    std::string id;
    Session session;
    Clock::time_point created_at;
    Clock::time_point last_touched;
    bool persisted = false;
    std::mutex mutex;

    SessionRecord(std::string id_, Session s, Clock::time_point t)
        : id(std::move(id_)), session(std::move(s)), created_at(t), last_touched(t) {}
};

class SessionStore {
public:
    explicit SessionStore(std::chrono::minutes ttl) : ttl_(ttl) {}

    std::shared_ptr<SessionRecord> insert(Session s, Clock::time_point now) {
        std::lock_guard lock(mutex_);
        auto rec = std::make_shared<SessionRecord>(next_id(), std::move(s), now);
        records_.emplace(rec->id, rec);
        return rec;
    }

    std::shared_ptr<SessionRecord> find(const std::string& id) const {
        std::lock_guard lock(mutex_);
        auto it = records_.find(id);
        return it == records_.end() ? nullptr : it->second;
    }

    /// Drops records idle for longer than the TTL. Records still held by an
    /// in-flight request stay alive until that request finishes.
    std::size_t evict_expired(Clock::time_point now) {
        std::lock_guard lock(mutex_);
        std::size_t n = 0;
        for (auto it = records_.begin(); it != records_.end();) {
            std::unique_lock rec_lock(it->second->mutex, std::try_to_lock);
            if (rec_lock.owns_lock() && now - it->second->last_touched > ttl_) {
                rec_lock.unlock();
                it = records_.erase(it);
                ++n;
            } else {
                ++it;
            }
        }
        return n;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return records_.size();
    }

private:
    std::string next_id() {
        std::ostringstream os;
        os << std::hex << rng_() << '-' << ++counter_;
        return os.str();
    }

    std::chrono::minutes ttl_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<SessionRecord>> records_;
    std::mt19937_64 rng_{std::random_device{}()};
    std::uint64_t counter_ = 0;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

inline Response json_response(int status, const ordered_json& body) {
    return {status, dump_canonical(body), "application/json"};
}

inline Response api_error(int status, const std::string& code, const std::string& message,
                          const std::string& suggestion) {
    ordered_json j;
    j["code"] = code;
    j["message"] = message;
    j["suggestion"] = suggestion;
    return json_response(status, j);
}

inline std::optional<ExecutionMode> parse_mode(std::string_view s) {
    if (s == "line_by_line") return ExecutionMode::LineByLine;
    if (s == "complete_run") return ExecutionMode::CompleteRun;
    return std::nullopt;
}

/// Transport-independent request handling. `Server` below adapts it to HTTP.
class Api {
public:
    explicit Api(Config config = {}) : config_(std::move(config)), store_(config_.idle_ttl) {}

    const Config& config() const { return config_; }
    SessionStore& store() { return store_; }

    Response handle(const std::string& method, const std::string& path, const std::string& body) {
        store_.evict_expired(config_.now());
        const std::vector<std::string> parts = split_path(path);

        if (method == "GET" && parts.size() == 1 && parts[0] == "healthz") return {200, "ok", "text/plain"};
        if (method == "POST" && parts.size() == 1 && parts[0] == "sessions") return create_session(body);
        if (method == "POST" && parts.size() == 1 && parts[0] == "snippets") return post_snippet(body);
        if (parts.size() >= 3 && parts[0] == "sessions") {
            const std::string& id = parts[1];
            const std::string& action = parts[2];
            if (method == "POST" && parts.size() == 3 && action == "step") return with_session(id, [&](auto& r) { return post_step(r); });
            if (method == "POST" && parts.size() == 3 && action == "input") return with_session(id, [&](auto& r) { return post_input(r, body); });
            if (method == "POST" && parts.size() == 3 && action == "run") return with_session(id, [&](auto& r) { return post_run(r); });
            if (method == "GET" && parts.size() == 3 && action == "trace")
                return with_session(id, [&](auto& r) { return json_response(200, trace_json(r.session.trace())); });
            if (method == "GET" && parts.size() == 4 && action == "snapshot")
                return with_session(id, [&](auto& r) { return get_snapshot(r, parts[3]); });
        }
        return api_error(404, "not_found", "no route for " + method + " " + path,
                         "Check the URL; routes are /sessions, /sessions/{id}/step|input|run|trace|snapshot/{k}, "
                         "/snippets and /healthz");
    }

private:
    static std::vector<std::string> split_path(const std::string& path) {
        std::vector<std::string> out;
        std::string cur;
        const std::string clean = path.substr(0, path.find('?'));
        for (char c : clean) {
            if (c == '/') {
                if (!cur.empty()) out.push_back(std::move(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) out.push_back(std::move(cur));
        return out;
    }

    static std::optional<nlohmann::json> parse_body(const std::string& body) {
        nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) return std::nullopt;
        return j;
    }

    static Response bad_request(const std::string& message, const std::string& suggestion) {
        return api_error(400, "bad_request", message, suggestion);
    }

    template <class F>
    Response with_session(const std::string& id, F&& f) {
        auto rec = store_.find(id);
        if (!rec)
            return api_error(404, "not_found", "no session with id '" + id + "'",
                             "Create a session first with POST /sessions");
        std::lock_guard lock(rec->mutex);
        rec->last_touched = config_.now();
        Response r = f(*rec);
        persist_if_done(*rec);
        return r;
    }

    void persist_if_done(SessionRecord& rec) {
        if (!config_.persist_dir || rec.persisted) return;
        const RunStatus s = rec.session.status();
        if (s != RunStatus::Finished && s != RunStatus::Faulted && s != RunStatus::Truncated) return;
        std::error_code ec;
        std::filesystem::create_directories(*config_.persist_dir, ec);
        std::ofstream out(*config_.persist_dir / (rec.id + ".json"), std::ios::binary);
        if (!out) return;
        out << render_trace_json(rec.session.trace());
        rec.persisted = static_cast<bool>(out);
    }

    Response create_session(const std::string& body) {
        auto j = parse_body(body);
        if (!j) return bad_request("the request body is not a JSON object", "Send {\"source\": \"...\", \"mode\": \"line_by_line\"}");
        if (!j->contains("source") || !(*j)["source"].is_string())
            return bad_request("the request needs a 'source' text", "Send the program text in the 'source' field");
        ExecutionMode mode = ExecutionMode::LineByLine;
        if (j->contains("mode")) {
            const auto& m = (*j)["mode"];
            auto parsed = m.is_string() ? parse_mode(m.get<std::string>()) : std::nullopt;
            if (!parsed) return bad_request("unknown mode", "Use \"line_by_line\" or \"complete_run\"");
            mode = *parsed;
        }
        std::vector<std::string> inputs;
        if (j->contains("inputs")) {
            const auto& in = (*j)["inputs"];
            if (!in.is_array()) return bad_request("'inputs' must be a list of texts", "Send e.g. \"inputs\": [\"409\", \"91\"]");
            for (const auto& v : in) {
                if (!v.is_string()) return bad_request("'inputs' must be a list of texts", "Quote each input, e.g. \"409\"");
                inputs.push_back(v.get<std::string>());
            }
        }
        std::size_t cap = config_.default_step_cap;
        if (j->contains("step_cap")) {
            const auto& c = (*j)["step_cap"];
            if (!c.is_number_integer() || c.get<long long>() < 1)
                return bad_request("'step_cap' must be a positive whole number", "Send e.g. \"step_cap\": 10000");
            cap = static_cast<std::size_t>(c.get<long long>());
        }

        CheckResult checked = compile(SourceProgram((*j)["source"].get<std::string>()));
        if (!checked.ok()) {
            ordered_json err;
            err["code"] = "invalid_program";
            err["message"] = "the program has " + std::to_string(checked.diagnostics.size()) + " problem" +
                             (checked.diagnostics.size() == 1 ? "" : "s");
            err["suggestion"] = checked.diagnostics.empty() ? std::string("Fix the program and try again")
                                                            : checked.diagnostics.front().suggestion;
            ordered_json diags = ordered_json::array();
            for (const auto& d : checked.diagnostics) diags.push_back(diagnostic_json(d));
            err["diagnostics"] = std::move(diags);
            return json_response(422, err);
        }
        auto rec = store_.insert(Session(std::move(*checked.program), mode, std::move(inputs), cap), config_.now());
        ordered_json out;
        out["id"] = rec->id;
        out["status"] = to_string(rec->session.status());
        return json_response(201, out);
    }

    static bool is_terminal(RunStatus s) {
        return s == RunStatus::Finished || s == RunStatus::Faulted || s == RunStatus::Truncated;
    }

    static Response not_ready(const Session& s) {
        return api_error(409, "conflict", std::string("the session is already ") + to_string(s.status()),
                         "Start a new session with POST /sessions, or replay it with GET /sessions/{id}/snapshot/{k}");
    }

    static Response post_step(SessionRecord& rec) {
        Session& s = rec.session;
        if (is_terminal(s.status())) return not_ready(s);
        StepResult r = s.step();
        ordered_json out;
        if (auto* step = std::get_if<TraceStep>(&r)) {
            out["step"] = step_json(*step);
            out["status"] = to_string(s.status());
        } else if (auto* wait = std::get_if<AwaitingInput>(&r)) {
            out["status"] = to_string(RunStatus::AwaitingInput);
            out["prompt"] = wait->prompt;
        } else if (std::holds_alternative<Finished>(r)) {
            out["status"] = to_string(RunStatus::Finished);
        } else {
            out["status"] = to_string(s.status());
            out["fault"] = fault_json(std::get<Faulted>(r).fault);
        }
        return json_response(200, out);
    }

    static Response post_input(SessionRecord& rec, const std::string& body) {
        auto j = parse_body(body);
        if (!j || !j->contains("value") || !(*j)["value"].is_string())
            return bad_request("the request needs a 'value' text", "Send e.g. {\"value\": \"409\"}");
        ordered_json out;
        out["status"] = to_string(rec.session.provide_input((*j)["value"].get<std::string>()));
        return json_response(200, out);
    }

    static Response post_run(SessionRecord& rec) {
        Session& s = rec.session;
        if (s.status() != RunStatus::Ready) {
            if (s.status() == RunStatus::AwaitingInput)
                return api_error(409, "conflict", "the session is waiting for input",
                                 "Send the value with POST /sessions/{id}/input first");
            return not_ready(s);
        }
        const std::size_t before = s.trace().steps.size();
        const Trace& t = s.run_to_end();
        ordered_json out;
        out["status"] = to_string(t.status);
        out["steps_added"] = t.steps.size() - before;
        if (t.prompt && t.status == RunStatus::AwaitingInput) out["prompt"] = *t.prompt;
        if (t.fault) out["fault"] = fault_json(*t.fault);
        return json_response(200, out);
    }

    static Response get_snapshot(SessionRecord& rec, const std::string& k_text) {
        const Trace& t = rec.session.trace();
        long long k = 0;
        std::size_t used = 0;
        bool ok = !k_text.empty();
        try {
            k = std::stoll(k_text, &used);
            ok = ok && used == k_text.size();
        } catch (const std::exception&) {
            ok = false;
        }
        const long long last = static_cast<long long>(t.steps.size()) - 1;
        if (!ok || k < -1 || k > last)
            return api_error(416, "out_of_range",
                             "step " + k_text + " is outside the trace (-1 to " + std::to_string(last) + ")",
                             "Ask for a step between -1 and " + std::to_string(last));
        ordered_json out;
        RamSnapshot snap = snapshot_at(t, k);
        out["k"] = k;
        out["ram"] = ram_json(snap);
        out["three_block"] = three_block_json(three_block_view(snap));
        return json_response(200, out);
    }

    static Response post_snippet(const std::string& body) {
        auto j = parse_body(body);
        if (!j) return bad_request("the request body is not a JSON object", "Send {\"kind\": \"declaration\", \"params\": {...}}");
        if (!j->contains("kind") || !(*j)["kind"].is_string())
            return api_error(422, "invalid_snippet", "the request needs a 'kind'",
                             "Use one of declaration, assignment, data_input, data_output, condition, looping, insert_text");
        auto kind = parse_snippet_kind((*j)["kind"].get<std::string>());
        if (!kind)
            return api_error(422, "invalid_snippet", "unknown snippet kind '" + (*j)["kind"].get<std::string>() + "'",
                             "Use one of declaration, assignment, data_input, data_output, condition, looping, insert_text");
        SnippetRequest req{*kind, {}};
        if (j->contains("params")) {
            const auto& p = (*j)["params"];
            if (!p.is_object())
                return api_error(422, "invalid_snippet", "'params' must be an object of texts",
                                 "Send e.g. \"params\": {\"name\": \"sum\", \"type\": \"Integer\"}");
            for (const auto& [key, value] : p.items()) {
                if (!value.is_string())
                    return api_error(422, "invalid_snippet", "parameter '" + key + "' must be a text",
                                     "Quote every parameter value, e.g. \"from\": \"0\"");
                req.params[key] = value.get<std::string>();
            }
        }
        SnippetResult r = generate_snippet(req);
        if (auto* err = std::get_if<SnippetError>(&r)) {
            ordered_json e;
            e["code"] = "invalid_snippet";
            e["message"] = err->message;
            e["suggestion"] = err->suggestion;
            if (!err->param.empty()) e["param"] = err->param;
            return json_response(422, e);
        }
        const Snippet& s = std::get<Snippet>(r);
        ordered_json out;
        out["lines"] = s.lines;
        out["cursor_hint"] = {{"line", s.cursor_hint.line_offset}, {"column", s.cursor_hint.column}};
        return json_response(200, out);
    }

    Config config_;
    SessionStore store_;
};

/// HTTP front end over Api.
class Server {
public:
    explicit Server(Config config = {}, std::ostream* log = &std::cerr) : api_(std::move(config)), log_(log) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            Response r = api_.handle(req.method, req.path, req.body);
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        // SO_REUSEADDR only: the library default SO_REUSEPORT would let a second
        // server share a port that is already in use.
        http_.set_socket_options([](auto sock) {
            int yes = 1;
            ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
        });
        const char* any = R"(/.*)";
        http_.Get(any, handler);
        http_.Post(any, handler);
        http_.Put(any, handler);
        http_.Delete(any, handler);
        http_.Options(any, [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        if (!api_.config().allow_origin.empty()) {
            http_.set_default_headers({
                {"Access-Control-Allow-Origin", api_.config().allow_origin},
                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                {"Access-Control-Allow-Headers", "Content-Type"},
            });
        }
        http_.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
            if (!log_) return;
            std::lock_guard lock(log_mutex_);
            *log_ << req.method << ' ' << req.path << ' ' << res.status << '\n' << std::flush;
        });
    }

    Api& api() { return api_; }

    bool bind(const std::string& host, int port) { return http_.bind_to_port(host, port); }
    int bind_any(const std::string& host) { return http_.bind_to_any_port(host); }
    bool listen_after_bind() { return http_.listen_after_bind(); }
    void stop() { http_.stop(); }
    void wait_until_ready() { http_.wait_until_ready(); }

private:
    Api api_;
    std::ostream* log_;
    std::mutex log_mutex_;
    httplib::Server http_;
};

}  // namespace mtlviz::service
