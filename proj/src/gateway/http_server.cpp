#include "semaclaw/gateway/http_server.hpp"

#include <unistd.h>

#include <httplib.h>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/text.hpp"
#include "semaclaw/gateway/wire.hpp"
#include "semaclaw/schedtask/job.hpp"

namespace semaclaw::gateway {

namespace {

using nlohmann::json;
using Handler = std::function<json(const httplib::Request&)>;

constexpr int kMaxEventWaitMs = 30000;

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        fail(Errc::validation, std::string("request body is not JSON: ") + e.what());
    }
}

std::string param(const httplib::Request& req, const std::string& name) {
    if (!req.has_param(name)) fail(Errc::argument, "missing query parameter '" + name + "'");
    return req.get_param_value(name);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        auto part = text::trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!part.empty()) out.push_back(part);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string json_str(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) fail(Errc::validation, std::string("missing string field '") + key + "'");
    return j[key].get<std::string>();
}

}  // namespace

struct HttpServer::Impl {
    Impl(Services& s, std::string t) : svc(s), token(std::move(t)) {}

    Services& svc;
    std::string token;
    httplib::Server server;

    bool authorized(const httplib::Request& req) const {
        if (token.empty()) return true;
        return req.get_header_value("Authorization") == "Bearer " + token;
    }

    void send_error(httplib::Response& res, Errc code, const std::string& message) {
        res.status = http_status(code);
        res.set_content(error_body(code, message).dump(), "application/json");
    }

    httplib::Server::Handler wrap(Handler h) {
        return [this, h](const httplib::Request& req, httplib::Response& res) {
            if (!authorized(req)) {
                res.status = 401;
                res.set_content(json{{"error", {{"code", "unauthorized"}, {"message", "bad or missing bearer token"}}}}.dump(),
                                "application/json");
                return;
            }
            try {
                res.set_content(h(req).dump(), "application/json");
            } catch (const Error& e) {
                send_error(res, e.code(), e.what());
            } catch (const json::exception& e) {
                send_error(res, Errc::validation, e.what());
            } catch (const std::exception& e) {
                send_error(res, Errc::io, e.what());
            }
        };
    }

    void routes() {
        server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(json{{"ok", true}, {"pid", static_cast<int>(::getpid())}}.dump(), "application/json");
        });

        server.Get("/agents", wrap([this](const httplib::Request&) {
            json out = json::array();
            for (const auto& a : svc.agents().all()) out.push_back(to_json(a));
            return out;
        }));
        server.Post("/agents", wrap([this](const httplib::Request& req) {
            return to_json(svc.agents().add(agent_from_json(body_of(req))));
        }));

        server.Get("/approvals", wrap([this](const httplib::Request&) {
            json out = json::array();
            for (const auto& r : svc.bridge().list_pending()) out.push_back(permbridge::to_json(r));
            return out;
        }));
        server.Post(R"(/approvals/([^/]+)/resolve)", wrap([this](const httplib::Request& req) {
            std::string id = req.matches[1];
            svc.resolve(id, permbridge::decision_from_json(body_of(req)));
            return json{{"resolved", id}};
        }));

        server.Get(R"(/wiki/([^/]+)/tree)", wrap([this](const httplib::Request& req) {
            return wiki::to_json(svc.wiki().store_for(req.matches[1]).inspect_tree());
        }));
        server.Get(R"(/wiki/([^/]+)/read)", wrap([this](const httplib::Request& req) {
            auto path = param(req, "path");
            return json{{"path", path}, {"content", svc.wiki().store_for(req.matches[1]).read_entry(path)}};
        }));
        server.Get(R"(/wiki/([^/]+)/search)", wrap([this](const httplib::Request& req) {
            auto& store = svc.wiki().store_for(req.matches[1]);
            store.index_sync();
            std::optional<std::string> q;
            if (req.has_param("q")) q = req.get_param_value("q");
            std::optional<std::vector<std::string>> tags;
            if (req.has_param("tags")) tags = split_csv(req.get_param_value("tags"));
            int k = req.has_param("k") ? std::stoi(req.get_param_value("k")) : 10;
            json out = json::array();
            for (const auto& h : store.search(q, tags, k)) out.push_back(wiki::to_json(h));
            return out;
        }));
        server.Post(R"(/wiki/([^/]+)/write)", wrap([this](const httplib::Request& req) {
            auto body = body_of(req);
            auto path = json_str(body, "path");
            svc.wiki().store_for(req.matches[1]).write_entry(path, json_str(body, "content"));
            return json{{"path", path}};
        }));
        server.Post(R"(/wiki/([^/]+)/move)", wrap([this](const httplib::Request& req) {
            auto body = body_of(req);
            return json{{"path", svc.wiki().store_for(req.matches[1]).move_entry(json_str(body, "from"), json_str(body, "to"))}};
        }));
        server.Post(R"(/wiki/([^/]+)/mkdir)", wrap([this](const httplib::Request& req) {
            auto body = body_of(req);
            return json{{"path", svc.wiki().store_for(req.matches[1]).create_category(json_str(body, "path"))}};
        }));
        server.Post(R"(/wiki/([^/]+)/save)", wrap([this](const httplib::Request& req) {
            auto body = body_of(req);
            std::optional<std::string> category;
            if (body.contains("category")) category = json_str(body, "category");
            auto tags = body.value("tags", std::vector<std::string>{});
            return json{{"path", svc.wiki().store_for(req.matches[1])
                                     .save_entry(json_str(body, "title"), json_str(body, "body"), tags, category)}};
        }));

        server.Get("/skills", wrap([this](const httplib::Request&) {
            json out = json::array();
            for (const auto& s : svc.skills().list_skills()) out.push_back(to_json(s));
            return out;
        }));
        server.Post(R"(/skills/([^/]+))", wrap([this](const httplib::Request& req) {
            auto body = body_of(req);
            if (!body.contains("active") || !body["active"].is_boolean()) fail(Errc::validation, "missing boolean 'active'");
            std::string id = req.matches[1];
            svc.skills().set_skill_active(id, body["active"].get<bool>());
            return json{{"skill_id", id}, {"active", body["active"]}};
        }));

        server.Get("/tasks", wrap([this](const httplib::Request&) {
            json out = json::array();
            for (const auto& j : svc.jobs().list_jobs()) out.push_back(schedtask::to_json(j));
            return out;
        }));
        server.Post("/tasks", wrap([this](const httplib::Request& req) {
            auto id = svc.jobs().register_job(schedtask::job_from_json(body_of(req)), svc.clock().now());
            return schedtask::to_json(*svc.jobs().find(id));
        }));
        server.Post(R"(/tasks/([^/]+)/cancel)", wrap([this](const httplib::Request& req) {
            std::string id = req.matches[1];
            svc.jobs().cancel_job(id);
            return json{{"cancelled", id}};
        }));
        server.Post(R"(/tasks/([^/]+)/run)", wrap([this](const httplib::Request& req) {
            return schedtask::to_json(svc.scheduler().run_now(req.matches[1]));
        }));

        server.Get("/sessions", wrap([this](const httplib::Request&) {
            auto& rt = svc.runtime();
            json out = json::array();
            for (const auto& id : rt.sessions()) {
                try {
                    out.push_back({{"session_id", id},
                                   {"agent", rt.agent_of(id)},
                                   {"tokens", rt.token_count(id)},
                                   {"compactions", rt.compaction_count(id)},
                                   {"workspace", rt.workspace(id).string()}});
                } catch (const Error&) {
                    // closed while listing
                }
            }
            return out;
        }));
        server.Post(R"(/sessions/([^/]+)/turns)", wrap([this](const httplib::Request& req) {
            auto body = body_of(req);
            std::string agent = req.matches[1];
            auto session = svc.primary_session(agent);
            auto result = svc.runtime().submit_turn(session, json_str(body, "text"));
            return to_json(result, session);
        }));

        server.Get("/dispatch", wrap([this](const httplib::Request&) { return dispatch::to_json(svc.dispatcher().state()); }));

        server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
            if (!authorized(req)) {
                res.status = 401;
                return;
            }
            std::uint64_t since = 0;
            int wait_ms = 0;
            try {
                if (req.has_param("since")) since = std::stoull(req.get_param_value("since"));
                if (req.has_param("wait_ms")) wait_ms = std::stoi(req.get_param_value("wait_ms"));
            } catch (const std::exception&) {
                send_error(res, Errc::argument, "since and wait_ms must be integers");
                return;
            }
            wait_ms = std::clamp(wait_ms, 0, kMaxEventWaitMs);
            std::string out;
            for (const auto& frame : svc.events().since(since, std::chrono::milliseconds(wait_ms))) {
                out += frame.dump();
                out += '\n';
            }
            res.set_content(out, "application/x-ndjson");
        });
    }
};

HttpServer::HttpServer(Services& services, std::string token)
    : impl_(std::make_unique<Impl>(services, std::move(token))) {
    impl_->server.new_task_queue = [] { return new httplib::ThreadPool(32); };
    impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) fail(Errc::io, "cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    return bound;
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->svc.events().close();
    impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace semaclaw::gateway
