#pragma once

#include <memory>
#include <string>
#include <thread>

#include "semaclaw/gateway/services.hpp"

namespace semaclaw::gateway {

/// JSON API over the services. Every handler is a thin mapping onto a module
/// operation; semaclaw::Error codes map to 4xx/5xx statuses.
///
///   GET  /health
///   GET  /agents                      POST /agents
///   GET  /approvals                   POST /approvals/{id}/resolve
///   GET  /wiki/{agent}/tree|read|search
///   POST /wiki/{agent}/write|move|mkdir|save
///   GET  /skills                      POST /skills/{id}
///   GET  /tasks   POST /tasks   POST /tasks/{id}/cancel   POST /tasks/{id}/run
///   GET  /sessions                    POST /sessions/{agent}/turns
///   GET  /dispatch
///   GET  /events?since=N&wait_ms=M    newline-delimited JSON frames
class HttpServer {
public:
    HttpServer(Services& services, std::string token = {});
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port. Errors: io when the bind fails.
    int start(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

}  // namespace semaclaw::gateway
