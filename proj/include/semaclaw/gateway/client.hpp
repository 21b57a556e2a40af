#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "semaclaw/gateway/config.hpp"

namespace semaclaw::gateway {

/// Blocking JSON client for a running daemon. Error responses are rethrown as
/// semaclaw::Error with the server's code.
class Client {
public:
    Client(std::string host, int port, std::string token = {});

    /// Reads <data_root>/daemon.json. Errors: not_found when no daemon has
    /// published an endpoint.
    static Client for_data_root(const GatewayConfig& config);

    nlohmann::json get(const std::string& path) const;
    nlohmann::json post(const std::string& path, const nlohmann::json& body) const;
    /// Raw body of a GET (the NDJSON event stream).
    std::string get_text(const std::string& path) const;

    int port() const noexcept { return port_; }

private:
    std::string host_;
    int port_;
    std::string token_;
};

}  // namespace semaclaw::gateway
