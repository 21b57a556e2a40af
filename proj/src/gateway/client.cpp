#include "semaclaw/gateway/client.hpp"

#include <httplib.h>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"

namespace semaclaw::gateway {

namespace {

constexpr time_t kReadTimeoutSeconds = 24 * 3600;

httplib::Headers headers_for(const std::string& token) {
    httplib::Headers h;
    if (!token.empty()) h.emplace("Authorization", "Bearer " + token);
    return h;
}

std::string checked(const httplib::Result& res, const std::string& what) {
    if (!res) fail(Errc::io, "daemon unreachable (" + what + "): " + httplib::to_string(res.error()));
    if (res->status >= 200 && res->status < 300) return res->body;
    Errc code = Errc::io;
    std::string message = "HTTP " + std::to_string(res->status);
    try {
        auto j = nlohmann::json::parse(res->body);
        const auto& err = j.at("error");
        if (auto c = errc_from_string(err.value("code", ""))) code = *c;
        message = err.value("message", message);
    } catch (const std::exception&) {
    }
    fail(code, message);
}

}  // namespace

Client::Client(std::string host, int port, std::string token)
    : host_(std::move(host)), port_(port), token_(std::move(token)) {}

Client Client::for_data_root(const GatewayConfig& config) {
    auto text = fsutil::try_read_file(config.endpoint_path());
    if (!text) fail(Errc::not_found, "no daemon is running for " + config.data_root.string());
    try {
        auto j = nlohmann::json::parse(*text);
        return Client(j.at("host").get<std::string>(), j.at("port").get<int>(), config.token);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::io, "unreadable " + config.endpoint_path().string() + ": " + e.what());
    }
}

nlohmann::json Client::get(const std::string& path) const { return nlohmann::json::parse(get_text(path)); }

std::string Client::get_text(const std::string& path) const {
    httplib::Client c(host_, port_);
    c.set_read_timeout(kReadTimeoutSeconds, 0);
    return checked(c.Get(path, headers_for(token_)), "GET " + path);
}

nlohmann::json Client::post(const std::string& path, const nlohmann::json& body) const {
    httplib::Client c(host_, port_);
    c.set_read_timeout(kReadTimeoutSeconds, 0);
    return nlohmann::json::parse(checked(c.Post(path, headers_for(token_), body.dump(), "application/json"), "POST " + path));
}

}  // namespace semaclaw::gateway
