#include "semaclaw/gateway/http_adapter.hpp"

#include <httplib.h>

#include "semaclaw/common/error.hpp"
#include "semaclaw/extend/schema.hpp"

namespace semaclaw::gateway {

namespace {

using nlohmann::json;

json json_schema(const json& arg_schema) {
    json props = json::object();
    json required = json::array();
    for (const auto& f : extend::ArgSchema::from_json(arg_schema).fields) {
        json p{{"description", f.description}};
        if (f.type != extend::ArgType::any) p["type"] = std::string(extend::to_string(f.type));
        props[f.name] = p;
        if (f.required) required.push_back(f.name);
    }
    return {{"type", "object"}, {"properties", props}, {"required", required}, {"additionalProperties", false}};
}

json wire_message(const kernel::Message& m) {
    switch (m.role) {
        case kernel::Role::system: return {{"role", "system"}, {"content", m.text}};
        case kernel::Role::user: return {{"role", "user"}, {"content", m.text}};
        case kernel::Role::assistant: return {{"role", "assistant"}, {"content", m.text}};
        case kernel::Role::tool: return {{"role", "user"}, {"content", "[tool result]\n" + m.text}};
    }
    return {};
}

}  // namespace

HttpChatAdapter::HttpChatAdapter(std::string url, std::string model, std::string api_key)
    : model_(std::move(model)), api_key_(std::move(api_key)) {
    if (url.rfind("http://", 0) != 0) fail(Errc::config, "http adapter needs an http:// url, got '" + url + "'");
    auto slash = url.find('/', 7);
    base_ = slash == std::string::npos ? url : url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

json HttpChatAdapter::post(const json& body) {
    httplib::Client client(base_);
    client.set_read_timeout(300, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) fail(Errc::adapter, "model endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) fail(Errc::adapter, "model endpoint returned " + std::to_string(res->status));
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        fail(Errc::adapter, std::string("model endpoint sent invalid JSON: ") + e.what());
    }
}

kernel::StepOutcome HttpChatAdapter::step(const kernel::ModelContext& context) {
    json messages = json::array({{{"role", "system"}, {"content", context.system_text}}});
    for (const auto& m : context.messages) messages.push_back(wire_message(m));
    json body{{"model", model_}, {"messages", messages}};
    if (!context.tools.empty()) {
        json tools = json::array();
        for (const auto& t : context.tools) {
            tools.push_back({{"type", "function"},
                             {"function", {{"name", t.name}, {"description", t.description},
                                           {"parameters", json_schema(t.schema)}}}});
        }
        body["tools"] = tools;
    }
    auto reply = post(body);
    try {
        const auto& msg = reply.at("choices").at(0).at("message");
        if (msg.contains("tool_calls") && msg["tool_calls"].is_array() && !msg["tool_calls"].empty()) {
            const auto& fn = msg["tool_calls"][0].at("function");
            kernel::ToolCall call;
            call.name = fn.at("name").get<std::string>();
            const auto& raw = fn.value("arguments", json("{}"));
            call.args = raw.is_string() ? json::parse(raw.get<std::string>()) : raw;
            if (msg.contains("content") && msg["content"].is_string()) call.rationale = msg["content"];
            return call;
        }
        return kernel::Reply{msg.value("content", std::string())};
    } catch (const json::exception& e) {
        fail(Errc::adapter, std::string("unexpected model response: ") + e.what());
    }
}

std::string HttpChatAdapter::summarize(std::span<const kernel::Message> history) {
    json messages = json::array(
        {{{"role", "system"},
          {"content", "Summarize the conversation so far. Keep decisions, open tasks and facts needed to continue."}}});
    for (const auto& m : history) messages.push_back(wire_message(m));
    auto reply = post({{"model", model_}, {"messages", messages}});
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        fail(Errc::adapter, std::string("unexpected model response: ") + e.what());
    }
}

}  // namespace semaclaw::gateway
