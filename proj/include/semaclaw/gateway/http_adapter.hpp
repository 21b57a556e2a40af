#pragma once

#include <string>

#include "semaclaw/kernel/adapter.hpp"

namespace semaclaw::gateway {

/// Talks to a chat-completions style endpoint over plain HTTP. Tools are
/// offered as functions; a returned function call becomes a ToolCall.
class HttpChatAdapter final : public kernel::ModelAdapter {
public:
    /// `url` is the full endpoint, e.g. http://127.0.0.1:8000/v1/chat/completions.
    HttpChatAdapter(std::string url, std::string model, std::string api_key);

    kernel::StepOutcome step(const kernel::ModelContext& context) override;
    std::string summarize(std::span<const kernel::Message> history) override;

private:
    nlohmann::json post(const nlohmann::json& body);

    std::string base_;
    std::string path_;
    std::string model_;
    std::string api_key_;
};

}  // namespace semaclaw::gateway
