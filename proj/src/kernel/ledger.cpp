#include "semaclaw/kernel/ledger.hpp"

#include "semaclaw/common/error.hpp"
#include "semaclaw/kernel/tokens.hpp"

namespace semaclaw::kernel {

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
        case Role::tool: return "tool";
    }
    return "user";
}

Role role_from_string(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    if (s == "tool") return Role::tool;
    fail(Errc::argument, "unknown role '" + std::string(s) + "'");
}

void ContextLedger::append(Message m) {
    token_count_ += count_tokens(m.text);
    messages_.push_back(std::move(m));
}

void ContextLedger::replace(std::vector<Message> messages) {
    messages_ = std::move(messages);
    token_count_ = recount();
}

std::size_t ContextLedger::recount() const noexcept { return kernel::count_tokens(messages_); }

std::size_t count_tokens(const std::vector<Message>& messages) noexcept {
    std::size_t total = 0;
    for (const auto& m : messages) total += count_tokens(m.text);
    return total;
}

nlohmann::json to_json(const Message& m) {
    return {{"role", to_string(m.role)}, {"text", m.text}};
}

}  // namespace semaclaw::kernel
