#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"

namespace semaclaw::kernel {

enum class Role { system, user, assistant, tool };

std::string_view to_string(Role role) noexcept;
Role role_from_string(std::string_view s);

struct Message {
    Role role = Role::user;
    std::string text;

    bool operator==(const Message&) const = default;
};

/// In-window history of one session. token_count is maintained incrementally
/// and always equals recount().
class ContextLedger {
public:
    void append(Message m);
    void replace(std::vector<Message> messages);

    const std::vector<Message>& messages() const noexcept { return messages_; }
    bool empty() const noexcept { return messages_.empty(); }
    std::size_t size() const noexcept { return messages_.size(); }
    std::size_t token_count() const noexcept { return token_count_; }
    std::size_t recount() const noexcept;

    std::size_t compaction_count() const noexcept { return compaction_count_; }
    void note_compaction() noexcept { ++compaction_count_; }

    TimePoint last_activity() const noexcept { return last_activity_; }
    void touch(TimePoint t) noexcept { last_activity_ = t; }

private:
    std::vector<Message> messages_;
    std::size_t token_count_ = 0;
    std::size_t compaction_count_ = 0;
    TimePoint last_activity_{};
};

std::size_t count_tokens(const std::vector<Message>& messages) noexcept;

nlohmann::json to_json(const Message& m);

}  // namespace semaclaw::kernel
