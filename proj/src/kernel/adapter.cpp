#include "semaclaw/kernel/adapter.hpp"

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"

namespace semaclaw::kernel {

ScriptedAdapter::ScriptedAdapter(nlohmann::json program, bool repeat) : repeat_(repeat) {
    if (!program.is_array()) fail(Errc::validation, "scripted program must be a JSON list of steps");
    for (auto& entry : program) {
        auto kind = entry.value("kind", "");
        if (kind == "reply" || kind == "tool_call" || kind == "fail") {
            if (kind == "tool_call" && !entry.contains("tool")) {
                fail(Errc::validation, "tool_call step needs a \"tool\" field");
            }
            steps_.push_back(std::move(entry));
        } else if (kind == "summary" || kind == "summary_fail") {
            summaries_.push_back(std::move(entry));
        } else {
            fail(Errc::validation, "unknown scripted step kind '" + kind + "'");
        }
    }
}

std::shared_ptr<ScriptedAdapter> ScriptedAdapter::from_file(const std::filesystem::path& path,
                                                            bool repeat) {
    nlohmann::json program;
    try {
        program = nlohmann::json::parse(fsutil::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::validation, path.string() + ": " + e.what());
    }
    return std::make_shared<ScriptedAdapter>(std::move(program), repeat);
}

StepOutcome ScriptedAdapter::step(const ModelContext& context) {
    ++step_calls_;
    nlohmann::json entry;
    {
        std::lock_guard lock(mu_);
        seen_.push_back(context);
        if (step_cursor_ >= steps_.size()) {
            if (!repeat_ || steps_.empty()) fail(Errc::adapter, "scripted program exhausted");
            step_cursor_ = 0;
        }
        entry = steps_[step_cursor_++];
    }
    auto kind = entry.at("kind").get<std::string>();
    if (kind == "fail") fail(Errc::adapter, entry.value("message", "scripted failure"));
    if (kind == "tool_call") {
        return ToolCall{entry.at("tool").get<std::string>(),
                        entry.value("args", nlohmann::json::object()),
                        entry.value("rationale", "")};
    }
    if (entry.value("echo", false)) {
        for (auto it = context.messages.rbegin(); it != context.messages.rend(); ++it) {
            if (it->role == Role::user) return Reply{it->text};
        }
        return Reply{""};
    }
    return Reply{entry.value("text", "")};
}

std::string ScriptedAdapter::summarize(std::span<const Message> history) {
    ++summarize_calls_;
    std::lock_guard lock(mu_);
    if (summary_cursor_ < summaries_.size()) {
        const auto& entry = summaries_[summary_cursor_++];
        if (entry.at("kind") == "summary_fail") {
            fail(Errc::adapter, entry.value("message", "scripted summarizer failure"));
        }
        return entry.value("text", "");
    }
    std::size_t users = 0;
    for (const auto& m : history) users += m.role == Role::user;
    return "Summary of " + std::to_string(history.size()) + " messages (" +
           std::to_string(users) + " from the user).";
}

std::vector<ModelContext> ScriptedAdapter::seen_contexts() const {
    std::lock_guard lock(mu_);
    return seen_;
}

}  // namespace semaclaw::kernel
