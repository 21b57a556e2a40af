#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/kernel/ledger.hpp"

namespace semaclaw::kernel {

struct ToolDescriptor {
    std::string name;
    std::string description;
    nlohmann::json schema;
};

/// Everything the model sees for one step.
struct ModelContext {
    std::string session_id;
    std::string agent_folder;
    std::string system_text;
    std::vector<Message> messages;
    std::vector<ToolDescriptor> tools;
};

struct Reply {
    std::string text;
};

struct ToolCall {
    std::string name;
    nlohmann::json args = nlohmann::json::object();
    std::string rationale;
};

using StepOutcome = std::variant<Reply, ToolCall>;

/// The model boundary. Implementations throw Error(Errc::adapter) when the
/// backing model is unreachable or misbehaves.
class ModelAdapter {
public:
    virtual ~ModelAdapter() = default;
    virtual StepOutcome step(const ModelContext& context) = 0;
    virtual std::string summarize(std::span<const Message> history) = 0;
};

/// Deterministic adapter driven by a declarative program.
///
/// step() consumes entries of kind "reply" ({"text"} or {"echo": true} to
/// repeat the last user message), "tool_call" ({"tool", "args", "rationale"})
/// and "fail" ({"message"}). summarize() consumes, on its own cursor, entries of
/// kind "summary" ({"text"}) and "summary_fail"; with none left it produces a
/// short built-in digest.
class ScriptedAdapter final : public ModelAdapter {
public:
    explicit ScriptedAdapter(nlohmann::json program, bool repeat = false);

    static std::shared_ptr<ScriptedAdapter> from_file(const std::filesystem::path& path,
                                                      bool repeat = false);

    StepOutcome step(const ModelContext& context) override;
    std::string summarize(std::span<const Message> history) override;

    std::size_t step_calls() const noexcept { return step_calls_; }
    std::size_t summarize_calls() const noexcept { return summarize_calls_; }
    std::vector<ModelContext> seen_contexts() const;

private:
    std::vector<nlohmann::json> steps_;
    std::vector<nlohmann::json> summaries_;
    bool repeat_;
    std::size_t step_cursor_ = 0;
    std::size_t summary_cursor_ = 0;
    std::atomic<std::size_t> step_calls_{0};
    std::atomic<std::size_t> summarize_calls_{0};
    mutable std::mutex mu_;
    std::vector<ModelContext> seen_;
};

}  // namespace semaclaw::kernel
