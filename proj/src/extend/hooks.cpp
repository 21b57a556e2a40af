#include "semaclaw/extend/hooks.hpp"

#include <algorithm>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/common/process.hpp"

namespace semaclaw::extend {

namespace {

constexpr std::pair<HookEvent, std::string_view> kEventNames[] = {
    {HookEvent::task_start, "task:start"},
    {HookEvent::tool_pre, "tool:pre"},
    {HookEvent::tool_post, "tool:post"},
    {HookEvent::permission_request, "permission:request"},
    {HookEvent::compact_exec, "compact:exec"},
    {HookEvent::task_done, "task:done"},
    {HookEvent::error, "error"},
};

struct ExternalResult {
    Verdict verdict = Verdict::proceed;
    std::optional<nlohmann::json> payload;
};

ExternalResult run_external(const std::string& command, const nlohmann::json& payload) {
    ProcessOptions opts;
    opts.stdin_data = payload.dump();
    opts.timeout = std::chrono::seconds{30};
    auto r = run_shell(command, opts);
    ExternalResult out;
    if (r.timed_out) return out;
    if (r.exit_code == kExternalBlockExit) out.verdict = Verdict::block;
    if (r.exit_code == 0 && !r.out.empty()) {
        try {
            out.payload = nlohmann::json::parse(r.out);
        } catch (const nlohmann::json::exception&) {
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(HookEvent e) noexcept {
    for (const auto& [k, n] : kEventNames) {
        if (k == e) return n;
    }
    return "error";
}

HookEvent hook_event_from_string(std::string_view s) {
    for (const auto& [k, n] : kEventNames) {
        if (n == s) return k;
    }
    fail(Errc::validation, "unknown hook event '" + std::string(s) + "'");
}

std::string_view to_string(HookCapability c) noexcept {
    switch (c) {
        case HookCapability::observe: return "observe";
        case HookCapability::modify: return "modify";
        case HookCapability::block: return "block";
    }
    return "observe";
}

HookCapability hook_capability_from_string(std::string_view s) {
    if (s == "observe") return HookCapability::observe;
    if (s == "modify") return HookCapability::modify;
    if (s == "block") return HookCapability::block;
    fail(Errc::validation, "unknown hook capability '" + std::string(s) + "'");
}

void HookRegistry::register_hook(HookRegistration reg) {
    if (reg.hook_id.empty()) fail(Errc::validation, "hook id is empty");
    bool has_handler = reg.command.has_value() ||
                       (reg.capability == HookCapability::observe && reg.observe) ||
                       (reg.capability == HookCapability::modify && reg.modify) ||
                       (reg.capability == HookCapability::block && reg.block);
    if (!has_handler) fail(Errc::validation, "hook '" + reg.hook_id + "' has no handler for its capability");
    std::lock_guard lock(mu_);
    for (const auto& h : *hooks_) {
        if (h.hook_id == reg.hook_id) fail(Errc::validation, "hook '" + reg.hook_id + "' already registered");
    }
    auto next = std::make_shared<std::vector<HookRegistration>>(*hooks_);
    next->push_back(std::move(reg));
    std::stable_sort(next->begin(), next->end(), [](const auto& a, const auto& b) {
        return a.order != b.order ? a.order < b.order : a.hook_id < b.hook_id;
    });
    hooks_ = std::move(next);
}

bool HookRegistry::unregister_hook(const std::string& hook_id) {
    std::lock_guard lock(mu_);
    auto next = std::make_shared<std::vector<HookRegistration>>(*hooks_);
    auto n = std::erase_if(*next, [&](const auto& h) { return h.hook_id == hook_id; });
    hooks_ = std::move(next);
    return n > 0;
}

std::vector<HookRegistration> HookRegistry::list() const {
    std::lock_guard lock(mu_);
    return *hooks_;
}

HookOutcome HookRegistry::fire(HookEvent event, nlohmann::json payload) const {
    std::shared_ptr<const std::vector<HookRegistration>> snap;
    {
        std::lock_guard lock(mu_);
        snap = hooks_;
    }
    HookOutcome out{std::move(payload), Verdict::proceed, {}};
    for (const auto& h : *snap) {
        if (h.event != event) continue;
        out.ran.push_back(h.hook_id);
        if (h.command) {
            auto r = run_external(*h.command, out.payload);
            if (h.capability == HookCapability::modify && r.payload) out.payload = std::move(*r.payload);
            if (h.capability == HookCapability::block && r.verdict == Verdict::block) {
                out.verdict = Verdict::block;
                break;
            }
            continue;
        }
        switch (h.capability) {
            case HookCapability::observe: {
                const nlohmann::json snapshot = out.payload;
                h.observe(snapshot);
                break;
            }
            case HookCapability::modify:
                h.modify(out.payload);
                break;
            case HookCapability::block:
                if (h.block(out.payload) == Verdict::block) out.verdict = Verdict::block;
                break;
        }
        if (out.verdict == Verdict::block) break;
    }
    return out;
}

std::vector<HookRegistration> load_command_hooks(const std::filesystem::path& dir) {
    std::vector<HookRegistration> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir)) return out;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        try {
            auto j = nlohmann::json::parse(fsutil::read_file(path));
            HookRegistration reg;
            reg.hook_id = j.at("hook_id");
            reg.event = hook_event_from_string(j.at("event").get<std::string>());
            reg.capability = hook_capability_from_string(j.value("capability", "observe"));
            reg.order = j.value("order", 0);
            reg.command = j.at("command").get<std::string>();
            out.push_back(std::move(reg));
        } catch (const nlohmann::json::exception& e) {
            fail(Errc::config, path.string() + ": " + e.what());
        }
    }
    return out;
}

}  // namespace semaclaw::extend
