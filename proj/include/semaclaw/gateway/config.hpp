#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "semaclaw/common/clock.hpp"

namespace semaclaw::gateway {

namespace fs = std::filesystem;

/// Daemon and CLI settings. Read from a sectioned key = value file:
///
///     [server]
///     host = 127.0.0.1
///     port = 8787
///
/// and overridden by SEMACLAW_<SECTION>_<KEY> environment variables.
struct GatewayConfig {
    fs::path data_root;

    // [server]
    std::string host = "127.0.0.1";
    int port = 8787;  // 0 picks a free port
    std::string token;  // bearer token; empty disables the check

    // [runtime]
    std::size_t context_limit = 32768;
    Duration idle_timeout = std::chrono::minutes{30};
    int max_steps = 32;

    // [model]
    std::string adapter;  // "scripted:<path>" or an http:// chat completions URL; per-agent overrides below
    std::map<std::string, std::string> agent_adapters;  // "agent.<folder> = ..."
    std::string model_name = "default";
    std::string api_key;

    // [memory]
    bool embeddings = true;
    std::optional<fs::path> stopwords;

    // [dispatch]
    std::optional<fs::path> state_file;  // defaults to <data_root>/dispatch.json
    Duration task_timeout = std::chrono::minutes{10};
    bool tool_subprocess = true;

    // [scheduler]
    Duration scheduler_interval = std::chrono::seconds{1};

    fs::path state_path() const { return state_file.value_or(data_root / "dispatch.json"); }
    fs::path jobs_path() const { return data_root / "jobs.json"; }
    fs::path skills_dir() const { return data_root / "skills"; }
    fs::path skills_state() const { return data_root / "skills.json"; }
    fs::path tools_dir() const { return data_root / "tools"; }
    fs::path hooks_dir() const { return data_root / "hooks"; }
    fs::path outbox_path() const { return data_root / "outbox.ndjson"; }
    /// Written by a running daemon: {"host", "port", "pid"}.
    fs::path endpoint_path() const { return data_root / "daemon.json"; }

    /// The adapter binding for an agent, falling back to the default.
    std::string adapter_for(const std::string& folder) const;
};

/// Applies `text` (the file contents) on top of `base`. Unknown sections or
/// keys and malformed values are Errc::config errors naming `origin:line`.
GatewayConfig parse_config(const std::string& text, GatewayConfig base = {}, const std::string& origin = "config");

/// Applies SEMACLAW_<SECTION>_<KEY> variables from `env` (name -> value).
void apply_env_overrides(GatewayConfig& config, const std::map<std::string, std::string>& env);

/// Builds the configuration for `data_root`: defaults, then `file` (or
/// <data_root>/semaclaw.conf when present), then the process environment.
GatewayConfig load_config(const fs::path& data_root, const std::optional<fs::path>& file = std::nullopt);

}  // namespace semaclaw::gateway
