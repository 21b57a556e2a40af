#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace semaclaw {

struct ProcessOptions {
    std::optional<std::filesystem::path> workdir;
    std::map<std::string, std::string> env;  // added to the inherited environment
    std::string stdin_data;
    std::chrono::milliseconds timeout{std::chrono::minutes{5}};
    std::size_t max_output = 64 * 1024;  // per stream; excess is discarded
};

struct ProcessResult {
    int exit_code = -1;  // -1 when killed by a signal or timed out
    bool timed_out = false;
    bool truncated = false;
    std::string out;
    std::string err;
};

/// Runs `argv` (argv[0] resolved via PATH), feeding stdin and capturing both
/// output streams. The child is killed when the timeout elapses.
ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options = {});

/// `/bin/sh -c command`.
ProcessResult run_shell(const std::string& command, const ProcessOptions& options = {});

}  // namespace semaclaw
