#pragma once

#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "semaclaw/common/lock.hpp"
#include "semaclaw/gateway/config.hpp"
#include "semaclaw/gateway/http_server.hpp"
#include "semaclaw/gateway/services.hpp"

namespace semaclaw::gateway {

inline constexpr Duration kMaintenanceInterval = std::chrono::seconds{30};

/// The long-running process: startup recovery, then the dispatch tick loop,
/// the scheduler timer, idle-session reaping and the HTTP listener.
class Daemon {
public:
    Daemon(GatewayConfig config, Clock& clock, std::optional<std::filesystem::path> executable = std::nullopt,
           kernel::AdapterFactory adapters = {});
    ~Daemon();
    Daemon(const Daemon&) = delete;
    Daemon& operator=(const Daemon&) = delete;

    /// Returns the bound HTTP port and publishes it in daemon.json.
    /// Errors: lock_contention when another daemon owns the state file,
    /// io when the port cannot be bound.
    int start();
    void stop();

    Services& services();
    const dispatch::RecoveryReport& recovery() const noexcept { return recovery_; }

private:
    GatewayConfig config_;
    Clock& clock_;
    std::optional<std::filesystem::path> executable_;
    kernel::AdapterFactory adapters_;
    std::optional<AdvisoryLock> lock_;
    std::unique_ptr<Services> services_;
    std::unique_ptr<HttpServer> http_;
    dispatch::RecoveryReport recovery_;

    std::mutex mu_;
    std::condition_variable cv_;
    bool stopping_ = false;
    std::thread maintenance_;
};

}  // namespace semaclaw::gateway
