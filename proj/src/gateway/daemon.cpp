#include "semaclaw/gateway/daemon.hpp"

#include <unistd.h>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"

namespace semaclaw::gateway {

Daemon::Daemon(GatewayConfig config, Clock& clock, std::optional<std::filesystem::path> executable,
               kernel::AdapterFactory adapters)
    : config_(std::move(config)), clock_(clock), executable_(std::move(executable)), adapters_(std::move(adapters)) {}

Daemon::~Daemon() { stop(); }

Services& Daemon::services() {
    if (!services_) fail(Errc::invalid_state, "daemon is not running");
    return *services_;
}

int Daemon::start() {
    if (services_) fail(Errc::invalid_state, "daemon already started");
    std::error_code ec;
    fs::create_directories(config_.data_root, ec);
    auto lock_path = config_.state_path();
    lock_path += ".daemon";
    lock_ = AdvisoryLock::acquire_nonblocking(lock_path);

    services_ = std::make_unique<Services>(config_, clock_, executable_, adapters_);
    recovery_ = services_->dispatcher().recover_on_startup();
    services_->dispatcher().start();
    services_->scheduler().start(config_.scheduler_interval);

    stopping_ = false;
    maintenance_ = std::thread([this] {
        std::unique_lock lock(mu_);
        while (!stopping_) {
            lock.unlock();
            try {
                services_->maintain();
            } catch (const std::exception&) {
                // next pass retries
            }
            lock.lock();
            cv_.wait_for(lock, kMaintenanceInterval, [this] { return stopping_; });
        }
    });

    http_ = std::make_unique<HttpServer>(*services_, config_.token);
    int port;
    try {
        port = http_->start(config_.host, config_.port);
    } catch (...) {
        stop();
        throw;
    }
    nlohmann::json endpoint{{"host", config_.host}, {"port", port}, {"pid", static_cast<int>(::getpid())}};
    fsutil::atomic_write(config_.endpoint_path(), endpoint.dump());
    return port;
}

void Daemon::stop() {
    if (!services_) return;
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    if (maintenance_.joinable()) maintenance_.join();
    services_->deny_pending("daemon shutting down");
    if (http_) {
        http_->stop();
        http_.reset();
    }
    std::error_code ec;
    auto text = fsutil::try_read_file(config_.endpoint_path());
    if (text && text->find("\"pid\":" + std::to_string(::getpid())) != std::string::npos) {
        fs::remove(config_.endpoint_path(), ec);
    }
    services_.reset();
    lock_.reset();
}

}  // namespace semaclaw::gateway
