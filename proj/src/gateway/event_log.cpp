#include "semaclaw/gateway/event_log.hpp"

namespace semaclaw::gateway {

std::uint64_t EventLog::append(nlohmann::json frame) {
    std::uint64_t id;
    {
        std::lock_guard lock(mu_);
        id = next_id_++;
        frame["id"] = id;
        frames_.push_back(std::move(frame));
        while (frames_.size() > capacity_) frames_.pop_front();
    }
    cv_.notify_all();
    return id;
}

std::vector<nlohmann::json> EventLog::since(std::uint64_t since, std::chrono::milliseconds wait, std::size_t max) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, wait, [&] { return closed_ || next_id_ - 1 > since; });
    std::vector<nlohmann::json> out;
    if (frames_.empty()) return out;
    auto first = frames_.front()["id"].get<std::uint64_t>();
    if (since + 1 < first) out.push_back({{"type", "gap"}, {"id", first - 1}, {"missed", first - 1 - since}});
    for (const auto& f : frames_) {
        if (out.size() >= max) break;
        if (f["id"].get<std::uint64_t>() > since) out.push_back(f);
    }
    return out;
}

std::uint64_t EventLog::last_id() const {
    std::lock_guard lock(mu_);
    return next_id_ - 1;
}

void EventLog::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

}  // namespace semaclaw::gateway
