#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"

namespace semaclaw::gateway {

/// Bounded, numbered buffer of event frames for HTTP consumers. Appending
/// never blocks; when the buffer is full the oldest frame is discarded, and a
/// reader that falls behind gets a {"type": "gap"} frame in its place.
class EventLog {
public:
    explicit EventLog(std::size_t capacity = 4096) : capacity_(capacity) {}

    /// Stamps the frame with "id" and returns it.
    std::uint64_t append(nlohmann::json frame);

    /// Frames with id > `since`, waiting up to `wait` (real time) for the first
    /// one. At most `max` frames.
    std::vector<nlohmann::json> since(std::uint64_t since, std::chrono::milliseconds wait, std::size_t max = 512);

    std::uint64_t last_id() const;
    /// Wakes every waiting reader (used on shutdown).
    void close();

private:
    const std::size_t capacity_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<nlohmann::json> frames_;
    std::uint64_t next_id_ = 1;
    bool closed_ = false;
};

}  // namespace semaclaw::gateway
