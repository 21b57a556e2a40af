#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"

namespace semaclaw::kernel {

enum class EventKind {
    session_start,
    session_end,
    compact_start,
    compact_exec,
    tool_pre,
    tool_post,
    task_start,
    task_done,
    error,
};

/// Wire names: "session:start", "compact:exec", ...
std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> event_kind_from_string(std::string_view s) noexcept;

struct RuntimeEvent {
    EventKind kind = EventKind::error;
    std::string session_id;
    std::uint64_t seq = 0;  // assigned by the bus, global emission order
    TimePoint time{};
    nlohmann::json payload = nlohmann::json::object();
};

nlohmann::json to_json(const RuntimeEvent& ev);

/// Typed event bus. Publishing never blocks on sinks: every subscription has
/// a bounded queue drained by a delivery thread, and on overflow the oldest
/// queued event is dropped and counted.
class EventBus {
public:
    using Sink = std::function<void(const RuntimeEvent&)>;

    class Subscription {
    public:
        Subscription() = default;
        Subscription(Subscription&& other) noexcept : bus_(other.bus_), id_(other.id_) {
            other.bus_ = nullptr;
        }
        Subscription& operator=(Subscription&& other) noexcept;
        Subscription(const Subscription&) = delete;
        Subscription& operator=(const Subscription&) = delete;
        ~Subscription() { reset(); }

        void reset();
        bool active() const noexcept { return bus_ != nullptr; }

    private:
        friend class EventBus;
        Subscription(EventBus* bus, std::uint64_t id) : bus_(bus), id_(id) {}
        EventBus* bus_ = nullptr;
        std::uint64_t id_ = 0;
    };

    explicit EventBus(std::size_t queue_capacity = 4096);
    ~EventBus();
    EventBus(const EventBus&) = delete;
    EventBus& operator=(const EventBus&) = delete;

    /// An empty kind set subscribes to everything.
    [[nodiscard]] Subscription subscribe(std::set<EventKind> kinds, Sink sink);

    /// Returns the event with its sequence number filled in.
    RuntimeEvent publish(RuntimeEvent ev);

    /// Blocks until every queued event has been delivered.
    void flush();

    std::uint64_t dropped() const;

private:
    struct Subscriber {
        std::set<EventKind> kinds;
        Sink sink;
        std::deque<RuntimeEvent> queue;
    };

    void unsubscribe(std::uint64_t id);
    void deliver_loop();
    bool idle_locked() const;

    const std::size_t capacity_;
    mutable std::mutex mu_;
    std::condition_variable work_cv_;
    std::condition_variable idle_cv_;
    std::map<std::uint64_t, Subscriber> subscribers_;
    std::uint64_t next_id_ = 1;
    std::uint64_t next_seq_ = 1;
    std::uint64_t dropped_ = 0;
    std::optional<std::uint64_t> in_flight_;
    bool stopping_ = false;
    std::thread worker_;
};

}  // namespace semaclaw::kernel
