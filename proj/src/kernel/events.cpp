#include "semaclaw/kernel/events.hpp"

namespace semaclaw::kernel {

namespace {

constexpr std::pair<EventKind, std::string_view> kNames[] = {
    {EventKind::session_start, "session:start"}, {EventKind::session_end, "session:end"},
    {EventKind::compact_start, "compact:start"}, {EventKind::compact_exec, "compact:exec"},
    {EventKind::tool_pre, "tool:pre"},           {EventKind::tool_post, "tool:post"},
    {EventKind::task_start, "task:start"},       {EventKind::task_done, "task:done"},
    {EventKind::error, "error"},
};

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
    for (const auto& [k, name] : kNames) {
        if (k == kind) return name;
    }
    return "error";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) noexcept {
    for (const auto& [k, name] : kNames) {
        if (name == s) return k;
    }
    return std::nullopt;
}

nlohmann::json to_json(const RuntimeEvent& ev) {
    return {{"kind", to_string(ev.kind)},
            {"session_id", ev.session_id},
            {"seq", ev.seq},
            {"time_ms", to_epoch_ms(ev.time)},
            {"payload", ev.payload}};
}

EventBus::Subscription& EventBus::Subscription::operator=(Subscription&& other) noexcept {
    if (this != &other) {
        reset();
        bus_ = other.bus_;
        id_ = other.id_;
        other.bus_ = nullptr;
    }
    return *this;
}

void EventBus::Subscription::reset() {
    if (bus_) bus_->unsubscribe(id_);
    bus_ = nullptr;
}

EventBus::EventBus(std::size_t queue_capacity)
    : capacity_(queue_capacity == 0 ? 1 : queue_capacity), worker_([this] { deliver_loop(); }) {}

EventBus::~EventBus() {
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    work_cv_.notify_all();
    worker_.join();
}

EventBus::Subscription EventBus::subscribe(std::set<EventKind> kinds, Sink sink) {
    std::lock_guard lock(mu_);
    auto id = next_id_++;
    subscribers_[id] = Subscriber{std::move(kinds), std::move(sink), {}};
    return Subscription(this, id);
}

RuntimeEvent EventBus::publish(RuntimeEvent ev) {
    {
        std::lock_guard lock(mu_);
        ev.seq = next_seq_++;
        for (auto& [id, sub] : subscribers_) {
            if (!sub.kinds.empty() && !sub.kinds.count(ev.kind)) continue;
            if (sub.queue.size() >= capacity_) {
                sub.queue.pop_front();
                ++dropped_;
            }
            sub.queue.push_back(ev);
        }
    }
    work_cv_.notify_one();
    return ev;
}

void EventBus::flush() {
    std::unique_lock lock(mu_);
    idle_cv_.wait(lock, [this] { return idle_locked(); });
}

std::uint64_t EventBus::dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
}

bool EventBus::idle_locked() const {
    if (in_flight_) return false;
    for (const auto& [id, sub] : subscribers_) {
        if (!sub.queue.empty()) return false;
    }
    return true;
}

void EventBus::unsubscribe(std::uint64_t id) {
    std::unique_lock lock(mu_);
    // A sink must not be running once its subscription is gone.
    if (std::this_thread::get_id() != worker_.get_id()) {
        idle_cv_.wait(lock, [&] { return in_flight_ != id; });
    }
    subscribers_.erase(id);
    idle_cv_.notify_all();
}

void EventBus::deliver_loop() {
    std::unique_lock lock(mu_);
    for (;;) {
        work_cv_.wait(lock, [this] {
            if (stopping_) return true;
            for (const auto& [id, sub] : subscribers_) {
                if (!sub.queue.empty()) return true;
            }
            return false;
        });
        if (stopping_) return;
        // Deliver the globally oldest queued event first.
        Subscriber* target = nullptr;
        std::uint64_t target_id = 0;
        for (auto& [id, sub] : subscribers_) {
            if (sub.queue.empty()) continue;
            if (!target || sub.queue.front().seq < target->queue.front().seq) {
                target = &sub;
                target_id = id;
            }
        }
        RuntimeEvent ev = std::move(target->queue.front());
        target->queue.pop_front();
        Sink sink = target->sink;
        in_flight_ = target_id;
        lock.unlock();
        try {
            sink(ev);
        } catch (...) {
            // A failing sink must not take the bus down.
        }
        lock.lock();
        in_flight_.reset();
        idle_cv_.notify_all();
    }
}

}  // namespace semaclaw::kernel
