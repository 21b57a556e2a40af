#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace semaclaw {

using TimePoint = std::chrono::system_clock::time_point;
using Duration = std::chrono::milliseconds;

/// Source of time for every timestamp and timer in the runtime.
class Clock {
public:
    virtual ~Clock() = default;
    virtual TimePoint now() const = 0;
    virtual void sleep_for(Duration d) = 0;
};

class SystemClock final : public Clock {
public:
    TimePoint now() const override { return std::chrono::system_clock::now(); }
    void sleep_for(Duration d) override;
};

/// Manually driven clock. `sleep_for` advances time instead of blocking, and
/// callbacks scheduled with `at` fire (in time order) as time passes them.
class FakeClock final : public Clock {
public:
    explicit FakeClock(TimePoint start = TimePoint{}) : now_(start) {}

    TimePoint now() const override;
    void sleep_for(Duration d) override { advance(d); }

    void advance(Duration d);
    void set(TimePoint t);
    void at(TimePoint t, std::function<void()> fn);
    void every_advance(std::function<void()> fn);

private:
    void run_until(TimePoint target);

    mutable std::mutex mu_;
    TimePoint now_;
    std::multimap<TimePoint, std::function<void()>> scheduled_;
    std::vector<std::function<void()>> observers_;
};

std::int64_t to_epoch_ms(TimePoint t);
TimePoint from_epoch_ms(std::int64_t ms);

/// UTC calendar date as YYYY-MM-DD.
std::string format_date(TimePoint t);
/// UTC wall time as HH:MM:SS.
std::string format_time_of_day(TimePoint t);
/// ISO-8601 UTC with seconds precision, e.g. 2026-03-01T09:30:00Z.
std::string format_iso8601(TimePoint t);
/// Parses YYYY-MM-DD; returns midnight UTC. Throws Errc::argument.
TimePoint parse_date(const std::string& text);
/// Parses the output of format_iso8601 (also accepts a bare date).
TimePoint parse_iso8601(const std::string& text);

}  // namespace semaclaw
