#include "semaclaw/common/clock.hpp"

#include <cstdio>
#include <thread>

#include "semaclaw/common/error.hpp"

namespace semaclaw {

void SystemClock::sleep_for(Duration d) { std::this_thread::sleep_for(d); }

TimePoint FakeClock::now() const {
    std::lock_guard lock(mu_);
    return now_;
}

void FakeClock::advance(Duration d) {
    TimePoint target;
    {
        std::lock_guard lock(mu_);
        target = now_ + d;
    }
    run_until(target);
}

void FakeClock::set(TimePoint t) { run_until(t); }

void FakeClock::at(TimePoint t, std::function<void()> fn) {
    std::lock_guard lock(mu_);
    scheduled_.emplace(t, std::move(fn));
}

void FakeClock::every_advance(std::function<void()> fn) {
    std::lock_guard lock(mu_);
    observers_.push_back(std::move(fn));
}

void FakeClock::run_until(TimePoint target) {
    for (;;) {
        std::function<void()> fn;
        {
            std::lock_guard lock(mu_);
            auto it = scheduled_.begin();
            if (it == scheduled_.end() || it->first > target) break;
            if (it->first > now_) now_ = it->first;
            fn = std::move(it->second);
            scheduled_.erase(it);
        }
        fn();
    }
    std::vector<std::function<void()>> observers;
    {
        std::lock_guard lock(mu_);
        if (target > now_) now_ = target;
        observers = observers_;
    }
    for (auto& fn : observers) fn();
}

std::int64_t to_epoch_ms(TimePoint t) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

TimePoint from_epoch_ms(std::int64_t ms) {
    return TimePoint{std::chrono::duration_cast<TimePoint::duration>(std::chrono::milliseconds{ms})};
}

namespace {

struct Civil {
    std::chrono::year_month_day ymd;
    std::chrono::hh_mm_ss<std::chrono::seconds> tod;
};

Civil split(TimePoint t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    return Civil{year_month_day{sys_days{day}},
                 hh_mm_ss<seconds>{floor<seconds>(t - day)}};
}

}  // namespace

std::string format_date(TimePoint t) {
    auto c = split(t);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(c.ymd.year()),
                  static_cast<unsigned>(c.ymd.month()), static_cast<unsigned>(c.ymd.day()));
    return buf;
}

std::string format_time_of_day(TimePoint t) {
    auto c = split(t);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", static_cast<int>(c.tod.hours().count()),
                  static_cast<int>(c.tod.minutes().count()),
                  static_cast<int>(c.tod.seconds().count()));
    return buf;
}

std::string format_iso8601(TimePoint t) {
    return format_date(t) + "T" + format_time_of_day(t) + "Z";
}

TimePoint parse_date(const std::string& text) {
    using namespace std::chrono;
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    if (text.size() != 10 || std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
        fail(Errc::argument, "not a YYYY-MM-DD date: '" + text + "'");
    }
    year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) fail(Errc::argument, "invalid calendar date: '" + text + "'");
    return TimePoint{sys_days{ymd}};
}

TimePoint parse_iso8601(const std::string& text) {
    if (text.size() == 10) return parse_date(text);
    int hh = 0, mm = 0, ss = 0;
    if (text.size() < 20 || text[10] != 'T' ||
        std::sscanf(text.c_str() + 11, "%2d:%2d:%2d", &hh, &mm, &ss) != 3) {
        fail(Errc::argument, "not an ISO-8601 UTC timestamp: '" + text + "'");
    }
    return parse_date(text.substr(0, 10)) + std::chrono::hours{hh} + std::chrono::minutes{mm} +
           std::chrono::seconds{ss};
}

}  // namespace semaclaw
