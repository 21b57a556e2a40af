#pragma once

#include <bitset>
#include <string>

#include "semaclaw/common/clock.hpp"

namespace semaclaw::schedtask {

/// Standard five-field cron expression (minute hour day-of-month month
/// day-of-week) evaluated in UTC. Fields accept "*", numbers, ranges "a-b",
/// lists "a,b" and steps "*/n" or "a-b/n"; day-of-week 0 and 7 are Sunday.
/// When both day fields are restricted a day matches if either does.
class CronSpec {
public:
    /// Throws Errc::validation.
    static CronSpec parse(const std::string& text);

    bool matches(TimePoint t) const;
    /// First matching minute strictly after `t`.
    TimePoint next_after(TimePoint t) const;
    const std::string& text() const noexcept { return text_; }

private:
    bool day_matches(int dom, int month, int dow) const;

    std::string text_;
    std::bitset<60> minutes_;
    std::bitset<24> hours_;
    std::bitset<32> dom_;
    std::bitset<13> months_;
    std::bitset<7> dow_;
    bool dom_any_ = true;
    bool dow_any_ = true;
};

}  // namespace semaclaw::schedtask
