#include "semaclaw/schedtask/cron.hpp"

#include <sstream>
#include <vector>

#include "semaclaw/common/error.hpp"

namespace semaclaw::schedtask {

namespace {

int parse_int(const std::string& s, const std::string& whole) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        fail(Errc::validation, "bad cron number '" + s + "' in '" + whole + "'");
    }
    return std::stoi(s);
}

/// Returns the set values of one field and whether it was a bare "*".
std::vector<bool> parse_field(const std::string& field, int lo, int hi, const std::string& whole, bool& any) {
    std::vector<bool> set(static_cast<std::size_t>(hi + 1), false);
    any = field == "*";
    std::stringstream ss(field);
    std::string part;
    while (std::getline(ss, part, ',')) {
        int step = 1;
        if (auto slash = part.find('/'); slash != std::string::npos) {
            step = parse_int(part.substr(slash + 1), whole);
            if (step <= 0) fail(Errc::validation, "cron step must be positive in '" + whole + "'");
            part = part.substr(0, slash);
        }
        int a, b;
        if (part == "*") {
            a = lo;
            b = hi;
        } else if (auto dash = part.find('-'); dash != std::string::npos) {
            a = parse_int(part.substr(0, dash), whole);
            b = parse_int(part.substr(dash + 1), whole);
        } else {
            a = b = parse_int(part, whole);
            if (step != 1) b = hi;
        }
        if (a < lo || b > hi || a > b) fail(Errc::validation, "cron value out of range in '" + whole + "'");
        for (int v = a; v <= b; v += step) set[static_cast<std::size_t>(v)] = true;
    }
    return set;
}

}  // namespace

CronSpec CronSpec::parse(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> fields;
    for (std::string f; in >> f;) fields.push_back(f);
    if (fields.size() != 5) fail(Errc::validation, "cron spec needs five fields: '" + text + "'");
    CronSpec c;
    c.text_ = text;
    bool any;
    auto m = parse_field(fields[0], 0, 59, text, any);
    for (int i = 0; i < 60; ++i) c.minutes_[i] = m[i];
    auto h = parse_field(fields[1], 0, 23, text, any);
    for (int i = 0; i < 24; ++i) c.hours_[i] = h[i];
    auto d = parse_field(fields[2], 1, 31, text, c.dom_any_);
    for (int i = 1; i < 32; ++i) c.dom_[i] = d[i];
    auto mo = parse_field(fields[3], 1, 12, text, any);
    for (int i = 1; i < 13; ++i) c.months_[i] = mo[i];
    auto w = parse_field(fields[4], 0, 7, text, c.dow_any_);
    for (int i = 0; i < 7; ++i) c.dow_[i] = w[i];
    if (w[7]) c.dow_[0] = true;
    return c;
}

bool CronSpec::day_matches(int dom, int month, int dow) const {
    if (!months_[month]) return false;
    if (dom_any_ && dow_any_) return true;
    if (dom_any_) return dow_[dow];
    if (dow_any_) return dom_[dom];
    return dom_[dom] || dow_[dow];
}

bool CronSpec::matches(TimePoint t) const {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{sys_days{day}};
    hh_mm_ss<minutes> tod{floor<minutes>(t - day)};
    weekday wd{sys_days{day}};
    return minutes_[tod.minutes().count()] && hours_[tod.hours().count()] &&
           day_matches(static_cast<int>(unsigned(ymd.day())), static_cast<int>(unsigned(ymd.month())),
                       static_cast<int>(wd.c_encoding()));
}

TimePoint CronSpec::next_after(TimePoint t) const {
    using namespace std::chrono;
    auto cur = floor<minutes>(t) + minutes{1};
    const auto limit = cur + days{366 * 5};
    while (cur < limit) {
        auto day = floor<days>(cur);
        year_month_day ymd{sys_days{day}};
        weekday wd{sys_days{day}};
        if (!day_matches(static_cast<int>(unsigned(ymd.day())), static_cast<int>(unsigned(ymd.month())),
                         static_cast<int>(wd.c_encoding()))) {
            cur = day + days{1};
            continue;
        }
        if (matches(cur)) return time_point_cast<TimePoint::duration>(cur);
        cur += minutes{1};
    }
    fail(Errc::validation, "cron spec '" + text_ + "' never fires");
}

}  // namespace semaclaw::schedtask
