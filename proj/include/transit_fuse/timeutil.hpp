#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tfuse {

// Seconds since 1970-01-01T00:00:00 on the data's local clock.
using Timestamp = int64_t;

constexpr int64_t kSecondsPerDay = 86400;
constexpr int64_t kQuarterHourS = 900;

// Floor division (quotient rounded toward negative infinity).
constexpr int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    return (a % b != 0 && ((a % b < 0) != (b < 0))) ? q - 1 : q;
}

// Days between 1970-01-01 and the given civil date (proleptic Gregorian).
int64_t days_from_civil(int y, int m, int d);
void civil_from_days(int64_t z, int& y, int& m, int& d);

Timestamp parse_iso_datetime(std::string_view s);  // YYYY-MM-DDTHH:MM:SS
int64_t parse_iso_date(std::string_view s);        // YYYY-MM-DD -> day number
std::string format_iso_datetime(Timestamp t);
std::string format_iso_date(int64_t days);

// Nearest 900 s boundary; the exact midpoint rounds up.
constexpr Timestamp round_to_quarter_hour(Timestamp t) {
    return floor_div(t + kQuarterHourS / 2, kQuarterHourS) * kQuarterHourS;
}

// Fixed-offset local calendar used for weekday and hour-of-day binning.
struct Calendar {
    int64_t utc_offset_s = 0;

    int64_t day_index(Timestamp t) const { return floor_div(t + utc_offset_s, kSecondsPerDay); }

    // 0 = Sunday .. 6 = Saturday (1970-01-01 was a Thursday).
    int day_of_week(Timestamp t) const {
        return static_cast<int>(((day_index(t) % 7) + 7 + 4) % 7);
    }

    bool is_weekday(Timestamp t) const {
        int const dow = day_of_week(t);
        return dow >= 1 && dow <= 5;
    }

    int hour_of_day(Timestamp t) const {
        int64_t const s = t + utc_offset_s;
        return static_cast<int>(floor_div(s, 3600) - 24 * floor_div(s, kSecondsPerDay));
    }
};

}  // namespace tfuse
