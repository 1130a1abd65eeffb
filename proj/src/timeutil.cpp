#include "transit_fuse/timeutil.hpp"

#include <cstdio>

#include "transit_fuse/error.hpp"

namespace tfuse {

// Howard Hinnant's chrono-compatible civil date algorithms.
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    int64_t const era = (y >= 0 ? y : y - 399) / 400;
    unsigned const yoe = static_cast<unsigned>(y - era * 400);
    unsigned const doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    unsigned const doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    int64_t const era = (z >= 0 ? z : z - 146096) / 146097;
    unsigned const doe = static_cast<unsigned>(z - era * 146097);
    unsigned const yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    int64_t const yy = static_cast<int64_t>(yoe) + era * 400;
    unsigned const doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    unsigned const mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

namespace {

int parse_digits(std::string_view s, size_t pos, size_t n, std::string_view what) {
    int v = 0;
    for (size_t i = pos; i < pos + n; ++i) {
        if (i >= s.size() || s[i] < '0' || s[i] > '9') {
            throw InputError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
        }
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

}  // namespace

int64_t parse_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw InputError("malformed date: '" + std::string(s) + "'");
    }
    int const y = parse_digits(s, 0, 4, "date");
    int const m = parse_digits(s, 5, 2, "date");
    int const d = parse_digits(s, 8, 2, "date");
    if (m < 1 || m > 12 || d < 1 || d > 31) {
        throw InputError("date out of range: '" + std::string(s) + "'");
    }
    return days_from_civil(y, m, d);
}

Timestamp parse_iso_datetime(std::string_view s) {
    if (s.size() != 19 || s[10] != 'T' || s[13] != ':' || s[16] != ':') {
        throw InputError("malformed timestamp: '" + std::string(s) + "'");
    }
    int64_t const days = parse_iso_date(s.substr(0, 10));
    int const hh = parse_digits(s, 11, 2, "timestamp");
    int const mm = parse_digits(s, 14, 2, "timestamp");
    int const ss = parse_digits(s, 17, 2, "timestamp");
    if (hh > 23 || mm > 59 || ss > 59) {
        throw InputError("time of day out of range: '" + std::string(s) + "'");
    }
    return days * kSecondsPerDay + hh * 3600 + mm * 60 + ss;
}

std::string format_iso_date(int64_t days) {
    int y = 0, m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return std::string(buf);
}

std::string format_iso_datetime(Timestamp t) {
    int64_t const days = floor_div(t, kSecondsPerDay);
    int64_t const sod = t - days * kSecondsPerDay;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "T%02d:%02d:%02d", static_cast<int>(sod / 3600),
                  static_cast<int>((sod / 60) % 60), static_cast<int>(sod % 60));
    return format_iso_date(days) + buf;
}

}  // namespace tfuse
