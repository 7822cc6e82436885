#include "mibel/timeutil.hpp"

#include <charconv>
#include <cstdio>

namespace mibel {

namespace {

bool parse_int(std::string_view s, std::size_t pos, std::size_t len, int& out) noexcept {
    if (pos + len > s.size()) return false;
    const char* first = s.data() + pos;
    const auto res = std::from_chars(first, first + len, out);
    return res.ec == std::errc{} && res.ptr == first + len;
}

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
long days_from_civil(int y, int m, int d) noexcept {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097L + static_cast<long>(doe) - 719468L;
}

void civil_from_days(long z, int& y, int& m, int& d) noexcept {
    z += 719468L;
    const long era = (z >= 0 ? z : z - 146096L) / 146097L;
    const unsigned doe = static_cast<unsigned>(z - era * 146097L);
    const unsigned yoe = (doe - doe / 1460u + doe / 36524u - doe / 146096u) / 365u;
    const long yy = static_cast<long>(yoe) + era * 400L;
    const unsigned doy = doe - (365u * yoe + yoe / 4u - yoe / 100u);
    const unsigned mp = (5u * doy + 2u) / 153u;
    d = static_cast<int>(doy - (153u * mp + 2u) / 5u + 1u);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

std::optional<HourStamp> parse_hour_id(std::string_view s) noexcept {
    //  0123456789012345678
    // "YYYY-MM-DDTHH:MM:SSZ"
    if (s.size() != 20) return std::nullopt;
    if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' ||
        s[19] != 'Z')
        return std::nullopt;
    HourStamp t;
    int minute = 0, second = 0;
    if (!parse_int(s, 0, 4, t.year) || !parse_int(s, 5, 2, t.month) ||
        !parse_int(s, 8, 2, t.day) || !parse_int(s, 11, 2, t.hour) ||
        !parse_int(s, 14, 2, minute) || !parse_int(s, 17, 2, second))
        return std::nullopt;
    if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31) return std::nullopt;
    if (t.hour < 0 || t.hour > 23 || minute != 0 || second != 0) return std::nullopt;
    return t;
}

std::string format_hour_id(const HourStamp& t) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", t.year, t.month,
                  t.day, t.hour);
    return buf;
}

HourStamp add_hours(HourStamp t, long n) {
    long total = days_from_civil(t.year, t.month, t.day) * 24L + t.hour + n;
    long days = total / 24L;
    long hour = total % 24L;
    if (hour < 0) {
        hour += 24;
        days -= 1;
    }
    HourStamp out;
    civil_from_days(days, out.year, out.month, out.day);
    out.hour = static_cast<int>(hour);
    return out;
}

int months_between(const HourStamp& a, const HourStamp& b) noexcept {
    return (b.year - a.year) * 12 + (b.month - a.month);
}

}  // namespace mibel
