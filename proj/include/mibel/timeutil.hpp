#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace mibel {

// UTC hour stamp backing the "YYYY-MM-DDTHH:00:00Z" hour ids used across the
// dataset format.  Lexicographic order of well-formed ids is chronological.
struct HourStamp {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;   // 0..23

    friend bool operator==(const HourStamp&, const HourStamp&) = default;
};

// Strict parse of "YYYY-MM-DDTHH:MM:SSZ"; minutes/seconds must be zero.
std::optional<HourStamp> parse_hour_id(std::string_view s) noexcept;

std::string format_hour_id(const HourStamp& t);

// Calendar-correct hour arithmetic (used by the synthetic generator).
HourStamp add_hours(HourStamp t, long n);

// Whole months from a to b (b in a's month -> 0, next month -> 1, ...).
int months_between(const HourStamp& a, const HourStamp& b) noexcept;

}  // namespace mibel
