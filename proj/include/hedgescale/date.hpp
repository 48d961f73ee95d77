#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hedgescale {

/// Calendar date stored as a proleptic-Gregorian serial day number
/// (days since 1970-01-01). Cheap to copy, totally ordered, supports
/// day arithmetic for fixture generation.
class Date {
public:
    Date() = default;
    Date(int year, int month, int day);

    /// Parse "YYYY-MM-DD". Throws Error(parse_error) on malformed input.
    static Date from_iso(std::string_view text);

    [[nodiscard]] std::string to_iso() const;

    [[nodiscard]] int year() const;
    [[nodiscard]] int month() const;
    [[nodiscard]] int day() const;

    [[nodiscard]] std::int64_t serial() const noexcept { return days_; }
    static Date from_serial(std::int64_t days);

    [[nodiscard]] Date plus_days(std::int64_t n) const { return from_serial(days_ + n); }

    auto operator<=>(const Date&) const = default;

private:
    std::int64_t days_ = 0;
};

}  // namespace hedgescale
