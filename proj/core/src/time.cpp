#include "quintel/time.hpp"

#include <array>
#include <cstdio>

namespace quintel {
namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> k = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return k[static_cast<std::size_t>(m - 1)];
}

bool take_digits(std::string_view& s, int count, int& out) {
    if (s.size() < static_cast<std::size_t>(count)) return false;
    long v = 0;
    for (int i = 0; i < count; ++i) {
        const char c = s[static_cast<std::size_t>(i)];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    s.remove_prefix(static_cast<std::size_t>(count));
    out = static_cast<int>(v);
    return true;
}

bool take_char(std::string_view& s, char expect) {
    if (s.empty() || s.front() != expect) return false;
    s.remove_prefix(1);
    return true;
}

}  // namespace

std::optional<Timestamp> try_parse_rfc3339(std::string_view s) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!take_digits(s, 4, year) || !take_char(s, '-') || !take_digits(s, 2, month) ||
        !take_char(s, '-') || !take_digits(s, 2, day))
        return std::nullopt;
    if (s.empty() || (s.front() != 'T' && s.front() != 't')) return std::nullopt;
    s.remove_prefix(1);
    if (!take_digits(s, 2, hour) || !take_char(s, ':') || !take_digits(s, 2, minute) ||
        !take_char(s, ':') || !take_digits(s, 2, second))
        return std::nullopt;

    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    if (second == 60) second = 59;  // fold leap seconds

    std::int64_t frac_micros = 0;
    if (!s.empty() && s.front() == '.') {
        s.remove_prefix(1);
        std::int64_t scale = 100000;
        bool any = false;
        while (!s.empty() && s.front() >= '0' && s.front() <= '9') {
            if (scale > 0) frac_micros += (s.front() - '0') * scale;
            scale /= 10;
            s.remove_prefix(1);
            any = true;
        }
        if (!any) return std::nullopt;
    }

    std::int64_t offset_sec = 0;
    if (s.empty()) return std::nullopt;
    const char z = s.front();
    if (z == 'Z' || z == 'z') {
        s.remove_prefix(1);
    } else if (z == '+' || z == '-') {
        s.remove_prefix(1);
        int oh = 0, om = 0;
        if (!take_digits(s, 2, oh) || !take_char(s, ':') || !take_digits(s, 2, om))
            return std::nullopt;
        if (oh > 23 || om > 59) return std::nullopt;
        offset_sec = (oh * 3600LL + om * 60LL) * (z == '+' ? 1 : -1);
    } else {
        return std::nullopt;
    }
    if (!s.empty()) return std::nullopt;

    const std::int64_t days = days_from_civil(year, month, day);
    const std::int64_t utc_sec =
        days * 86400LL + hour * 3600LL + minute * 60LL + second - offset_sec;
    return Timestamp{utc_sec * 1000000LL + frac_micros};
}

std::string format_rfc3339(Timestamp ts) {
    std::int64_t micros = ts.micros;
    std::int64_t sec = micros / 1000000;
    std::int64_t frac = micros % 1000000;
    if (frac < 0) {
        frac += 1000000;
        sec -= 1;
    }
    std::int64_t days = sec / 86400;
    std::int64_t sod = sec % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    int y = 0;
    unsigned m = 0, d = 0;
    civil_from_days(days, y, m, d);

    char buf[40];
    const int hh = static_cast<int>(sod / 3600);
    const int mi = static_cast<int>((sod / 60) % 60);
    const int ss = static_cast<int>(sod % 60);
    if (frac == 0) {
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", y, m, d, hh, mi, ss);
    } else {
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%06ldZ", y, m, d, hh, mi,
                      ss, static_cast<long>(frac));
    }
    return buf;
}

}  // namespace quintel
