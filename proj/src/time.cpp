#include "feedaudit/time.hpp"

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace feedaudit {

namespace {

// Days-from-civil and its inverse (Howard Hinnant's algorithms), exact over
// the whole int64 nanosecond range.
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);               // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;    // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;              // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);            // [0, 146096]
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);            // [0, 365]
    const unsigned mp = (5 * doy + 2) / 153;                                 // [0, 11]
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y += m <= 2;
}

bool is_leap(std::int64_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(std::int64_t y, int m) {
    static const int len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return len[m - 1];
}

[[noreturn]] void bad(std::string_view text, const char* why) {
    throw std::invalid_argument("invalid RFC 3339 timestamp \"" + std::string(text) +
                                "\": " + why);
}

}  // namespace

TimeNs ns_from_seconds(double seconds) {
    return static_cast<TimeNs>(std::llround(seconds * static_cast<double>(kNsPerSecond)));
}

TimeNs parse_rfc3339(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.fraction]Z
    const auto digits = [&](std::size_t pos, int n) -> std::int64_t {
        std::int64_t v = 0;
        for (int i = 0; i < n; ++i) {
            const char c = pos + i < text.size() ? text[pos + i] : '\0';
            if (c < '0' || c > '9') bad(text, "expected digit");
            v = v * 10 + (c - '0');
        }
        return v;
    };
    const auto expect = [&](std::size_t pos, char c) {
        if (pos >= text.size() || text[pos] != c) bad(text, "unexpected separator");
    };

    if (text.size() < 20) bad(text, "too short");
    const std::int64_t year = digits(0, 4);
    expect(4, '-');
    const int month = static_cast<int>(digits(5, 2));
    expect(7, '-');
    const int day = static_cast<int>(digits(8, 2));
    expect(10, 'T');
    const int hour = static_cast<int>(digits(11, 2));
    expect(13, ':');
    const int minute = static_cast<int>(digits(14, 2));
    expect(16, ':');
    const int second = static_cast<int>(digits(17, 2));

    if (month < 1 || month > 12) bad(text, "month out of range");
    if (day < 1 || day > days_in_month(year, month)) bad(text, "day out of range");
    if (hour > 23) bad(text, "hour out of range");
    if (minute > 59) bad(text, "minute out of range");
    if (second > 59) bad(text, "second out of range");  // leap seconds not representable

    std::size_t pos = 19;
    std::int64_t frac_ns = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int n = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (n < 9) frac_ns = frac_ns * 10 + (text[pos] - '0');
            ++n;
            ++pos;
        }
        if (n == 0) bad(text, "empty fraction");
        if (n > 9) bad(text, "fraction finer than nanoseconds");
        for (; n < 9; ++n) frac_ns *= 10;
    }
    if (pos >= text.size() || text[pos] != 'Z') bad(text, "missing UTC designator 'Z'");
    if (pos + 1 != text.size()) bad(text, "trailing characters");

    const std::int64_t days = days_from_civil(year, month, day);
    const std::int64_t sec = days * 86400 + hour * 3600 + minute * 60 + second;
    return sec * kNsPerSecond + frac_ns;
}

std::string format_rfc3339(TimeNs t) {
    std::int64_t sec = t / kNsPerSecond;
    std::int64_t frac = t % kNsPerSecond;
    if (frac < 0) {
        frac += kNsPerSecond;
        sec -= 1;
    }
    std::int64_t days = sec / 86400;
    std::int64_t sod = sec % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    std::int64_t year;
    int month, day;
    civil_from_days(days, year, month, day);

    char buf[64];
    int len = std::snprintf(buf, sizeof buf, "%04" PRId64 "-%02d-%02dT%02" PRId64 ":%02" PRId64 ":%02" PRId64,
                            year, month, day, sod / 3600, (sod / 60) % 60, sod % 60);
    if (frac != 0) {
        char fbuf[16];
        std::snprintf(fbuf, sizeof fbuf, "%09" PRId64, frac);
        int flen = 9;
        while (flen > 1 && fbuf[flen - 1] == '0') --flen;
        buf[len++] = '.';
        for (int i = 0; i < flen; ++i) buf[len++] = fbuf[i];
    }
    buf[len++] = 'Z';
    return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace feedaudit
