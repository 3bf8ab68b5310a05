#include "hpcpm/time.h"

#include <cmath>
#include <cstdio>

namespace hpcpm {

namespace {

using namespace std::chrono;

struct Parts {
  int year;
  unsigned month, day;
  long hour, minute, second;
};

Parts split(Timestamp t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  return {int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
          long(hms.hours().count()), long(hms.minutes().count()), long(hms.seconds().count())};
}

bool read_digits(std::string_view& s, std::size_t n, int& out) {
  if (s.size() < n) return false;
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  s.remove_prefix(n);
  return true;
}

bool expect(std::string_view& s, char c) {
  if (s.empty() || s.front() != c) return false;
  s.remove_prefix(1);
  return true;
}

}  // namespace

std::string format_iso8601(Timestamp t) {
  const Parts p = split(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", p.year, p.month, p.day,
                p.hour, p.minute, p.second);
  return buf;
}

std::string format_iso8601_basic(Timestamp t) {
  const Parts p = split(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d%02u%02uT%02ld%02ld%02ldZ", p.year, p.month, p.day, p.hour,
                p.minute, p.second);
  return buf;
}

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  const bool extended = s.size() > 4 && s[4] == '-';
  if (!read_digits(s, 4, y)) return std::nullopt;
  if (extended && !expect(s, '-')) return std::nullopt;
  if (!read_digits(s, 2, mo)) return std::nullopt;
  if (extended && !expect(s, '-')) return std::nullopt;
  if (!read_digits(s, 2, d)) return std::nullopt;
  if (!expect(s, 'T')) return std::nullopt;
  if (!read_digits(s, 2, h)) return std::nullopt;
  if (extended && !expect(s, ':')) return std::nullopt;
  if (!read_digits(s, 2, mi)) return std::nullopt;
  if (extended && !expect(s, ':')) return std::nullopt;
  if (!read_digits(s, 2, sec)) return std::nullopt;
  if (!expect(s, 'Z') || !s.empty()) return std::nullopt;

  const year_month_day ymd{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  return Timestamp{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{sec};
}

std::string humanize_seconds(double seconds) {
  long long total = std::llround(seconds);
  std::string out;
  if (total < 0) {
    out = "-";
    total = -total;
  }
  const long long h = total / 3600, m = (total % 3600) / 60, s = total % 60;
  if (h > 0) out += std::to_string(h) + "h" + std::to_string(m) + "m";
  else if (m > 0) out += std::to_string(m) + "m";
  out += std::to_string(s) + "s";
  return out;
}

}  // namespace hpcpm
