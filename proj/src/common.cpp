#include "urcminer/common.hpp"

#include <charconv>
#include <cstdio>

namespace urcminer {
namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) {
    throw ArgumentError("truncated timestamp: '" + std::string(text) + "'");
  }
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc() || ptr != text.data() + pos + len) {
    throw ArgumentError("bad timestamp: '" + std::string(text) + "'");
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw ArgumentError("bad timestamp: '" + std::string(text) + "'");
  }
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  const int y = read_int(text, 0, 4);
  expect_char(text, 4, '-');
  const int mo = read_int(text, 5, 2);
  expect_char(text, 7, '-');
  const int d = read_int(text, 8, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw ArgumentError("invalid date: '" + std::string(text) + "'");
  }
  Timestamp ts = time_point_cast<milliseconds>(sys_days{ymd});
  if (text.size() == 10) return ts;
  if (text[10] != 'T' && text[10] != ' ') {
    throw ArgumentError("bad timestamp: '" + std::string(text) + "'");
  }
  const int hh = read_int(text, 11, 2);
  expect_char(text, 13, ':');
  const int mm = read_int(text, 14, 2);
  expect_char(text, 16, ':');
  const int ss = read_int(text, 17, 2);
  if (hh > 23 || mm > 59 || ss > 60) {
    throw ArgumentError("invalid time: '" + std::string(text) + "'");
  }
  ts += hours{hh} + minutes{mm} + seconds{ss};
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int ms = 0;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) ms = ms * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) {
      throw ArgumentError("bad fraction in timestamp: '" + std::string(text) + "'");
    }
    for (int i = digits; i < 3; ++i) ms *= 10;
    ts += milliseconds{ms};
  }
  if (pos == text.size()) return ts;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return ts;
  if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
    const int oh = read_int(text, pos + 1, 2);
    expect_char(text, pos + 3, ':');
    const int om = read_int(text, pos + 4, 2);
    const minutes offset = hours{oh} + minutes{om};
    return text[pos] == '+' ? ts - offset : ts + offset;
  }
  throw ArgumentError("bad timestamp suffix: '" + std::string(text) + "'");
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const auto rest = ts - day_point;
  const auto h = duration_cast<hours>(rest);
  const auto m = duration_cast<minutes>(rest - h);
  const auto s = duration_cast<seconds>(rest - h - m);
  const auto ms = rest - h - m - s;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                static_cast<int>(m.count()), static_cast<int>(s.count()),
                static_cast<int>(ms.count()));
  return buf;
}

double minutes_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / 60000.0;
}

}  // namespace urcminer
