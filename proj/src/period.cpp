#include "rebound/period.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "rebound/errors.hpp"

namespace rebound {

int periods_per_year(Frequency f) { return f == Frequency::monthly ? 12 : 4; }

std::string_view frequency_name(Frequency f) {
  return f == Frequency::monthly ? "monthly" : "quarterly";
}

int Period::ordinal() const { return year * periods_per_year(freq) + (sub - 1); }

Period Period::plus(int n) const {
  const int ppy = periods_per_year(freq);
  int ord = ordinal() + n;
  int y = ord / ppy;
  int s = ord % ppy;
  if (s < 0) {
    s += ppy;
    y -= 1;
  }
  return Period{y, s + 1, freq};
}

std::string Period::str() const {
  char buf[16];
  if (freq == Frequency::monthly) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, sub);
  } else {
    std::snprintf(buf, sizeof(buf), "%04dQ%d", year, sub);
  }
  return buf;
}

Period make_period(int year, int sub, Frequency freq) {
  const int ppy = periods_per_year(freq);
  if (sub < 1 || sub > ppy) {
    throw data_error("period subperiod " + std::to_string(sub) + " out of range for " +
                     std::string(frequency_name(freq)) + " frequency");
  }
  return Period{year, sub, freq};
}

int distance(const Period& from, const Period& to) {
  if (from.freq != to.freq) throw data_error("period distance across frequencies");
  return to.ordinal() - from.ordinal();
}

bool before(const Period& a, const Period& b) {
  if (a.freq != b.freq) throw data_error("period comparison across frequencies");
  return a.ordinal() < b.ordinal();
}

namespace {

bool parse_int(std::string_view s, int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Period parse_period(std::string_view text, Frequency freq) {
  int year = 0, sub = 0;
  bool ok = false;
  if (freq == Frequency::monthly) {
    // "YYYY-MM"
    auto dash = text.find('-');
    if (dash != std::string_view::npos) {
      ok = parse_int(text.substr(0, dash), year) && parse_int(text.substr(dash + 1), sub);
    }
  } else {
    // "YYYYQq"
    auto q = text.find_first_of("Qq");
    if (q != std::string_view::npos) {
      ok = parse_int(text.substr(0, q), year) && parse_int(text.substr(q + 1), sub);
    }
  }
  if (!ok) {
    throw data_error("unparseable " + std::string(frequency_name(freq)) + " date '" +
                     std::string(text) + "'");
  }
  return make_period(year, sub, freq);
}

Period quarter_of(const Period& monthly) {
  if (monthly.freq != Frequency::monthly) throw data_error("quarter_of expects a monthly period");
  return Period{monthly.year, (monthly.sub - 1) / 3 + 1, Frequency::quarterly};
}

}  // namespace rebound
