#pragma once

#include <string>
#include <string_view>

namespace rebound {

enum class Frequency { monthly, quarterly };

int periods_per_year(Frequency f);
std::string_view frequency_name(Frequency f);

/// One calendar period (a month or a quarter). Ordering is only defined
/// between periods of the same frequency.
struct Period {
  int year = 1900;
  int sub = 1;  // month 1-12 or quarter 1-4
  Frequency freq = Frequency::monthly;

  /// Monotone ordinal within the period's frequency.
  int ordinal() const;
  Period plus(int n) const;
  std::string str() const;  // "1976-12" or "1976Q4"

  friend bool operator==(const Period&, const Period&) = default;
};

Period make_period(int year, int sub, Frequency freq);

/// Signed count of periods from `from` to `to` (same frequency required).
int distance(const Period& from, const Period& to);
bool before(const Period& a, const Period& b);

/// Parses "YYYY-MM" (monthly) or "YYYYQq" (quarterly). Throws data_error.
Period parse_period(std::string_view text, Frequency freq);

/// Quarter containing a monthly period.
Period quarter_of(const Period& monthly);

}  // namespace rebound
