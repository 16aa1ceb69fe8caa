#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hrcp {

using Date = std::chrono::year_month_day;

/// YYYY-MM-DD.
std::string format_date(Date d);

/// Order of the numeric day and month fields. Year-first (`2020-03-26`) and
/// textual months (`Mar 26, 2020`, `26 Mar 2020`) are recognized in every mode.
enum class DateOrder { MonthFirst, DayFirst };

/// Parses one date cell; throws InputError on malformed or impossible dates.
Date parse_date(std::string_view text, DateOrder order);

/// Column mapping for OHLC exports. Defaults match the
/// "Date, Price, Open, High, Low, Vol., Change %" layout.
struct CsvSchema {
  std::string date = "Date";
  std::string close = "Price";
  std::string open = "Open";
  std::string high = "High";
  std::string low = "Low";
  char delimiter = ',';
  /// Stripped from numeric cells before parsing; '\0' disables.
  char thousands = ',';
  DateOrder date_order = DateOrder::MonthFirst;
  friend bool operator==(const CsvSchema&, const CsvSchema&) = default;
};

/// Overrides CsvSchema fields from a TOML document with optional keys
/// date, close, open, high, low, delimiter, thousands, date_order
/// ("month-first" | "day-first").
CsvSchema schema_from_toml(const std::string& path);

/// One trading day. Open and close are optional; when present,
/// low <= min(open, close) <= max(open, close) <= high.
struct PriceRecord {
  Date date;
  std::optional<double> open;
  double high = 0.0;
  double low = 0.0;
  std::optional<double> close;
  friend bool operator==(const PriceRecord&, const PriceRecord&) = default;
};

/// Throws InputError naming the date if a price is non-positive or the
/// ordering is violated.
void validate_record(const PriceRecord& r);

struct LoadResult {
  std::vector<PriceRecord> records;  ///< ascending by date
  std::vector<std::string> warnings; ///< weekday gaps
};

/// Reads an OHLC CSV (quoted cells allowed). Errors carry the 1-based line
/// number; invariant violations name the record date; duplicate dates are
/// rejected. Throws InputError when the file cannot be opened or lacks a
/// mapped date/high/low column.
LoadResult load_ohlc_csv(const std::string& path, const CsvSchema& schema = {});
LoadResult load_ohlc_csv(std::istream& in, const CsvSchema& schema = {},
                         const std::string& source = "<stream>");

/// Weekdays strictly between consecutive dates that carry no record.
std::vector<std::string> weekday_gaps(const std::vector<PriceRecord>& records);

/// Daily maximum / minimum rates of return, labelled by the first day t:
///   r_max_t = high_{t+1} / low_t - 1,  r_min_t = low_{t+1} / high_t - 1.
struct RorSeries {
  std::vector<Date> dates;
  std::vector<double> r_max;
  std::vector<double> r_min;
  [[nodiscard]] std::size_t size() const { return dates.size(); }
};

/// Requires at least 2 records; output length is one less.
RorSeries compute_ror(const std::vector<PriceRecord>& records);

/// Inner join of two return series on dates.
struct AlignedPair {
  std::vector<Date> dates;
  std::vector<double> a_max, b_max;
  std::vector<double> a_min, b_min;
  std::size_t dropped_a = 0;  ///< days of a without a partner in b
  std::size_t dropped_b = 0;
  [[nodiscard]] std::size_t size() const { return dates.size(); }
};

/// Throws InputError on an empty intersection.
AlignedPair align_pair(const RorSeries& a, const RorSeries& b);

}  // namespace hrcp
