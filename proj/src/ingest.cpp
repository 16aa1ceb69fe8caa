#include "hrcp/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>

#include <toml.hpp>

#include "hrcp/error.hpp"

namespace hrcp {
namespace {

constexpr std::array<std::string_view, 12> kMonths{"jan", "feb", "mar", "apr", "may", "jun",
                                                  "jul", "aug", "sep", "oct", "nov", "dec"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<unsigned> month_from_name(std::string_view token) {
  const std::string t = lower(token);
  if (t.size() < 3) return std::nullopt;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (t.compare(0, 3, kMonths[i]) == 0) return static_cast<unsigned>(i + 1);
  }
  return std::nullopt;
}

// Splits on any run of separators, keeping letters and digits as tokens.
std::vector<std::string> date_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : s) {
    const bool alnum = std::isalnum(static_cast<unsigned char>(c)) != 0;
    if (!alnum) {
      flush();
      continue;
    }
    if (!cur.empty() && (std::isdigit(static_cast<unsigned char>(cur.back())) != 0) !=
                            (std::isdigit(static_cast<unsigned char>(c)) != 0)) {
      flush();
    }
    cur.push_back(c);
  }
  flush();
  return out;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

int to_int(const std::string& s) {
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

std::vector<std::string> split_row(const std::string& line, char delim, std::size_t lineno) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (quoted) throw InputError("line " + std::to_string(lineno) + ": unterminated quote");
  cells.push_back(cur);
  return cells;
}

double parse_price(std::string_view cell, char thousands, std::size_t lineno,
                   const std::string& column) {
  std::string s;
  for (char c : trim(cell)) {
    if (thousands != '\0' && c == thousands) continue;
    s.push_back(c);
  }
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InputError("line " + std::to_string(lineno) + ": column '" + column +
                     "': cannot parse number '" + std::string(trim(cell)) + "'");
  }
  return v;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& name) {
  if (name.empty()) return std::nullopt;
  const std::string want = lower(trim(name));
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string_view h = trim(header[i]);
    if (i == 0 && h.size() >= 3 && h.substr(0, 3) == "\xEF\xBB\xBF") h.remove_prefix(3);
    if (lower(trim(h)) == want) return i;
  }
  return std::nullopt;
}

}  // namespace

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date parse_date(std::string_view text, DateOrder order) {
  const auto bad = [&](const char* why) {
    return InputError("bad date '" + std::string(text) + "': " + why);
  };
  const auto tok = date_tokens(text);
  if (tok.size() != 3) throw bad("expected three fields");
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (auto mn = month_from_name(tok[0]); mn && all_digits(tok[1]) && all_digits(tok[2])) {
    m = *mn;  // "Mar 26, 2020"
    d = static_cast<unsigned>(to_int(tok[1]));
    y = to_int(tok[2]);
  } else if (auto mn2 = month_from_name(tok[1]); mn2 && all_digits(tok[0]) && all_digits(tok[2])) {
    m = *mn2;  // "26 Mar 2020"
    d = static_cast<unsigned>(to_int(tok[0]));
    y = to_int(tok[2]);
  } else if (all_digits(tok[0]) && all_digits(tok[1]) && all_digits(tok[2])) {
    if (tok[0].size() == 4) {
      y = to_int(tok[0]);
      m = static_cast<unsigned>(to_int(tok[1]));
      d = static_cast<unsigned>(to_int(tok[2]));
    } else if (tok[2].size() == 4) {
      y = to_int(tok[2]);
      const auto a = static_cast<unsigned>(to_int(tok[0]));
      const auto b = static_cast<unsigned>(to_int(tok[1]));
      m = order == DateOrder::MonthFirst ? a : b;
      d = order == DateOrder::MonthFirst ? b : a;
    } else {
      throw bad("four-digit year required");
    }
  } else {
    throw bad("unrecognized layout");
  }
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw bad("no such calendar day");
  return date;
}

CsvSchema schema_from_toml(const std::string& path) {
  CsvSchema s;
  toml::table t;
  try {
    t = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    throw InputError("schema " + path + ": " + std::string(e.description()));
  }
  const auto str = [&](const char* key, std::string& dst) {
    if (auto v = t[key].value<std::string>()) dst = *v;
  };
  const auto chr = [&](const char* key, char& dst) {
    if (auto v = t[key].value<std::string>()) {
      if (v->size() > 1) throw InputError(std::string("schema key '") + key + "' must be one character");
      dst = v->empty() ? '\0' : (*v)[0];
    }
  };
  str("date", s.date);
  str("close", s.close);
  str("open", s.open);
  str("high", s.high);
  str("low", s.low);
  chr("delimiter", s.delimiter);
  chr("thousands", s.thousands);
  if (auto v = t["date_order"].value<std::string>()) {
    if (*v == "month-first") {
      s.date_order = DateOrder::MonthFirst;
    } else if (*v == "day-first") {
      s.date_order = DateOrder::DayFirst;
    } else {
      throw InputError("schema date_order must be 'month-first' or 'day-first'");
    }
  }
  if (s.delimiter == '\0') throw InputError("schema delimiter must not be empty");
  return s;
}

void validate_record(const PriceRecord& r) {
  const std::string when = format_date(r.date);
  const auto positive = [&](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InputError(when + ": " + what + " price must be positive");
    }
  };
  positive(r.high, "high");
  positive(r.low, "low");
  if (r.open) positive(*r.open, "open");
  if (r.close) positive(*r.close, "close");
  if (r.low > r.high) throw InputError(when + ": low exceeds high");
  for (const auto& v : {r.open, r.close}) {
    if (v && (*v < r.low || *v > r.high)) {
      throw InputError(when + ": open/close outside the [low, high] range");
    }
  }
}

LoadResult load_ohlc_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return load_ohlc_csv(in, schema, path);
}

LoadResult load_ohlc_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
  const auto where = [&](const std::string& msg) { return InputError(source + ": " + msg); };
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header = split_row(line, schema.delimiter, lineno);
      break;
    }
  }
  if (header.empty()) throw where("no header row");

  const auto require = [&](const std::string& name) {
    auto idx = find_column(header, name);
    if (!idx) throw where("missing required column '" + name + "'");
    return *idx;
  };
  const std::size_t c_date = require(schema.date);
  const std::size_t c_high = require(schema.high);
  const std::size_t c_low = require(schema.low);
  const auto c_open = find_column(header, schema.open);
  const auto c_close = find_column(header, schema.close);

  LoadResult out;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    try {
      cells = split_row(line, schema.delimiter, lineno);
    } catch (const InputError& e) {
      throw where(e.what());
    }
    if (cells.size() < header.size()) {
      throw where("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                  " fields, found " + std::to_string(cells.size()));
    }
    PriceRecord r;
    try {
      r.date = parse_date(trim(cells[c_date]), schema.date_order);
      r.high = parse_price(cells[c_high], schema.thousands, lineno, schema.high);
      r.low = parse_price(cells[c_low], schema.thousands, lineno, schema.low);
      if (c_open) r.open = parse_price(cells[*c_open], schema.thousands, lineno, schema.open);
      if (c_close) r.close = parse_price(cells[*c_close], schema.thousands, lineno, schema.close);
    } catch (const InputError& e) {
      const std::string msg = e.what();
      throw where(msg.rfind("line ", 0) == 0 ? msg : "line " + std::to_string(lineno) + ": " + msg);
    }
    try {
      validate_record(r);
    } catch (const InputError& e) {
      throw where("line " + std::to_string(lineno) + ": " + e.what());
    }
    out.records.push_back(r);
  }
  if (out.records.empty()) throw where("no data rows");

  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const PriceRecord& a, const PriceRecord& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < out.records.size(); ++i) {
    if (out.records[i].date == out.records[i - 1].date) {
      throw where("duplicate date " + format_date(out.records[i].date));
    }
  }
  for (auto& w : weekday_gaps(out.records)) out.warnings.push_back(source + ": " + w);
  return out;
}

std::vector<std::string> weekday_gaps(const std::vector<PriceRecord>& records) {
  using std::chrono::sys_days;
  using std::chrono::weekday;
  std::vector<std::string> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const sys_days a{records[i - 1].date};
    const sys_days b{records[i].date};
    int missing = 0;
    for (sys_days d = a + std::chrono::days{1}; d < b; d += std::chrono::days{1}) {
      const weekday wd{d};
      if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) ++missing;
    }
    if (missing > 0) {
      out.push_back(std::to_string(missing) + " weekday(s) missing between " +
                    format_date(records[i - 1].date) + " and " + format_date(records[i].date));
    }
  }
  return out;
}

RorSeries compute_ror(const std::vector<PriceRecord>& records) {
  if (records.size() < 2) throw InputError("rates of return need at least 2 records");
  RorSeries s;
  const std::size_t n = records.size() - 1;
  s.dates.reserve(n);
  s.r_max.reserve(n);
  s.r_min.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& cur = records[t];
    const auto& next = records[t + 1];
    if (!(next.date > cur.date)) throw InputError("records must be strictly increasing in date");
    s.dates.push_back(cur.date);
    s.r_max.push_back(next.high / cur.low - 1.0);
    s.r_min.push_back(next.low / cur.high - 1.0);
  }
  return s;
}

AlignedPair align_pair(const RorSeries& a, const RorSeries& b) {
  AlignedPair out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a.dates[i] < b.dates[j]) {
      ++out.dropped_a;
      ++i;
    } else if (b.dates[j] < a.dates[i]) {
      ++out.dropped_b;
      ++j;
    } else {
      out.dates.push_back(a.dates[i]);
      out.a_max.push_back(a.r_max[i]);
      out.b_max.push_back(b.r_max[j]);
      out.a_min.push_back(a.r_min[i]);
      out.b_min.push_back(b.r_min[j]);
      ++i;
      ++j;
    }
  }
  out.dropped_a += a.size() - i;
  out.dropped_b += b.size() - j;
  if (out.dates.empty()) throw InputError("the two series share no dates");
  return out;
}

}  // namespace hrcp
