/**
 * @file core.hpp
 * @brief Shared primitives: calendar dates, anchors, errors, number and CSV helpers.
 */

#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mvledger {

/// Input could not be lexed/decoded (bad date syntax, non-numeric field, ragged row).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input is well-formed but violates a domain invariant (non-positive price,
/// unknown label, anchor not present, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Calendar day. Only market days taken from the data are ever stored;
/// no exchange calendar is synthesized.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return std::string(buf);
  }

  static bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

  static int days_in_month(int y, int m) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[m - 1];
  }

  /// Strict ISO-8601 "YYYY-MM-DD".
  static std::optional<Date> try_parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [](std::string_view t) {
      for (char c : t)
        if (c < '0' || c > '9') return false;
      return true;
    };
    if (!digits(s.substr(0, 4)) || !digits(s.substr(5, 2)) || !digits(s.substr(8, 2)))
      return std::nullopt;
    Date d;
    std::from_chars(s.data(), s.data() + 4, d.year);
    std::from_chars(s.data() + 5, s.data() + 7, d.month);
    std::from_chars(s.data() + 8, s.data() + 10, d.day);
    if (d.month < 1 || d.month > 12) return std::nullopt;
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
    return d;
  }

  static Date parse(std::string_view s) {
    auto d = try_parse(s);
    if (!d) throw ParseError("malformed date '" + std::string(s) + "' (expected YYYY-MM-DD)");
    return *d;
  }
};

/// Normalization anchor: the date at which a series is rescaled to `base`.
struct Anchor {
  Date date;
  double base = 100.0;

  bool operator==(const Anchor&) const = default;
};

/// Fixed-point formatting at `precision` decimals. printf rounds the exact
/// binary value, which resolves decimal ties to even. Values that round to
/// zero never print a sign.
inline std::string format_fixed(double x, int precision) {
  char buf[64];
  int n = std::snprintf(buf, sizeof(buf), "%.*f", precision, x);
  std::string out(buf, buf + (n < 0 ? 0 : n));
  if (out.find_first_not_of("-0.") == std::string::npos && out[0] == '-') out.erase(0, 1);
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    char ca = a[i], cb = b[i];
    if (ca >= 'A' && ca <= 'Z') ca = static_cast<char>(ca - 'A' + 'a');
    if (cb >= 'A' && cb <= 'Z') cb = static_cast<char>(cb - 'A' + 'a');
    if (ca != cb) return false;
  }
  return true;
}

/// Split one CSV record on commas. Formats in this project never quote fields.
inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

/// Split text into lines on '\n'; drops a final empty line, keeps interior ones.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  while (!out.empty() && trim(out.back()).empty()) out.pop_back();
  return out;
}

inline double parse_number(std::string_view s, const std::string& context) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(context + ": unparsable number '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

}  // namespace mvledger
