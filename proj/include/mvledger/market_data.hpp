/**
 * @file market_data.hpp
 * @brief Quote ingestion, adjusted closing prices, normalization, panel alignment.
 *
 * Adjusted closing prices are artificial closing prices that fold dividends and
 * splits into the price path, so day-over-day ratios equal total returns. Two
 * valid adjusted series for the same instrument differ only by a positive
 * scalar, so every series here is pinned down by a normalization anchor
 * (date + base value, base 100 by default).
 */

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvledger/core.hpp"

namespace mvledger {

/// One dated closing quote. `adj_close` is present when the source file
/// carried an externally adjusted column (Yahoo's "Adj Close").
struct RawQuote {
  Date date;
  double close = 0.0;
  std::optional<double> adj_close;
};

/// Cash dividend per share, keyed by ex-dividend date.
struct DistributionEvent {
  Date ex_date;
  double amount = 0.0;
};

/// Share split; `ratio` is the share multiplier (3.0 for a 3:1 split).
struct SplitEvent {
  Date ex_date;
  double ratio = 1.0;
};

/// Dated, strictly positive adjusted closing prices for one instrument.
/// `anchor` is set whenever the series has been normalized; `nonpositive`
/// flags long-short portfolio paths that crossed zero (see portfolio.hpp).
struct PriceSeries {
  std::string label;
  std::vector<Date> dates;
  std::vector<double> values;
  std::optional<Anchor> anchor;
  bool nonpositive = false;

  size_t size() const { return values.size(); }

  size_t index_of(const Date& d) const {
    auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d)
      throw DomainError("date " + d.to_string() + " not in series '" + label + "'");
    return static_cast<size_t>(it - dates.begin());
  }
};

/// Date-aligned matrix of adjusted closing prices, one column per instrument.
/// `anchor` is present when all columns share a normalization anchor; panels
/// read from bare CSV without a common base row carry no anchor.
struct PricePanel {
  std::vector<Date> dates;
  std::vector<std::string> labels;
  Eigen::MatrixXd values;  // rows = dates, cols = labels
  std::optional<Anchor> anchor;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  Eigen::Index column_of(const std::string& label) const {
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(labels.size()); ++j)
      if (labels[static_cast<size_t>(j)] == label) return j;
    throw DomainError("unknown label '" + label + "'");
  }

  size_t row_of(const Date& d) const {
    auto it = std::lower_bound(dates.begin(), dates.end(), d);
    if (it == dates.end() || *it != d)
      throw DomainError("date " + d.to_string() + " not in panel");
    return static_cast<size_t>(it - dates.begin());
  }

  PriceSeries series(const std::string& label) const {
    Eigen::Index j = column_of(label);
    PriceSeries s;
    s.label = label;
    s.dates = dates;
    s.values.assign(values.col(j).data(), values.col(j).data() + values.rows());
    s.anchor = anchor;
    return s;
  }
};

namespace detail {

struct QuoteLayout {
  size_t date_col = 0;
  size_t close_col = 1;
  std::optional<size_t> adj_col;
};

inline QuoteLayout detect_quote_layout(const std::vector<std::string_view>& header) {
  if (header.empty() || !iequals(header[0], "date"))
    throw ParseError("row 1: quote header must start with a 'Date' column");
  QuoteLayout layout;
  if (header.size() == 2) return layout;  // date,close / date,value
  std::optional<size_t> close_col, adj_col;
  for (size_t i = 1; i < header.size(); ++i) {
    if (iequals(header[i], "close")) close_col = i;
    if (iequals(header[i], "adj close") || iequals(header[i], "adj_close")) adj_col = i;
  }
  if (!close_col && !adj_col)
    throw ParseError("row 1: unrecognized quote header (need 2 columns or a Close/Adj Close column)");
  layout.close_col = close_col ? *close_col : *adj_col;
  layout.adj_col = adj_col;
  return layout;
}

}  // namespace detail

/// Parse a quote CSV: the 7-column Yahoo layout ("Date,Open,High,Low,Close,Adj
/// Close,Volume") or a 2-column date,value layout. Dates must be strictly
/// increasing and prices strictly positive.
inline std::vector<RawQuote> parse_quote_csv(std::string_view text) {
  auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError("row 1: missing header row");
  auto layout = detail::detect_quote_layout(detail::split_fields(lines[0]));

  std::vector<RawQuote> quotes;
  quotes.reserve(lines.size() - 1);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const std::string row = "row " + std::to_string(i + 1);
    auto fields = detail::split_fields(lines[i]);
    size_t needed = std::max(layout.close_col, layout.adj_col.value_or(0)) + 1;
    if (fields.size() < needed)
      throw ParseError(row + ": expected at least " + std::to_string(needed) + " fields, got " +
                       std::to_string(fields.size()));
    RawQuote q;
    auto d = Date::try_parse(fields[layout.date_col]);
    if (!d) throw ParseError(row + ": malformed date '" + std::string(fields[layout.date_col]) + "'");
    q.date = *d;
    q.close = detail::parse_number(fields[layout.close_col], row);
    if (q.close <= 0.0)
      throw DomainError(row + ": non-positive price " + std::string(fields[layout.close_col]));
    if (layout.adj_col && layout.adj_col != layout.close_col) {
      double adj = detail::parse_number(fields[*layout.adj_col], row);
      if (adj <= 0.0) throw DomainError(row + ": non-positive adjusted price");
      q.adj_close = adj;
    }
    if (!quotes.empty()) {
      if (q.date == quotes.back().date) throw DomainError(row + ": duplicate date " + q.date.to_string());
      if (q.date < quotes.back().date)
        throw DomainError(row + ": dates must be strictly increasing (" + q.date.to_string() + ")");
    }
    quotes.push_back(q);
  }
  return quotes;
}

/// Distribution CSV: header "ex_date,amount".
inline std::vector<DistributionEvent> parse_distribution_csv(std::string_view text) {
  auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError("row 1: missing header row");
  std::vector<DistributionEvent> events;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const std::string row = "row " + std::to_string(i + 1);
    auto fields = detail::split_fields(lines[i]);
    if (fields.size() != 2) throw ParseError(row + ": expected 2 fields");
    DistributionEvent e;
    auto d = Date::try_parse(fields[0]);
    if (!d) throw ParseError(row + ": malformed date '" + std::string(fields[0]) + "'");
    e.ex_date = *d;
    e.amount = detail::parse_number(fields[1], row);
    if (e.amount <= 0.0) throw DomainError(row + ": dividend amount must be positive");
    events.push_back(e);
  }
  return events;
}

/// Split CSV: header "ex_date,ratio".
inline std::vector<SplitEvent> parse_split_csv(std::string_view text) {
  auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError("row 1: missing header row");
  std::vector<SplitEvent> events;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const std::string row = "row " + std::to_string(i + 1);
    auto fields = detail::split_fields(lines[i]);
    if (fields.size() != 2) throw ParseError(row + ": expected 2 fields");
    SplitEvent e;
    auto d = Date::try_parse(fields[0]);
    if (!d) throw ParseError(row + ": malformed date '" + std::string(fields[0]) + "'");
    e.ex_date = *d;
    e.ratio = detail::parse_number(fields[1], row);
    if (e.ratio <= 0.0) throw DomainError(row + ": split ratio must be positive");
    events.push_back(e);
  }
  return events;
}

/// Construct normalized adjusted closing prices from closes plus distributions.
///
/// A running "adjusted closing shares" multiplier starts at `seed`, is
/// multiplied by c0/(c0 - d) on each ex-dividend date (c0 = previous market
/// day's close, d = dividend) and by the ratio on each split date, and is
/// constant otherwise. Adjusted price = close x shares, rescaled so the value
/// at `anchor` equals `base`. Any two seeds give the same output because valid
/// adjusted series are positive scalar multiples of each other.
inline PriceSeries build_adjusted_closes(const std::vector<RawQuote>& quotes,
                                         const std::vector<DistributionEvent>& events,
                                         const Date& anchor, double base,
                                         std::string label = {},
                                         const std::vector<SplitEvent>& splits = {},
                                         double seed = 1.0) {
  if (quotes.size() < 2) throw DomainError("need at least 2 quotes to build a series");
  if (base <= 0.0) throw DomainError("base must be positive");
  if (seed <= 0.0) throw DomainError("shares seed must be positive");
  for (size_t i = 1; i < quotes.size(); ++i)
    if (!(quotes[i - 1].date < quotes[i].date))
      throw DomainError("quote dates must be strictly increasing");

  std::map<Date, double> dividend_on, split_on;
  for (const auto& e : events) dividend_on[e.ex_date] += e.amount;
  for (const auto& s : splits) {
    auto [it, inserted] = split_on.try_emplace(s.ex_date, s.ratio);
    if (!inserted) it->second *= s.ratio;
  }

  auto find_index = [&](const Date& d) -> std::optional<size_t> {
    auto it = std::lower_bound(quotes.begin(), quotes.end(), d,
                               [](const RawQuote& q, const Date& x) { return q.date < x; });
    if (it == quotes.end() || it->date != d) return std::nullopt;
    return static_cast<size_t>(it - quotes.begin());
  };
  for (const auto& [d, amount] : dividend_on) {
    auto idx = find_index(d);
    if (!idx) throw DomainError("distribution ex-date " + d.to_string() + " is not a market day of the series");
    if (*idx == 0)
      throw DomainError("distribution ex-date " + d.to_string() + " has no prior market day");
    if (amount >= quotes[*idx - 1].close)
      throw DomainError("distribution on " + d.to_string() + " is not smaller than the prior close");
  }
  for (const auto& [d, ratio] : split_on) {
    (void)ratio;
    if (!find_index(d)) throw DomainError("split ex-date " + d.to_string() + " is not a market day of the series");
  }

  PriceSeries out;
  out.label = std::move(label);
  out.dates.reserve(quotes.size());
  out.values.reserve(quotes.size());
  double shares = seed;
  for (size_t i = 0; i < quotes.size(); ++i) {
    if (auto it = dividend_on.find(quotes[i].date); it != dividend_on.end()) {
      const double c0 = quotes[i - 1].close;
      shares *= c0 / (c0 - it->second);
    }
    if (auto it = split_on.find(quotes[i].date); it != split_on.end()) shares *= it->second;
    out.dates.push_back(quotes[i].date);
    out.values.push_back(quotes[i].close * shares);
  }

  auto anchor_idx = find_index(anchor);
  if (!anchor_idx) throw DomainError("anchor " + anchor.to_string() + " is not a market day of the series");
  const double scale = base / out.values[*anchor_idx];
  for (double& v : out.values) v *= scale;
  out.anchor = Anchor{anchor, base};
  return out;
}

/// Rescale so the value at `anchor` equals `base` (the spreadsheet rule
/// value x base / value_at_anchor). Idempotent at a fixed anchor/base.
inline PriceSeries normalize(const PriceSeries& series, const Date& anchor, double base) {
  if (base <= 0.0) throw DomainError("base must be positive");
  size_t idx = series.index_of(anchor);
  if (series.values[idx] <= 0.0)
    throw DomainError("cannot normalize: value at anchor is not positive");
  PriceSeries out = series;
  const double scale = base / series.values[idx];
  for (double& v : out.values) v *= scale;
  out.values[idx] = base;  // pin the anchor value exactly
  out.anchor = Anchor{anchor, base};
  return out;
}

/// Series from a quote list's adjusted column (Yahoo path), normalized.
/// Falls back to the close column when no adjusted column is present.
inline PriceSeries series_from_quotes(const std::vector<RawQuote>& quotes, const Date& anchor,
                                      double base, std::string label = {}) {
  if (quotes.size() < 2) throw DomainError("need at least 2 quotes to build a series");
  PriceSeries s;
  s.label = std::move(label);
  for (const auto& q : quotes) {
    s.dates.push_back(q.date);
    s.values.push_back(q.adj_close.value_or(q.close));
  }
  return normalize(s, anchor, base);
}

/// Align series on the intersection of their date axes. All series must share
/// the same anchor date and base.
inline PricePanel align_panel(const std::vector<PriceSeries>& series_list) {
  if (series_list.empty()) throw DomainError("cannot align an empty series list");
  for (const auto& s : series_list) {
    if (!s.anchor) throw DomainError("series '" + s.label + "' has no normalization anchor");
    if (!(*s.anchor == *series_list.front().anchor)) throw DomainError("mismatched anchors");
  }
  for (size_t i = 0; i < series_list.size(); ++i)
    for (size_t j = i + 1; j < series_list.size(); ++j)
      if (series_list[i].label == series_list[j].label)
        throw DomainError("duplicate column label '" + series_list[i].label + "'");

  std::vector<Date> common = series_list.front().dates;
  for (size_t k = 1; k < series_list.size(); ++k) {
    const auto& d = series_list[k].dates;
    std::vector<Date> next;
    std::set_intersection(common.begin(), common.end(), d.begin(), d.end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw DomainError("empty date intersection");
  if (!std::binary_search(common.begin(), common.end(), series_list.front().anchor->date))
    throw DomainError("date intersection drops the anchor");

  PricePanel panel;
  panel.dates = common;
  panel.anchor = series_list.front().anchor;
  panel.values.resize(static_cast<Eigen::Index>(common.size()),
                      static_cast<Eigen::Index>(series_list.size()));
  for (size_t j = 0; j < series_list.size(); ++j) {
    panel.labels.push_back(series_list[j].label);
    const auto& s = series_list[j];
    size_t si = 0;
    for (size_t r = 0; r < common.size(); ++r) {
      while (s.dates[si] != common[r]) ++si;
      panel.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = s.values[si];
    }
  }
  return panel;
}

/// Panel CSV: header "date,<sym1>,...,<symN>", fixed-point values, LF endings.
inline std::string write_panel_csv(const PricePanel& panel, int precision = 5) {
  std::string out = "date";
  for (const auto& l : panel.labels) out += "," + l;
  out += "\n";
  for (Eigen::Index r = 0; r < panel.rows(); ++r) {
    out += panel.dates[static_cast<size_t>(r)].to_string();
    for (Eigen::Index c = 0; c < panel.cols(); ++c)
      out += "," + format_fixed(panel.values(r, c), precision);
    out += "\n";
  }
  return out;
}

/// Read a panel CSV. If every column carries the same value on the first row,
/// that row is taken as the normalization anchor; otherwise the panel carries
/// no anchor and operations that need one will say so.
inline PricePanel read_panel_csv(std::string_view text) {
  auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError("row 1: missing header row");
  auto header = detail::split_fields(lines[0]);
  if (header.size() < 2 || !detail::iequals(header[0], "date"))
    throw ParseError("row 1: panel header must be 'date,<label>,...'");

  PricePanel panel;
  for (size_t i = 1; i < header.size(); ++i) panel.labels.emplace_back(header[i]);
  for (size_t i = 0; i < panel.labels.size(); ++i)
    for (size_t j = i + 1; j < panel.labels.size(); ++j)
      if (panel.labels[i] == panel.labels[j])
        throw DomainError("duplicate column label '" + panel.labels[i] + "'");

  const size_t ncols = header.size();
  std::vector<std::vector<double>> cols(ncols - 1);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const std::string row = "row " + std::to_string(i + 1);
    auto fields = detail::split_fields(lines[i]);
    if (fields.size() != ncols)
      throw ParseError(row + ": expected " + std::to_string(ncols) + " fields, got " +
                       std::to_string(fields.size()));
    auto d = Date::try_parse(fields[0]);
    if (!d) throw ParseError(row + ": malformed date '" + std::string(fields[0]) + "'");
    if (!panel.dates.empty() && !(panel.dates.back() < *d))
      throw DomainError(row + ": dates must be strictly increasing");
    panel.dates.push_back(*d);
    for (size_t c = 1; c < ncols; ++c) cols[c - 1].push_back(detail::parse_number(fields[c], row));
  }
  if (panel.dates.empty()) throw DomainError("panel has no data rows");

  panel.values.resize(static_cast<Eigen::Index>(panel.dates.size()),
                      static_cast<Eigen::Index>(ncols - 1));
  for (size_t c = 0; c + 1 < ncols; ++c)
    for (size_t r = 0; r < panel.dates.size(); ++r)
      panel.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cols[c][r];

  bool common_first_row = true;
  for (Eigen::Index c = 1; c < panel.cols(); ++c)
    if (panel.values(0, c) != panel.values(0, 0)) common_first_row = false;
  if (common_first_row && panel.values(0, 0) > 0.0)
    panel.anchor = Anchor{panel.dates.front(), panel.values(0, 0)};
  return panel;
}

}  // namespace mvledger
