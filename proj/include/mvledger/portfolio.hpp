/**
 * @file portfolio.hpp
 * @brief Portfolio price histories: unattended affine combinations, continual
 *        reallocation, and reconstruction from return/risk coordinates.
 *
 * An unattended (buy-and-hold) portfolio's price path is a fixed affine
 * combination of component adjusted prices; its holdings drift. A continually
 * reallocated portfolio is rebalanced to fixed proportions every period; its
 * period returns are the fixed affine combination of component returns. The
 * two disagree after the first period whenever volatilities differ.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mvledger/core.hpp"
#include "mvledger/market_data.hpp"

namespace mvledger {

/// Portfolio proportions at the anchor close. Proportions sum to 1; negative
/// entries (short positions) are allowed only when `long_only` is false.
struct Weights {
  std::vector<std::string> labels;
  Eigen::VectorXd p;
  bool long_only = true;
};

inline void validate_weights(const Weights& w, double sum_tolerance = 1e-12) {
  if (w.labels.size() != static_cast<size_t>(w.p.size()))
    throw DomainError("weights: labels and proportions differ in length");
  if (w.p.size() == 0) throw DomainError("weights: empty");
  const double sum = w.p.sum();
  if (std::abs(sum - 1.0) > sum_tolerance)
    throw DomainError("weights must sum to 1 (got " + std::to_string(sum) + ")");
  if (w.long_only)
    for (Eigen::Index i = 0; i < w.p.size(); ++i)
      if (w.p[i] < 0.0 || w.p[i] > 1.0)
        throw DomainError("long-only weights must lie in [0, 1] ('" +
                          w.labels[static_cast<size_t>(i)] + "')");
}

/// Weights file: CSV "label,proportion", sum validated within 1e-9 and then
/// renormalized exactly.
inline Weights parse_weights_csv(std::string_view text, bool long_only = true) {
  auto lines = detail::split_lines(text);
  Weights w;
  w.long_only = long_only;
  std::vector<double> vals;
  for (size_t i = 0; i < lines.size(); ++i) {
    auto t = detail::trim(lines[i]);
    if (t.empty()) continue;
    auto fields = detail::split_fields(t);
    if (fields.size() != 2) throw ParseError("row " + std::to_string(i + 1) + ": expected label,proportion");
    if (i == 0 && detail::iequals(fields[0], "label")) continue;  // optional header
    w.labels.emplace_back(fields[0]);
    vals.push_back(detail::parse_number(fields[1], "row " + std::to_string(i + 1)));
  }
  if (vals.empty()) throw DomainError("weights file has no entries");
  double sum = std::accumulate(vals.begin(), vals.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9)
    throw DomainError("weights file must sum to 1 within 1e-9 (got " + std::to_string(sum) + ")");
  w.p = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())) / sum;
  validate_weights(w);
  return w;
}

/// Return/risk coordinates of one instrument over a window: total return e0
/// and a pure-risk vector z0 whose entries sum to zero.
struct RiskCoordinates {
  double e0 = 0.0;
  Eigen::VectorXd z0;

  Eigen::Index periods() const { return z0.size(); }
};

inline void validate_risk_coordinates(const RiskCoordinates& rc) {
  if (rc.z0.size() == 0) throw DomainError("risk coordinates: empty risk vector");
  if (std::abs(rc.z0.sum()) > 1e-12)
    throw DomainError("risk vector entries must sum to 0 (pure risk)");
}

namespace detail {

inline Eigen::MatrixXd select_columns(const PricePanel& panel, const Weights& w) {
  Eigen::MatrixXd sub(panel.rows(), w.p.size());
  for (Eigen::Index j = 0; j < w.p.size(); ++j)
    sub.col(j) = panel.values.col(panel.column_of(w.labels[static_cast<size_t>(j)]));
  return sub;
}

}  // namespace detail

/// Buy-and-hold path: pointwise a_P(t) = sum_j p_j a_j(t). Long-short paths
/// may go non-positive; such a path is flagged rather than rejected.
inline PriceSeries unattended_path(const PricePanel& panel, const Weights& w,
                                   std::string label = "PORT") {
  validate_weights(w);
  Eigen::MatrixXd sub = detail::select_columns(panel, w);
  Eigen::VectorXd path = sub * w.p;
  PriceSeries out;
  out.label = std::move(label);
  out.dates = panel.dates;
  out.values.assign(path.data(), path.data() + path.size());
  out.anchor = panel.anchor;
  out.nonpositive = (path.minCoeff() <= 0.0);
  return out;
}

/// Continually reallocated path: a_0 = start, then a_i = a_{i-1}(1 + r_P,i)
/// with r_P,i = sum_j p_j r_j,i. `start` defaults to the panel base when the
/// panel is anchored at its first date.
inline PriceSeries reallocated_path(const PricePanel& panel, const Weights& w,
                                    std::optional<double> start = std::nullopt,
                                    std::string label = "PORT") {
  validate_weights(w);
  if (panel.rows() < 2) throw DomainError("panel needs at least 2 dates");
  double a0;
  if (start) {
    a0 = *start;
  } else if (panel.anchor && panel.anchor->date == panel.dates.front()) {
    a0 = panel.anchor->base;
  } else {
    throw DomainError("reallocated path needs a start value (panel is not anchored at its first date)");
  }
  if (a0 <= 0.0) throw DomainError("start value must be positive");

  Eigen::MatrixXd sub = detail::select_columns(panel, w);
  if (sub.minCoeff() <= 0.0)
    throw DomainError("reallocated path requires strictly positive component prices");

  PriceSeries out;
  out.label = std::move(label);
  out.dates = panel.dates;
  out.values.resize(static_cast<size_t>(panel.rows()));
  out.values[0] = a0;
  for (Eigen::Index i = 1; i < panel.rows(); ++i) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < w.p.size(); ++j)
      r += w.p[j] * (sub(i, j) / sub(i - 1, j) - 1.0);
    out.values[static_cast<size_t>(i)] = out.values[static_cast<size_t>(i - 1)] * (1.0 + r);
  }
  out.anchor = Anchor{panel.dates.front(), a0};
  return out;
}

/// Effective proportions of an unattended portfolio at a given close:
/// p_j a_j(date) / a_P(date). Entries sum to 1.
inline Eigen::VectorXd holdings_proportions(const PricePanel& panel, const Weights& w,
                                            const Date& date) {
  validate_weights(w);
  const size_t r = panel.row_of(date);
  Eigen::MatrixXd sub = detail::select_columns(panel, w);
  const Eigen::VectorXd row = sub.row(static_cast<Eigen::Index>(r)).transpose();
  const double total = row.dot(w.p);
  if (total == 0.0) throw DomainError("portfolio value is zero on " + date.to_string());
  return (w.p.array() * row.array() / total).matrix();
}

/// Rebuild a price path from (e0, z0): r0 = z0 + (e0/n) 1, then cumulative
/// sums scaled by `base`. The final value is base(1 + e0) because z0 sums
/// to zero. Length is n + 1.
inline std::vector<double> reconstruct_values(const RiskCoordinates& rc, double base) {
  validate_risk_coordinates(rc);
  if (base <= 0.0) throw DomainError("base must be positive");
  const Eigen::Index n = rc.periods();
  const double mean_r = rc.e0 / static_cast<double>(n);
  std::vector<double> values(static_cast<size_t>(n) + 1);
  double acc = 1.0;
  values[0] = base;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += rc.z0[i] + mean_r;
    if (!(acc > 0.0)) throw DomainError("path crosses zero at period " + std::to_string(i + 1));
    values[static_cast<size_t>(i) + 1] = base * acc;
  }
  return values;
}

inline PriceSeries reconstruct_from_risk(const RiskCoordinates& rc, double base,
                                         std::vector<Date> dates, std::string label) {
  if (dates.size() != static_cast<size_t>(rc.periods()) + 1)
    throw DomainError("reconstruction needs n + 1 dates");
  PriceSeries out;
  out.label = std::move(label);
  out.dates = std::move(dates);
  out.values = reconstruct_values(rc, base);
  out.anchor = Anchor{out.dates.front(), base};
  return out;
}

}  // namespace mvledger
