/**
 * @file returns.hpp
 * @brief Periodic returns and discounts, effective return/discount, anchored
 *        increments, annualization, and theory-of-interest identity checks.
 *
 * Conventions fixed across the library:
 *  - the standard deviation is the population form (divide by n, not n-1);
 *  - annualization factors (252 daily, 4 quarterly) are explicit parameters,
 *    never inferred from dates;
 *  - everything is a dimensionless fraction; percent appears only in output.
 */

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mvledger/core.hpp"
#include "mvledger/market_data.hpp"

namespace mvledger {

enum class SeriesKind { Return, Discount, AnchoredStart, AnchoredEnd };

/// One entry per period. Return entries are > -1 and discount entries < 1
/// for any strictly positive price path.
struct PeriodicSeries {
  SeriesKind kind = SeriesKind::Return;
  std::vector<double> values;
  double periods_per_year = 252.0;

  size_t size() const { return values.size(); }
};

namespace detail {

inline void require_prices(std::span<const double> prices) {
  if (prices.size() < 2) throw DomainError("need at least 2 prices");
  for (double a : prices)
    if (!(a > 0.0)) throw DomainError("price path must be strictly positive");
}

}  // namespace detail

/// r_i = a_i / a_{i-1} - 1.
inline PeriodicSeries periodic_returns(std::span<const double> prices, double periods_per_year) {
  detail::require_prices(prices);
  PeriodicSeries out{SeriesKind::Return, {}, periods_per_year};
  out.values.reserve(prices.size() - 1);
  for (size_t i = 1; i < prices.size(); ++i) out.values.push_back(prices[i] / prices[i - 1] - 1.0);
  return out;
}

inline PeriodicSeries periodic_returns(const PriceSeries& s, double periods_per_year) {
  if (s.nonpositive) throw DomainError("cannot take returns of a path that crossed zero");
  return periodic_returns(std::span<const double>(s.values), periods_per_year);
}

/// d_i = 1 - a_{i-1} / a_i, the conjugate of r_i under (1+r)(1-d) = 1.
inline PeriodicSeries periodic_discounts(std::span<const double> prices, double periods_per_year) {
  detail::require_prices(prices);
  PeriodicSeries out{SeriesKind::Discount, {}, periods_per_year};
  out.values.reserve(prices.size() - 1);
  for (size_t i = 1; i < prices.size(); ++i) out.values.push_back(1.0 - prices[i - 1] / prices[i]);
  return out;
}

inline PeriodicSeries periodic_discounts(const PriceSeries& s, double periods_per_year) {
  if (s.nonpositive) throw DomainError("cannot take discounts of a path that crossed zero");
  return periodic_discounts(std::span<const double>(s.values), periods_per_year);
}

/// Effective return (a1 - a0)/a0 over a window.
inline double effective_return(double a0, double a1) {
  if (!(a0 > 0.0) || !(a1 > 0.0)) throw DomainError("prices must be positive");
  return (a1 - a0) / a0;
}

/// Effective discount (a1 - a0)/a1; same sign as the effective return and
/// conjugate to it: (1 + r)(1 - d) = 1.
inline double effective_discount(double a0, double a1) {
  if (!(a0 > 0.0) || !(a1 > 0.0)) throw DomainError("prices must be positive");
  return (a1 - a0) / a1;
}

enum class IncrementAnchor { Start, End };

/// Per-period increments (a_i - a_{i-1}) divided by the first (Start) or last
/// (End) value. The sums telescope to the effective return resp. discount.
inline PeriodicSeries anchored_increments(std::span<const double> prices, IncrementAnchor anchor,
                                          double periods_per_year) {
  detail::require_prices(prices);
  const double denom = anchor == IncrementAnchor::Start ? prices.front() : prices.back();
  PeriodicSeries out{anchor == IncrementAnchor::Start ? SeriesKind::AnchoredStart
                                                      : SeriesKind::AnchoredEnd,
                     {},
                     periods_per_year};
  out.values.reserve(prices.size() - 1);
  for (size_t i = 1; i < prices.size(); ++i) out.values.push_back((prices[i] - prices[i - 1]) / denom);
  return out;
}

inline double annualized_mean(const PeriodicSeries& ps) {
  if (ps.values.empty()) throw DomainError("empty periodic series");
  double sum = 0.0;
  for (double v : ps.values) sum += v;
  return ps.periods_per_year * sum / static_cast<double>(ps.values.size());
}

/// Population standard deviation scaled by sqrt(periods_per_year).
inline double annualized_std(const PeriodicSeries& ps) {
  if (ps.values.empty()) throw DomainError("empty periodic series");
  const double n = static_cast<double>(ps.values.size());
  double mean = 0.0;
  for (double v : ps.values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : ps.values) ss += (v - mean) * (v - mean);
  return std::sqrt(ps.periods_per_year) * std::sqrt(ss / n);
}

/// Diagnostics contrasting mean periodic returns/discounts with the effective
/// (whole-window) quantities. product_0_1 is 1 up to roundoff for any positive
/// path; product_r_d is whatever the data makes it.
struct InterestIdentityReport {
  double e_r = 0.0;          ///< annualized mean periodic return
  double e_d = 0.0;          ///< annualized mean periodic discount
  double e0 = 0.0;           ///< effective return over the window
  double e1 = 0.0;           ///< effective discount over the window
  double product_r_d = 1.0;  ///< (1 + e_r)(1 - e_d)
  double product_0_1 = 1.0;  ///< (1 + e0)(1 - e1)
};

inline InterestIdentityReport interest_identity_report(std::span<const double> prices,
                                                       double periods_per_year) {
  detail::require_prices(prices);
  InterestIdentityReport rep;
  rep.e_r = annualized_mean(periodic_returns(prices, periods_per_year));
  rep.e_d = annualized_mean(periodic_discounts(prices, periods_per_year));
  rep.e0 = effective_return(prices.front(), prices.back());
  rep.e1 = effective_discount(prices.front(), prices.back());
  rep.product_r_d = (1.0 + rep.e_r) * (1.0 - rep.e_d);
  rep.product_0_1 = (1.0 + rep.e0) * (1.0 - rep.e1);
  return rep;
}

}  // namespace mvledger
