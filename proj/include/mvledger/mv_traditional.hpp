/**
 * @file mv_traditional.hpp
 * @brief The periodic-return moment model: annualized mean/covariance,
 *        portfolio (e, sigma) evaluation, and the long-only efficient
 *        frontier.
 *
 * This is the model under scrutiny. Mean mixing e_P = E p holds for
 * continually reallocated portfolios only; unattended portfolios generically
 * violate it (their (e, sigma) trace the "unattended path" computed from
 * blended prices, not from blended moments).
 */

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mvledger/core.hpp"
#include "mvledger/market_data.hpp"
#include "mvledger/portfolio.hpp"
#include "mvledger/returns.hpp"

namespace mvledger {

/// Annualized mean vector E, deviation vector sigma, covariance matrix V of
/// periodic returns (population covariance throughout).
struct MomentTable {
  std::vector<std::string> labels;
  Eigen::VectorXd E;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;

  Eigen::Index size() const { return E.size(); }

  Eigen::Index column_of(const std::string& label) const {
    for (size_t j = 0; j < labels.size(); ++j)
      if (labels[j] == label) return static_cast<Eigen::Index>(j);
    throw DomainError("unknown label '" + label + "'");
  }
};

/// Frontier portfolios at equally spaced mean levels, lowest at the
/// minimum-variance portfolio's mean, highest at max_j E_j.
struct FrontierResult {
  std::vector<std::string> labels;
  Eigen::VectorXd targets;
  Eigen::MatrixXd weights;  // rows = targets, cols = assets
  Eigen::VectorXd e;
  Eigen::VectorXd sigma;
};

/// Point on an (e, sigma) path parameterized by the blend coordinate t.
struct EsigPoint {
  double t = 0.0;
  double e = 0.0;
  double sigma = 0.0;
};

namespace detail {

inline Eigen::MatrixXd periodic_return_matrix(const PricePanel& panel) {
  const Eigen::Index n = panel.rows() - 1;
  Eigen::MatrixXd r(n, panel.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    r.row(i) = panel.values.row(i + 1).array() / panel.values.row(i).array() - 1.0;
  return r;
}

}  // namespace detail

/// E = ppy x columnwise mean of periodic returns, V = ppy x population
/// covariance, sigma from the diagonal of V.
inline MomentTable estimate_moments(const PricePanel& panel, double periods_per_year) {
  if (panel.rows() < 3) throw DomainError("moment estimation needs at least 2 periods (3 dates)");
  if (panel.values.minCoeff() <= 0.0)
    throw DomainError("moment estimation requires strictly positive prices");
  const Eigen::MatrixXd r = detail::periodic_return_matrix(panel);
  const double n = static_cast<double>(r.rows());

  MomentTable mt;
  mt.labels = panel.labels;
  const Eigen::RowVectorXd mean = r.colwise().mean();
  const Eigen::MatrixXd centered = r.rowwise() - mean;
  mt.E = periods_per_year * mean.transpose();
  mt.V = (periods_per_year / n) * (centered.transpose() * centered);
  mt.V = ((mt.V + mt.V.transpose()) / 2.0).eval();  // exact symmetry
  mt.sigma = mt.V.diagonal().array().max(0.0).sqrt();
  return mt;
}

/// e_p = E p, sigma_p = sqrt(p^T V p).
inline std::pair<double, double> portfolio_stats(const MomentTable& mt, const Eigen::VectorXd& p) {
  if (p.size() != mt.size()) throw DomainError("weight vector dimension does not match moment table");
  const double e = mt.E.dot(p);
  const double v = p.dot(mt.V * p);
  return {e, std::sqrt(std::max(v, 0.0))};
}

inline std::pair<double, double> portfolio_stats(const MomentTable& mt, const Weights& w) {
  validate_weights(w);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(mt.size());
  for (Eigen::Index j = 0; j < w.p.size(); ++j)
    p[mt.column_of(w.labels[static_cast<size_t>(j)])] += w.p[j];
  return portfolio_stats(mt, p);
}

namespace detail {

struct QpCandidate {
  Eigen::VectorXd p;
  double objective = std::numeric_limits<double>::infinity();
  int support_size = 0;
  std::vector<std::string> support;  // sorted labels, for the tie-break
};

/// Minimize p^T V p over the simplex (optionally with E p = target) by exact
/// KKT enumeration over bound patterns. Reference method for m <= 16: every
/// optimum lives on some support, and on its minimal support the
/// equality-constrained stationary point is unique and feasible.
inline QpCandidate solve_simplex_qp(const Eigen::MatrixXd& V, const Eigen::VectorXd& E,
                                    std::optional<double> target,
                                    const std::vector<std::string>& labels) {
  const Eigen::Index m = V.rows();
  if (m > 16) throw DomainError("active-set enumeration is limited to 16 assets");
  constexpr double kFeasTol = 1e-9;

  std::vector<QpCandidate> candidates;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < m; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    const Eigen::Index s = static_cast<Eigen::Index>(idx.size());
    const Eigen::Index k = target ? 2 : 1;

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + k, s + k);
    for (Eigen::Index a = 0; a < s; ++a)
      for (Eigen::Index b = 0; b < s; ++b) kkt(a, b) = 2.0 * V(idx[a], idx[b]);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + k);
    Eigen::Index row = s;
    if (target) {
      for (Eigen::Index a = 0; a < s; ++a) kkt(row, a) = kkt(a, row) = E[idx[a]];
      rhs[row] = *target;
      ++row;
    }
    for (Eigen::Index a = 0; a < s; ++a) kkt(row, a) = kkt(a, row) = 1.0;
    rhs[row] = 1.0;

    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd ps = sol.head(s);

    if (std::abs(ps.sum() - 1.0) > kFeasTol) continue;
    if (target) {
      double mean = 0.0;
      for (Eigen::Index a = 0; a < s; ++a) mean += E[idx[a]] * ps[a];
      if (std::abs(mean - *target) > kFeasTol * (1.0 + std::abs(*target))) continue;
    }
    if (ps.minCoeff() < -kFeasTol) continue;

    ps = ps.array().max(0.0);
    ps /= ps.sum();

    QpCandidate c;
    c.p = Eigen::VectorXd::Zero(m);
    for (Eigen::Index a = 0; a < s; ++a) c.p[idx[a]] = ps[a];
    c.objective = c.p.dot(V * c.p);
    for (Eigen::Index a = 0; a < s; ++a)
      if (ps[a] > 0.0) c.support.push_back(labels[static_cast<size_t>(idx[a])]);
    std::sort(c.support.begin(), c.support.end());
    c.support_size = static_cast<int>(c.support.size());
    candidates.push_back(std::move(c));
  }
  if (candidates.empty()) throw DomainError("no feasible portfolio for the requested mean level");

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::min(best, c.objective);
  const double obj_tol = 1e-9 * (1.0 + std::abs(best));
  const QpCandidate* chosen = nullptr;
  for (const auto& c : candidates) {
    if (c.objective > best + obj_tol) continue;
    if (!chosen || c.support_size < chosen->support_size ||
        (c.support_size == chosen->support_size && c.support < chosen->support))
      chosen = &c;
  }
  return *chosen;
}

/// Project onto the PSD cone. Covariances typed from 4-decimal tables carry
/// rounding-induced eigenvalues near -1e-4 x scale, so the rejection threshold
/// is relative; anything within it is clamped to zero.
inline Eigen::MatrixXd clamp_psd(const Eigen::MatrixXd& V) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
  const double lam_max = es.eigenvalues().maxCoeff();
  const double tol = std::max(1e-10, 1e-3 * std::max(lam_max, 0.0));
  if (es.eigenvalues().minCoeff() < -tol)
    throw DomainError("covariance matrix is not positive semidefinite");
  const Eigen::VectorXd lam = es.eigenvalues().array().max(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

/// k long-only minimum-variance portfolios at equally spaced target means,
/// from the minimum-variance portfolio's mean to max_j E_j. Degenerate ties
/// resolve to the smallest support, then the lexicographically smallest
/// label set.
inline FrontierResult efficient_frontier(const MomentTable& mt, int k) {
  if (k < 2) throw DomainError("frontier needs k >= 2 mean levels");
  const Eigen::MatrixXd V = detail::clamp_psd(mt.V);

  const auto mvp = detail::solve_simplex_qp(V, mt.E, std::nullopt, mt.labels);
  const double lo = mt.E.dot(mvp.p);
  const double hi = mt.E.maxCoeff();

  FrontierResult fr;
  fr.labels = mt.labels;
  fr.targets.resize(k);
  fr.weights.resize(k, mt.size());
  fr.e.resize(k);
  fr.sigma.resize(k);
  for (int i = 0; i < k; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / (k - 1);
    const auto c = detail::solve_simplex_qp(V, mt.E, t, mt.labels);
    fr.targets[i] = t;
    fr.weights.row(i) = c.p.transpose();
    auto [e, sig] = portfolio_stats(mt, Eigen::VectorXd(c.p));
    fr.e[i] = e;
    fr.sigma[i] = sig;
  }
  return fr;
}

/// (e, sigma) of unattended blends t a_from + (1-t) a_to on a uniform t-grid,
/// computed from the blended price path's own periodic returns. This is not
/// portfolio_stats applied to blended weights; the two differ generically.
inline std::vector<EsigPoint> unattended_esig_path(const PricePanel& panel,
                                                   const std::string& from_label,
                                                   const std::string& to_label, int nT,
                                                   double periods_per_year) {
  if (nT < 2) throw DomainError("path sampling needs nT >= 2");
  const Eigen::VectorXd a_from = panel.values.col(panel.column_of(from_label));
  const Eigen::VectorXd a_to = panel.values.col(panel.column_of(to_label));

  std::vector<EsigPoint> out;
  out.reserve(static_cast<size_t>(nT));
  for (int i = 0; i < nT; ++i) {
    const double t = static_cast<double>(i) / (nT - 1);
    const Eigen::VectorXd blend = t * a_from + (1.0 - t) * a_to;
    std::vector<double> prices(blend.data(), blend.data() + blend.size());
    const auto r = periodic_returns(std::span<const double>(prices), periods_per_year);
    out.push_back({t, annualized_mean(r), annualized_std(r)});
  }
  return out;
}

/// (e, sigma) of continually reallocated vertex blends p(t) = t e_i + (1-t) e_j
/// evaluated through the moment table: e is affine in t, sigma the square root
/// of a quadratic.
inline std::vector<EsigPoint> reallocated_esig_path(const MomentTable& mt, Eigen::Index i,
                                                    Eigen::Index j, int nT) {
  if (i < 0 || i >= mt.size() || j < 0 || j >= mt.size())
    throw DomainError("column index out of range");
  if (nT < 2) throw DomainError("path sampling needs nT >= 2");
  std::vector<EsigPoint> out;
  out.reserve(static_cast<size_t>(nT));
  for (int s = 0; s < nT; ++s) {
    const double t = static_cast<double>(s) / (nT - 1);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(mt.size());
    p[i] += t;
    p[j] += 1.0 - t;
    auto [e, sig] = portfolio_stats(mt, p);
    out.push_back({t, e, sig});
  }
  return out;
}

}  // namespace mvledger
