/**
 * @file mv_linear.hpp
 * @brief The linear total-return / pure-risk model: anchored increments split
 *        into total returns E0 and a pure-risk matrix Z0, Gram covariance
 *        V0 = Z0^T Z0, an orthonormal factorization of the risk vectors, and a
 *        sectioned-CSV persistence format for the decomposition.
 *
 * The model is linear in prices: the coordinates of an unattended combination
 * are the same affine combination of component coordinates. Total returns and
 * risk magnitudes are whole-window quantities; no annualization is applied.
 */

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mvledger/core.hpp"
#include "mvledger/market_data.hpp"
#include "mvledger/portfolio.hpp"

namespace mvledger {

/// Total window returns E0, risk magnitudes sigma0, and the n x m pure-risk
/// matrix Z0. Each Z0 column sums to zero and sigma0_j is its Euclidean norm.
struct RiskTable {
  std::vector<std::string> labels;
  Eigen::VectorXd E0;
  Eigen::VectorXd sigma0;
  Eigen::MatrixXd Z0;

  Eigen::Index periods() const { return Z0.rows(); }
  Eigen::Index size() const { return E0.size(); }

  Eigen::Index column_of(const std::string& label) const {
    for (size_t j = 0; j < labels.size(); ++j)
      if (labels[j] == label) return static_cast<Eigen::Index>(j);
    throw DomainError("unknown label '" + label + "'");
  }

  RiskCoordinates coordinates(const std::string& label) const {
    const Eigen::Index j = column_of(label);
    return RiskCoordinates{E0[j], Z0.col(j)};
  }
};

/// Orthonormal risk basis U (columns sum to zero) together with the
/// coordinate matrix Ztilde = U^T Z0. Pivots whose deflated direction
/// vanished are recorded in `skipped`, not raised.
struct OrthoBasis {
  Eigen::MatrixXd U;       // n x k
  Eigen::MatrixXd Ztilde;  // k x m
  std::vector<std::string> labels;
  std::vector<std::string> skipped;
};

/// Per-column anchored increments R0_i = (a_i - a_{i-1}) / base. E0 is the
/// column sum (the effective return over the window); Z0 removes the
/// column-mean profile, leaving pure risk.
inline RiskTable linear_moments(const PricePanel& panel) {
  if (panel.rows() < 2) throw DomainError("linear model needs at least 2 dates");
  if (!panel.anchor)
    throw DomainError("linear model requires a normalized panel (no anchor present)");
  if (panel.anchor->date != panel.dates.front())
    throw DomainError("linear model window must start at the anchor date " +
                      panel.anchor->date.to_string());
  const double base = panel.anchor->base;
  const Eigen::Index n = panel.rows() - 1;

  RiskTable rt;
  rt.labels = panel.labels;
  Eigen::MatrixXd r0(n, panel.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    r0.row(i) = (panel.values.row(i + 1) - panel.values.row(i)) / base;
  rt.E0 = r0.colwise().sum().transpose();
  rt.Z0 = r0.rowwise() - (rt.E0 / static_cast<double>(n)).transpose();
  rt.sigma0 = rt.Z0.colwise().norm().transpose();
  return rt;
}

/// Gram covariance V0 = Z0^T Z0; diagonal equals sigma0 squared.
inline Eigen::MatrixXd gram(const RiskTable& rt) { return rt.Z0.transpose() * rt.Z0; }

/// One orthogonalization pivot: the direction z[label] or, when `minus` is
/// set, the difference z[label] - z[minus].
struct Pivot {
  std::string label;
  std::optional<std::string> minus;

  std::string to_string() const { return minus ? label + "-" + *minus : label; }
};

/// The documented default recipe for a two-fund panel with a reallocated
/// column: the fund difference, the first fund, then the reallocated column.
inline std::vector<Pivot> default_pivots(const std::string& fund1, const std::string& fund2,
                                         const std::string& reallocated) {
  return {Pivot{fund1, fund2}, Pivot{fund1, std::nullopt}, Pivot{reallocated, std::nullopt}};
}

/// Classical Gram-Schmidt over the pivot directions, with one
/// re-orthogonalization pass per vector to reach orthonormality at the
/// 1e-12 level. A pivot whose direction deflates to zero (rank deficiency)
/// is skipped and recorded.
inline OrthoBasis orthogonalize(const RiskTable& rt, const std::vector<Pivot>& pivots) {
  OrthoBasis basis;
  basis.labels = rt.labels;
  const Eigen::Index n = rt.periods();
  Eigen::MatrixXd u(n, static_cast<Eigen::Index>(pivots.size()));
  Eigen::Index k = 0;

  for (const auto& piv : pivots) {
    Eigen::VectorXd v = rt.Z0.col(rt.column_of(piv.label));
    if (piv.minus) v -= rt.Z0.col(rt.column_of(*piv.minus));
    const double input_norm = v.norm();

    Eigen::VectorXd w = v;
    for (int pass = 0; pass < 2; ++pass)
      if (k > 0) w -= u.leftCols(k) * (u.leftCols(k).transpose() * w);
    if (w.norm() <= 1e-12 * input_norm || input_norm == 0.0) {
      basis.skipped.push_back(piv.to_string());
      continue;
    }
    u.col(k++) = w / w.norm();
  }

  basis.U = u.leftCols(k);
  basis.Ztilde = basis.U.transpose() * rt.Z0;
  return basis;
}

/// Decomposition bundle: everything needed to regenerate the stored columns'
/// price histories. `dates` is the full date axis (n + 1 entries, anchor
/// first).
struct DecompositionBundle {
  Eigen::MatrixXd U;       // n x k
  Eigen::VectorXd E0;      // m
  Eigen::MatrixXd Ztilde;  // k x m
  std::vector<Date> dates;
  std::vector<std::string> labels;
  std::string legend;
};

inline DecompositionBundle make_bundle(const OrthoBasis& basis, const RiskTable& rt,
                                       std::vector<Date> dates, std::string legend,
                                       const std::vector<std::string>& funds = {}) {
  DecompositionBundle b;
  b.U = basis.U;
  b.dates = std::move(dates);
  b.legend = std::move(legend);
  const std::vector<std::string>& selected = funds.empty() ? rt.labels : funds;
  b.labels = selected;
  b.E0.resize(static_cast<Eigen::Index>(selected.size()));
  b.Ztilde.resize(basis.Ztilde.rows(), static_cast<Eigen::Index>(selected.size()));
  for (size_t j = 0; j < selected.size(); ++j) {
    const Eigen::Index src = rt.column_of(selected[j]);
    b.E0[static_cast<Eigen::Index>(j)] = rt.E0[src];
    b.Ztilde.col(static_cast<Eigen::Index>(j)) = basis.Ztilde.col(src);
  }
  if (b.dates.size() != static_cast<size_t>(b.U.rows()) + 1)
    throw DomainError("bundle needs n + 1 dates for an n-period basis");
  return b;
}

namespace detail {

inline std::string format_sig(double x) {
  char buf[64];
  int n = std::snprintf(buf, sizeof(buf), "%.15g", x);
  return std::string(buf, buf + (n < 0 ? 0 : n));
}

inline void append_matrix_csv(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_sig(m(r, c));
    }
    out += '\n';
  }
}

}  // namespace detail

/// Sectioned CSV: #U, #E0, #Ztilde, #dates, #labels, #legend. Numbers carry
/// 15 significant digits so loaded bases stay orthonormal at the 1e-12
/// level; UTF-8, LF line endings.
inline std::string save_bundle(const DecompositionBundle& b) {
  std::string out;
  out += "#U\n";
  detail::append_matrix_csv(out, b.U);
  out += "#E0\n";
  detail::append_matrix_csv(out, b.E0.transpose());
  out += "#Ztilde\n";
  detail::append_matrix_csv(out, b.Ztilde);
  out += "#dates\n";
  for (const auto& d : b.dates) out += d.to_string() + "\n";
  out += "#labels\n";
  for (size_t i = 0; i < b.labels.size(); ++i) out += (i ? "," : "") + b.labels[i];
  out += "\n#legend\n";
  out += b.legend;
  if (!b.legend.empty() && b.legend.back() != '\n') out += '\n';
  return out;
}

inline DecompositionBundle load_bundle(std::string_view text) {
  auto lines = detail::split_lines(text);
  DecompositionBundle b;
  std::vector<std::vector<double>> u_rows, z_rows, e_rows;
  std::vector<std::string> legend_lines;
  std::string section;

  for (size_t i = 0; i < lines.size(); ++i) {
    auto line = detail::trim(lines[i]);
    if (!line.empty() && line[0] == '#') {
      section = std::string(line.substr(1));
      continue;
    }
    const std::string row = "row " + std::to_string(i + 1);
    if (section == "legend") {
      legend_lines.emplace_back(lines[i]);
    } else if (line.empty()) {
      continue;
    } else if (section == "U" || section == "E0" || section == "Ztilde") {
      std::vector<double> vals;
      for (auto f : detail::split_fields(line)) vals.push_back(detail::parse_number(f, row));
      (section == "U" ? u_rows : section == "E0" ? e_rows : z_rows).push_back(std::move(vals));
    } else if (section == "dates") {
      b.dates.push_back(Date::parse(line));
    } else if (section == "labels") {
      for (auto f : detail::split_fields(line)) b.labels.emplace_back(f);
    } else {
      throw ParseError(row + ": content outside a known bundle section");
    }
  }

  auto to_matrix = [](const std::vector<std::vector<double>>& rows, Eigen::Index cols_if_empty) {
    if (rows.empty()) return Eigen::MatrixXd(0, cols_if_empty);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) throw ParseError("ragged rows in bundle matrix");
      for (size_t c = 0; c < rows[r].size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return m;
  };

  if (b.dates.size() < 2) throw DomainError("bundle needs at least 2 dates");
  const Eigen::Index n = static_cast<Eigen::Index>(b.dates.size()) - 1;
  const Eigen::Index m = static_cast<Eigen::Index>(b.labels.size());
  b.Ztilde = to_matrix(z_rows, m);
  b.U = u_rows.empty() ? Eigen::MatrixXd(n, 0) : to_matrix(u_rows, 0);
  if (e_rows.size() != 1) throw DomainError("bundle must carry exactly one E0 row");
  b.E0 = Eigen::Map<const Eigen::VectorXd>(e_rows[0].data(),
                                           static_cast<Eigen::Index>(e_rows[0].size()));

  if (b.E0.size() != m || b.Ztilde.cols() != m || b.U.rows() != n ||
      b.U.cols() != b.Ztilde.rows())
    throw DomainError("bundle sections have inconsistent dimensions");
  for (auto& l : legend_lines) b.legend += l + "\n";
  if (!b.legend.empty()) b.legend.pop_back();
  return b;
}

/// Regenerate the stored columns' price histories from the bundle via the
/// cumulative-sum reconstruction, at the given base.
inline PricePanel reconstruct_panel(const DecompositionBundle& b, double base = 100.0) {
  PricePanel panel;
  panel.dates = b.dates;
  panel.labels = b.labels;
  const Eigen::Index n = static_cast<Eigen::Index>(b.dates.size()) - 1;
  panel.values.resize(n + 1, static_cast<Eigen::Index>(b.labels.size()));
  for (Eigen::Index j = 0; j < panel.values.cols(); ++j) {
    RiskCoordinates rc{b.E0[j], b.U.cols() > 0 ? Eigen::VectorXd(b.U * b.Ztilde.col(j))
                                               : Eigen::VectorXd(Eigen::VectorXd::Zero(n))};
    const auto values = reconstruct_values(rc, base);
    for (size_t i = 0; i < values.size(); ++i)
      panel.values(static_cast<Eigen::Index>(i), j) = values[i];
  }
  panel.anchor = Anchor{panel.dates.front(), base};
  return panel;
}

}  // namespace mvledger
