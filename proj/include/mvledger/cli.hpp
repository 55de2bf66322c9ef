/**
 * @file cli.hpp
 * @brief Command-line surface: subcommand configs and runners, table CSV
 *        formats, and the SVG figure builders.
 *
 * All subcommands are deterministic: identical inputs give byte-identical
 * output. Data goes to stdout or --out; diagnostics go to stderr; the exit
 * code is 0 iff no error. Relative input paths resolve against
 * $MVLEDGER_DATA_DIR when it is set.
 */

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mvledger/core.hpp"
#include "mvledger/market_data.hpp"
#include "mvledger/mv_linear.hpp"
#include "mvledger/mv_traditional.hpp"
#include "mvledger/portfolio.hpp"
#include "mvledger/returns.hpp"
#include "mvledger/svg.hpp"

namespace mvledger::cli {

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::optional<std::string> dividends;
  std::optional<std::string> splits;
  std::optional<std::string> anchor;
  std::optional<double> base;
  double ppy = 252.0;
  std::optional<std::string> weights;
  std::string mode = "unattended";
  std::string model = "traditional";
  int k = 5;
  std::optional<std::string> out_path;
  int precision = -1;  // -1: per-subcommand default (5 panels, 4 tables)
  std::string kind;
  std::string name;  // column label for adjust / appended column for paths
  std::optional<std::string> pivots;
  std::optional<std::string> funds;
  std::string legend;
};

namespace detail {

inline std::string resolve_input(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::path(path).is_absolute()) return path;
  if (const char* root = std::getenv("MVLEDGER_DATA_DIR"); root && *root)
    return (fs::path(root) / path).string();
  return path;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string read_input(const std::string& path) { return read_file(resolve_input(path)); }

inline void require_inputs(const RunConfig& cfg, size_t at_least) {
  if (cfg.inputs.size() < at_least)
    throw DomainError(cfg.subcommand + " needs " + std::to_string(at_least) + " input file(s)");
}

inline Date require_anchor(const RunConfig& cfg) {
  if (!cfg.anchor) throw DomainError(cfg.subcommand + " needs --anchor <date>");
  return Date::parse(*cfg.anchor);
}

inline int table_precision(const RunConfig& cfg) { return cfg.precision < 0 ? 4 : cfg.precision; }
inline int panel_precision(const RunConfig& cfg) { return cfg.precision < 0 ? 5 : cfg.precision; }

inline std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

inline Weights parse_weights_arg(const std::string& arg, bool long_only) {
  if (arg.find('=') != std::string::npos) {  // inline "FBT=0.75,XBI=0.25"
    std::string csv;
    for (auto part : mvledger::detail::split_fields(arg)) {
      auto eq = part.find('=');
      if (eq == std::string_view::npos) throw ParseError("inline weights: expected label=value");
      csv += std::string(part.substr(0, eq)) + "," + std::string(part.substr(eq + 1)) + "\n";
    }
    return parse_weights_csv(csv, long_only);
  }
  return parse_weights_csv(read_input(arg), long_only);
}

inline std::vector<Pivot> parse_pivots_arg(const std::string& arg) {
  std::vector<Pivot> pivots;
  for (auto token : mvledger::detail::split_fields(arg)) {
    auto dash = token.find('-');
    if (dash == std::string_view::npos)
      pivots.push_back(Pivot{std::string(token), std::nullopt});
    else
      pivots.push_back(Pivot{std::string(token.substr(0, dash)),
                             std::string(token.substr(dash + 1))});
  }
  if (pivots.empty()) throw DomainError("empty pivot list");
  return pivots;
}

/// Panels arrive either as panel CSV or as a Yahoo quote file; a Yahoo file
/// contributes its adjusted-close column as a single series.
inline std::vector<PriceSeries> load_series(const std::string& path, const RunConfig& cfg) {
  const std::string text = read_input(path);
  auto lines = mvledger::detail::split_lines(text);
  if (lines.empty()) throw ParseError("'" + path + "': empty file");
  auto header = mvledger::detail::split_fields(lines[0]);
  bool yahoo = false;
  for (const auto& h : header)
    if (mvledger::detail::iequals(h, "adj close") || mvledger::detail::iequals(h, "adj_close"))
      yahoo = true;

  std::vector<PriceSeries> series;
  if (yahoo) {
    auto quotes = parse_quote_csv(text);
    PriceSeries s;
    s.label = stem_of(path);
    for (const auto& q : quotes) {
      s.dates.push_back(q.date);
      s.values.push_back(q.adj_close.value_or(q.close));
    }
    series.push_back(std::move(s));
  } else {
    auto panel = read_panel_csv(text);
    for (const auto& label : panel.labels) series.push_back(panel.series(label));
  }
  if (cfg.anchor) {
    const Date anchor = Date::parse(*cfg.anchor);
    for (auto& s : series) s = normalize(s, anchor, cfg.base.value_or(100.0));
  }
  return series;
}

inline std::string write_moment_table_csv(const std::vector<std::string>& labels,
                                          const Eigen::VectorXd& e, const Eigen::VectorXd& sigma,
                                          const Eigen::MatrixXd& v, const std::string& e_name,
                                          const std::string& sigma_name, const std::string& v_name,
                                          int precision) {
  std::string out;
  for (const auto& l : labels) out += "," + l;
  out += "\n" + e_name;
  for (Eigen::Index j = 0; j < e.size(); ++j) out += "," + format_fixed(e[j], precision);
  out += "\n" + sigma_name;
  for (Eigen::Index j = 0; j < sigma.size(); ++j) out += "," + format_fixed(sigma[j], precision);
  out += "\n";
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    out += v_name + ":" + labels[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < v.cols(); ++j) out += "," + format_fixed(v(i, j), precision);
    out += "\n";
  }
  return out;
}

struct MomentTableCsv {
  std::vector<std::string> labels;
  Eigen::VectorXd e;
  Eigen::VectorXd sigma;
};

inline MomentTableCsv read_moment_table_csv(std::string_view text) {
  auto lines = mvledger::detail::split_lines(text);
  if (lines.empty()) throw ParseError("row 1: missing moment table header");
  auto header = mvledger::detail::split_fields(lines[0]);
  MomentTableCsv t;
  for (size_t i = 1; i < header.size(); ++i) t.labels.emplace_back(header[i]);
  const Eigen::Index m = static_cast<Eigen::Index>(t.labels.size());
  t.e.resize(m);
  t.sigma.resize(m);
  bool have_e = false, have_sigma = false;
  for (size_t i = 1; i < lines.size(); ++i) {
    auto fields = mvledger::detail::split_fields(lines[i]);
    if (fields.empty()) continue;
    const bool is_e = mvledger::detail::iequals(fields[0], "e") ||
                      mvledger::detail::iequals(fields[0], "e0");
    const bool is_sigma = mvledger::detail::iequals(fields[0], "sigma") ||
                          mvledger::detail::iequals(fields[0], "sigma0");
    if (!is_e && !is_sigma) continue;
    if (fields.size() != t.labels.size() + 1)
      throw ParseError("row " + std::to_string(i + 1) + ": expected " +
                       std::to_string(t.labels.size() + 1) + " fields");
    for (Eigen::Index j = 0; j < m; ++j) {
      double v = mvledger::detail::parse_number(fields[static_cast<size_t>(j) + 1],
                                                "row " + std::to_string(i + 1));
      (is_e ? t.e : t.sigma)[j] = v;
    }
    (is_e ? have_e : have_sigma) = true;
  }
  if (!have_e || !have_sigma) throw DomainError("moment table is missing an E or sigma row");
  return t;
}

inline const char* palette(size_t i) {
  static constexpr const char* kColors[] = {"#1f77b4", "#2ca02c", "#8b4513", "#d62728",
                                            "#9467bd", "#ff7f0e", "#17becf", "#7f7f7f"};
  return kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
}

}  // namespace detail

/// Price history figure: one labeled polyline per panel column.
inline std::string plot_prices(const PricePanel& panel) {
  const double w = 720, h = 440;
  const double ml = 60, mr = 70, mt = 20, mb = 40;
  svg::Document doc(w, h);

  auto [lo, hi] = svg::pad_range(panel.values.minCoeff(), panel.values.maxCoeff());
  svg::LinearScale sx{0.0, static_cast<double>(panel.rows() - 1), ml, w - mr};
  svg::LinearScale sy{lo, hi, h - mb, mt};

  doc.rect(ml, mt, w - ml - mr, h - mt - mb, "black");
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    doc.line(ml - 4, sy(v), ml, sy(v), "black");
    doc.text(ml - 8, sy(v) + 4, format_fixed(v, 1), 10, "end");
  }
  doc.text(ml, h - 8, panel.dates.front().to_string(), 10, "start");
  doc.text(w - mr, h - 8, panel.dates.back().to_string(), 10, "end");

  for (Eigen::Index c = 0; c < panel.cols(); ++c) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(static_cast<size_t>(panel.rows()));
    for (Eigen::Index r = 0; r < panel.rows(); ++r)
      pts.emplace_back(sx(static_cast<double>(r)), sy(panel.values(r, c)));
    const auto& label = panel.labels[static_cast<size_t>(c)];
    doc.polyline(pts, detail::palette(static_cast<size_t>(c)), 1.5, "line-" + label);
    doc.text(w - mr + 6, sy(panel.values(panel.rows() - 1, c)) + 4, label, 11);
  }
  return doc.str();
}

/// (e, sigma) scatter of a moment table, one labeled point per column.
inline std::string plot_esig(const std::vector<std::string>& labels, const Eigen::VectorXd& e,
                             const Eigen::VectorXd& sigma) {
  const double w = 560, h = 440;
  const double ml = 70, mr = 30, mt = 20, mb = 50;
  svg::Document doc(w, h);

  auto [xlo, xhi] = svg::pad_range(e.minCoeff(), e.maxCoeff(), 0.12);
  auto [ylo, yhi] = svg::pad_range(sigma.minCoeff(), sigma.maxCoeff(), 0.12);
  svg::LinearScale sx{xlo, xhi, ml, w - mr};
  svg::LinearScale sy{ylo, yhi, h - mb, mt};

  doc.rect(ml, mt, w - ml - mr, h - mt - mb, "black");
  for (int i = 0; i <= 4; ++i) {
    const double xv = xlo + (xhi - xlo) * i / 4.0;
    const double yv = ylo + (yhi - ylo) * i / 4.0;
    doc.line(sx(xv), h - mb, sx(xv), h - mb + 4, "black");
    doc.text(sx(xv), h - mb + 16, format_fixed(xv, 4), 9, "middle");
    doc.line(ml - 4, sy(yv), ml, sy(yv), "black");
    doc.text(ml - 8, sy(yv) + 3, format_fixed(yv, 4), 9, "end");
  }
  doc.text(w / 2, h - 10, "e", 12, "middle");
  doc.text(16, h / 2, "sigma", 12, "middle");

  for (size_t j = 0; j < labels.size(); ++j) {
    const auto ej = e[static_cast<Eigen::Index>(j)];
    const auto sj = sigma[static_cast<Eigen::Index>(j)];
    doc.circle(sx(ej), sy(sj), 4, detail::palette(j), "pt-" + labels[j]);
    doc.text(sx(ej) + 6, sy(sj) - 6, labels[j], 11);
  }
  return doc.str();
}

/// Risk-plane figure: the first two orthonormal coordinates of each stored
/// column, with axes through the origin.
inline std::string plot_riskplane(const DecompositionBundle& b) {
  if (b.Ztilde.rows() < 2)
    throw DomainError("risk-plane plot needs at least 2 basis vectors");
  const double w = 560, h = 480;
  const double ml = 60, mr = 40, mt = 20, mb = 40;
  svg::Document doc(w, h);

  const Eigen::VectorXd x = b.Ztilde.row(0).transpose();
  const Eigen::VectorXd y = b.Ztilde.row(1).transpose();
  auto [xlo, xhi] = svg::pad_range(std::min(0.0, x.minCoeff()), std::max(0.0, x.maxCoeff()), 0.15);
  auto [ylo, yhi] = svg::pad_range(std::min(0.0, y.minCoeff()), std::max(0.0, y.maxCoeff()), 0.15);
  svg::LinearScale sx{xlo, xhi, ml, w - mr};
  svg::LinearScale sy{ylo, yhi, h - mb, mt};

  doc.rect(ml, mt, w - ml - mr, h - mt - mb, "black");
  doc.line(sx(0.0), mt, sx(0.0), h - mb, "black");  // y-axis (x = 0)
  doc.line(ml, sy(0.0), w - mr, sy(0.0), "black");  // x-axis (y = 0)
  doc.text(w - mr - 14, sy(0.0) - 6, "x", 12);
  doc.text(sx(0.0) + 6, mt + 14, "y", 12);

  for (size_t j = 0; j < b.labels.size(); ++j) {
    const auto xj = x[static_cast<Eigen::Index>(j)];
    const auto yj = y[static_cast<Eigen::Index>(j)];
    doc.circle(sx(xj), sy(yj), 4, detail::palette(j), "pt-" + b.labels[j]);
    doc.text(sx(xj) + 6, sy(yj) - 6, b.labels[j], 11);
  }
  return doc.str();
}

namespace detail {

inline std::string run_adjust(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  const auto quotes = parse_quote_csv(read_input(cfg.inputs[0]));
  std::vector<DistributionEvent> events;
  if (cfg.dividends) events = parse_distribution_csv(read_input(*cfg.dividends));
  std::vector<SplitEvent> splits;
  if (cfg.splits) splits = parse_split_csv(read_input(*cfg.splits));
  const Date anchor = require_anchor(cfg);
  const std::string label = cfg.name.empty() ? stem_of(cfg.inputs[0]) : cfg.name;
  auto series =
      build_adjusted_closes(quotes, events, anchor, cfg.base.value_or(100.0), label, splits);
  return write_panel_csv(align_panel({series}), panel_precision(cfg));
}

inline std::string run_normalize(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  if (!cfg.anchor) throw DomainError("normalize needs --anchor <date>");
  auto series = load_series(cfg.inputs[0], cfg);  // load_series renormalizes
  return write_panel_csv(align_panel(series), panel_precision(cfg));
}

inline std::string run_panel(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  std::vector<PriceSeries> all;
  for (const auto& path : cfg.inputs)
    for (auto& s : load_series(path, cfg)) all.push_back(std::move(s));
  return write_panel_csv(align_panel(all), panel_precision(cfg));
}

inline std::string run_paths(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  if (!cfg.weights) throw DomainError("paths needs --weights <file|inline>");
  auto panel = read_panel_csv(read_input(cfg.inputs[0]));
  const std::string name = cfg.name.empty() ? "PORT" : cfg.name;

  PriceSeries portfolio;
  if (cfg.mode == "unattended" || cfg.mode == "longshort") {
    const auto w = parse_weights_arg(*cfg.weights, cfg.mode == "unattended");
    portfolio = unattended_path(panel, w, name);
    if (portfolio.nonpositive)
      throw DomainError("long-short path is not positive everywhere");
  } else if (cfg.mode == "reallocated") {
    const auto w = parse_weights_arg(*cfg.weights, true);
    portfolio = reallocated_path(panel, w, cfg.base, name);
  } else {
    throw DomainError("unknown mode '" + cfg.mode + "' (unattended|reallocated|longshort)");
  }

  PricePanel out = panel;
  out.labels.push_back(name);
  for (const auto& l : panel.labels)
    if (l == name) throw DomainError("panel already has a column named '" + name + "'");
  out.values.conservativeResize(Eigen::NoChange, panel.cols() + 1);
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    out.values(r, out.cols() - 1) = portfolio.values[static_cast<size_t>(r)];
  return write_panel_csv(out, panel_precision(cfg));
}

inline std::string run_moments(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  auto panel = read_panel_csv(read_input(cfg.inputs[0]));
  const int prec = table_precision(cfg);
  if (cfg.model == "traditional") {
    const auto mt = estimate_moments(panel, cfg.ppy);
    return write_moment_table_csv(mt.labels, mt.E, mt.sigma, mt.V, "E", "sigma", "V", prec);
  }
  if (cfg.model == "linear") {
    const auto rt = linear_moments(panel);
    return write_moment_table_csv(rt.labels, rt.E0, rt.sigma0, gram(rt), "E0", "sigma0", "V0",
                                  prec);
  }
  throw DomainError("unknown model '" + cfg.model + "' (traditional|linear)");
}

inline std::string run_frontier(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  auto panel = read_panel_csv(read_input(cfg.inputs[0]));
  const auto mt = estimate_moments(panel, cfg.ppy);
  const auto fr = efficient_frontier(mt, cfg.k);
  const int prec = table_precision(cfg);

  std::string out = "target";
  for (const auto& l : fr.labels) out += "," + l;
  out += ",e,sigma\n";
  for (Eigen::Index i = 0; i < fr.targets.size(); ++i) {
    out += format_fixed(fr.targets[i], prec);
    for (Eigen::Index j = 0; j < fr.weights.cols(); ++j)
      out += "," + format_fixed(fr.weights(i, j), prec);
    out += "," + format_fixed(fr.e[i], prec) + "," + format_fixed(fr.sigma[i], prec) + "\n";
  }
  return out;
}

inline std::string run_decompose(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  auto panel = read_panel_csv(read_input(cfg.inputs[0]));
  const auto rt = linear_moments(panel);

  std::vector<Pivot> pivots;
  if (cfg.pivots) {
    pivots = parse_pivots_arg(*cfg.pivots);
  } else if (rt.size() >= 3) {
    pivots = default_pivots(rt.labels[0], rt.labels[1], rt.labels.back());
  } else if (rt.size() == 2) {
    pivots = {Pivot{rt.labels[0], rt.labels[1]}, Pivot{rt.labels[0], std::nullopt}};
  } else {
    pivots = {Pivot{rt.labels[0], std::nullopt}};
  }
  const auto basis = orthogonalize(rt, pivots);

  std::vector<std::string> funds;
  if (cfg.funds)
    for (auto f : mvledger::detail::split_fields(*cfg.funds)) funds.emplace_back(f);

  std::string legend = cfg.legend;
  if (legend.empty()) {
    const size_t m = funds.empty() ? rt.labels.size() : funds.size();
    legend = "U: " + std::to_string(basis.U.rows()) + " x " + std::to_string(basis.U.cols()) +
             " orthonormal matrix of risk vectors (columns sum to 0)\n" +
             "E0: 1 x " + std::to_string(m) + " matrix of total window returns\n" +
             "Ztilde: " + std::to_string(basis.Ztilde.rows()) + " x " + std::to_string(m) +
             " matrix of risk vector coordinates\n" +
             "dates: " + std::to_string(panel.dates.size()) + " market days\n" +
             "labels: " + std::to_string(m) + " fund symbols";
  }
  return save_bundle(make_bundle(basis, rt, panel.dates, legend, funds));
}

inline std::string run_reconstruct(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  const auto bundle = load_bundle(read_input(cfg.inputs[0]));
  const auto panel = reconstruct_panel(bundle, cfg.base.value_or(100.0));
  return write_panel_csv(panel, panel_precision(cfg));
}

inline std::string run_identity_check(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  auto panel = read_panel_csv(read_input(cfg.inputs[0]));
  const int prec = table_precision(cfg);
  std::string out = "label,e_r,e_d,e0,e1,product_r_d,product_0_1\n";
  for (const auto& label : panel.labels) {
    const auto s = panel.series(label);
    const auto rep = interest_identity_report(std::span<const double>(s.values), cfg.ppy);
    out += label + "," + format_fixed(rep.e_r, prec) + "," + format_fixed(rep.e_d, prec) + "," +
           format_fixed(rep.e0, prec) + "," + format_fixed(rep.e1, prec) + "," +
           format_fixed(rep.product_r_d, prec) + "," + format_fixed(rep.product_0_1, prec) + "\n";
  }
  return out;
}

inline std::string run_plot(const RunConfig& cfg) {
  require_inputs(cfg, 1);
  if (cfg.kind == "prices") return plot_prices(read_panel_csv(read_input(cfg.inputs[0])));
  if (cfg.kind == "esig") {
    const auto t = read_moment_table_csv(read_input(cfg.inputs[0]));
    return plot_esig(t.labels, t.e, t.sigma);
  }
  if (cfg.kind == "riskplane") return plot_riskplane(load_bundle(read_input(cfg.inputs[0])));
  throw DomainError("unknown plot kind '" + cfg.kind + "' (prices|esig|riskplane)");
}

}  // namespace detail

/// Execute one subcommand. Data goes to `out` or cfg.out_path; diagnostics to
/// `err`. Returns the process exit code.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::string data;
    if (cfg.subcommand == "adjust") data = detail::run_adjust(cfg);
    else if (cfg.subcommand == "normalize") data = detail::run_normalize(cfg);
    else if (cfg.subcommand == "panel") data = detail::run_panel(cfg);
    else if (cfg.subcommand == "paths") data = detail::run_paths(cfg);
    else if (cfg.subcommand == "moments") data = detail::run_moments(cfg);
    else if (cfg.subcommand == "frontier") data = detail::run_frontier(cfg);
    else if (cfg.subcommand == "decompose") data = detail::run_decompose(cfg);
    else if (cfg.subcommand == "reconstruct") data = detail::run_reconstruct(cfg);
    else if (cfg.subcommand == "identity-check") data = detail::run_identity_check(cfg);
    else if (cfg.subcommand == "plot") data = detail::run_plot(cfg);
    else throw DomainError("unknown subcommand '" + cfg.subcommand + "'");

    if (cfg.out_path) {
      std::ofstream f(*cfg.out_path, std::ios::binary);
      if (!f) throw DomainError("cannot open output file '" + *cfg.out_path + "'");
      f << data;
    } else {
      out << data;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "mvledger: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mvledger::cli
