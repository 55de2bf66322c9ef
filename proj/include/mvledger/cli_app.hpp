/**
 * @file cli_app.hpp
 * @brief CLI11 front end for the mvledger tool.
 */

#pragma once

#include <CLI11.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "mvledger/cli.hpp"

namespace mvledger::cli {

/// Build the argument parser and dispatch. `args` excludes the program name.
inline int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ex-post mean-variance analysis over adjusted closing price panels", "mvledger"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string anchor, dividends, splits, weights, out_path, pivots, funds;

  auto add_common = [&](CLI::App* sub, bool wants_inputs = true) {
    if (wants_inputs) sub->add_option("inputs", cfg.inputs, "input file(s)")->required();
    sub->add_option("--out", out_path, "write output to this path instead of stdout");
    sub->add_option("--precision", cfg.precision,
                    "output decimals (default: 5 for panels, 4 for tables)");
  };

  auto* adjust = app.add_subcommand(
      "adjust", "build normalized adjusted closing prices from closes and distributions");
  add_common(adjust);
  adjust->add_option("--dividends", dividends, "distribution CSV (ex_date,amount)");
  adjust->add_option("--splits", splits, "split CSV (ex_date,ratio)");
  adjust->add_option("--anchor", anchor, "normalization date (YYYY-MM-DD)")->required();
  adjust->add_option("--base", cfg.base, "normalization base value (default 100)");
  adjust->add_option("--label", cfg.name, "column label (default: input file stem)");

  auto* normalize = app.add_subcommand("normalize", "rescale series to a base at an anchor date");
  add_common(normalize);
  normalize->add_option("--anchor", anchor, "normalization date (YYYY-MM-DD)")->required();
  normalize->add_option("--base", cfg.base, "normalization base value (default 100)");

  auto* panel = app.add_subcommand("panel", "align series files into one date-aligned panel");
  add_common(panel);
  panel->add_option("--anchor", anchor, "renormalize all inputs at this date first");
  panel->add_option("--base", cfg.base, "normalization base value (default 100)");

  auto* paths = app.add_subcommand("paths", "append a portfolio price path to a panel");
  add_common(paths);
  paths->add_option("--weights", weights, "weights file or inline 'FBT=0.75,XBI=0.25'")
      ->required();
  paths->add_option("--mode", cfg.mode, "unattended | reallocated | longshort");
  paths->add_option("--base", cfg.base, "start value for reallocated paths");
  paths->add_option("--name", cfg.name, "label of the appended column (default PORT)");

  auto* moments = app.add_subcommand("moments", "mean-variance table of a panel");
  add_common(moments);
  moments->add_option("--model", cfg.model, "traditional | linear");
  moments->add_option("--ppy", cfg.ppy, "periods per year (default 252)");

  auto* frontier = app.add_subcommand("frontier", "long-only efficient frontier portfolios");
  add_common(frontier);
  frontier->add_option("--k", cfg.k, "number of equally spaced mean levels (default 5)");
  frontier->add_option("--ppy", cfg.ppy, "periods per year (default 252)");

  auto* decompose =
      app.add_subcommand("decompose", "orthonormal risk decomposition bundle of a panel");
  add_common(decompose);
  decompose->add_option("--pivots", pivots,
                        "ordered pivot list, e.g. 'FBT-XBI,FBT,CRP' ('-' takes a difference)");
  decompose->add_option("--funds", funds, "comma-separated columns to store (default: all)");
  decompose->add_option("--legend", cfg.legend, "free-text legend stored in the bundle");

  auto* reconstruct =
      app.add_subcommand("reconstruct", "regenerate price histories from a bundle");
  add_common(reconstruct);
  reconstruct->add_option("--base", cfg.base, "base value of the rebuilt paths (default 100)");

  auto* identity =
      app.add_subcommand("identity-check", "theory-of-interest diagnostics per column");
  add_common(identity);
  identity->add_option("--ppy", cfg.ppy, "periods per year (default 252)");

  auto* plot = app.add_subcommand("plot", "render a deterministic SVG figure");
  add_common(plot);
  plot->add_option("--kind", cfg.kind, "prices | esig | riskplane")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (!anchor.empty()) cfg.anchor = anchor;
  if (!dividends.empty()) cfg.dividends = dividends;
  if (!splits.empty()) cfg.splits = splits;
  if (!weights.empty()) cfg.weights = weights;
  if (!out_path.empty()) cfg.out_path = out_path;
  if (!pivots.empty()) cfg.pivots = pivots;
  if (!funds.empty()) cfg.funds = funds;
  return run(cfg, out, err);
}

}  // namespace mvledger::cli
