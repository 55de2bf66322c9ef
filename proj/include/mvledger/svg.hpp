/**
 * @file svg.hpp
 * @brief Minimal deterministic SVG document builder. Fixed viewBox, two-decimal
 *        coordinates, no timestamps; identical inputs give byte-identical
 *        output.
 */

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mvledger/core.hpp"

namespace mvledger::svg {

inline std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double x) { return format_fixed(x, 2); }

class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {}

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0) {
    body_ += "  <line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
             "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(stroke_width) + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                double stroke_width, const std::string& id) {
    body_ += "  <polyline id=\"" + escape(id) + "\" fill=\"none\" stroke=\"" + stroke +
             "\" stroke-width=\"" + num(stroke_width) + "\" points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ += ' ';
      body_ += num(pts[i].first) + "," + num(pts[i].second);
    }
    body_ += "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill, const std::string& id) {
    body_ += "  <circle id=\"" + escape(id) + "\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) +
             "\" r=\"" + num(r) + "\" fill=\"" + fill + "\" stroke=\"black\"/>\n";
  }

  void text(double x, double y, std::string_view content, int font_size = 11,
            const std::string& anchor = "start") {
    body_ += "  <text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\"" +
             " font-size=\"" + std::to_string(font_size) + "\" text-anchor=\"" + anchor + "\">" +
             escape(content) + "</text>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& stroke) {
    body_ += "  <rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"none\" stroke=\"" + stroke + "\"/>\n";
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(width_) + " " +
           num(height_) + "\" width=\"" + num(width_) + "\" height=\"" + num(height_) + "\">\n" +
           body_ + "</svg>\n";
  }

 private:
  double width_;
  double height_;
  std::string body_;
};

/// Affine map from a data interval onto a pixel interval.
struct LinearScale {
  double d0 = 0.0, d1 = 1.0;  // data range
  double p0 = 0.0, p1 = 1.0;  // pixel range

  double operator()(double x) const { return p0 + (x - d0) / (d1 - d0) * (p1 - p0); }
};

/// Widen a degenerate data range so scales stay invertible.
inline std::pair<double, double> pad_range(double lo, double hi, double frac = 0.05) {
  if (hi <= lo) {
    const double eps = lo == 0.0 ? 1.0 : std::abs(lo) * 0.5;
    return {lo - eps, lo + eps};
  }
  const double pad = (hi - lo) * frac;
  return {lo - pad, hi + pad};
}

}  // namespace mvledger::svg
