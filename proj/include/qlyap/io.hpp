#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qlyap/config.hpp"
#include "qlyap/growth.hpp"
#include "qlyap/series.hpp"

namespace qlyap {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_fixed(double v, int digits = 2) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write file: " + path.string());
  out << content;
  require(out.good(), "write failed: " + path.string());
}

inline std::string series_csv(const TraceSeries& s) {
  std::string out =
      "n,x1_re,x1_im,x2_re,x2_im,p1_re,p1_im,p2_re,p2_im,delta,leakage\n";
  for (std::size_t m = 0; m < s.size(); ++m) {
    out += std::to_string(s.step[m]);
    for (int o = 0; o < 4; ++o) {
      out += "," + fmt_double(s.raw[o][m].real());
      out += "," + fmt_double(s.raw[o][m].imag());
    }
    out += "," + fmt_double(s.delta[m]);
    out += "," + fmt_double(s.leakage[m]);
    out += "\n";
  }
  return out;
}

inline json growth_json(const GrowthReport& g) {
  json out;
  out["verdict"] = g.verdict;
  out["lambda_per_kick"] = g.lambda_per_kick;
  out["lambda_per_time"] = g.lambda_per_time;
  out["log_r2"] = g.log_r2;
  out["degree"] = g.degree;
  out["loglog_r2"] = g.loglog_r2;
  out["fit_window"] = {g.window_lo, g.window_hi};
  out["points_used"] = g.points_used;
  return out;
}

// Minimal deterministic SVG plotting: fixed-precision coordinates, no
// timestamps, no external tooling.
namespace svg {

inline constexpr int kWidth = 760;
inline constexpr int kHeight = 480;
inline constexpr int kMarginLeft = 76;
inline constexpr int kMarginRight = 18;
inline constexpr int kMarginTop = 40;
inline constexpr int kMarginBottom = 56;

struct Frame {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  double px(double x) const {
    const double w = kWidth - kMarginLeft - kMarginRight;
    const double t = x_hi > x_lo ? (x - x_lo) / (x_hi - x_lo) : 0.5;
    return kMarginLeft + t * w;
  }
  double py(double y) const {
    const double h = kHeight - kMarginTop - kMarginBottom;
    const double t = y_hi > y_lo ? (y - y_lo) / (y_hi - y_lo) : 0.5;
    return kMarginTop + (1.0 - t) * h;
  }
};

inline std::string header(const std::string& title) {
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kWidth) + "\" height=\"" + std::to_string(kHeight) +
         "\" viewBox=\"0 0 " + std::to_string(kWidth) + " " +
         std::to_string(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(kWidth / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" +
         title + "</text>\n";
  return out;
}

inline std::string axes(const Frame& f, const std::string& xlabel,
                        const std::string& ylabel, bool log_y) {
  std::string out;
  const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  out += "<line x1=\"" + fmt_fixed(x0) + "\" y1=\"" + fmt_fixed(y0) +
         "\" x2=\"" + fmt_fixed(x1) + "\" y2=\"" + fmt_fixed(y0) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fmt_fixed(x0) + "\" y1=\"" + fmt_fixed(y0) +
         "\" x2=\"" + fmt_fixed(x0) + "\" y2=\"" + fmt_fixed(y1) +
         "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tx = f.x_lo + (f.x_hi - f.x_lo) * i / 4.0;
    const double ty = f.y_lo + (f.y_hi - f.y_lo) * i / 4.0;
    const double px = f.px(tx), py = f.py(ty);
    out += "<line x1=\"" + fmt_fixed(px) + "\" y1=\"" + fmt_fixed(y0) +
           "\" x2=\"" + fmt_fixed(px) + "\" y2=\"" + fmt_fixed(y0 + 5) +
           "\" stroke=\"black\"/>\n";
    char lab[40];
    std::snprintf(lab, sizeof lab, "%.4g", tx);
    out += "<text x=\"" + fmt_fixed(px) + "\" y=\"" + fmt_fixed(y0 + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           lab + "</text>\n";
    out += "<line x1=\"" + fmt_fixed(x0 - 5) + "\" y1=\"" + fmt_fixed(py) +
           "\" x2=\"" + fmt_fixed(x0) + "\" y2=\"" + fmt_fixed(py) +
           "\" stroke=\"black\"/>\n";
    if (log_y)
      std::snprintf(lab, sizeof lab, "1e%+.3g", ty);
    else
      std::snprintf(lab, sizeof lab, "%.4g", ty);
    out += "<text x=\"" + fmt_fixed(x0 - 8) + "\" y=\"" + fmt_fixed(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           lab + "</text>\n";
  }
  out += "<text x=\"" + std::to_string((kMarginLeft + kWidth) / 2) + "\" y=\"" +
         std::to_string(kHeight - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" +
         xlabel + "</text>\n";
  out += "<text x=\"20\" y=\"" + std::to_string(kHeight / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 20 " +
         std::to_string(kHeight / 2) + ")\">" +
         ylabel + "</text>\n";
  return out;
}

}  // namespace svg

// Plot of y(x) as a polyline; switches to log10(y) when every y is positive
// and the dynamic range warrants it. An optional second series (fit_xs,
// fit_ys) is drawn as a dashed overlay, e.g. for a fitted growth model.
inline void write_line_svg(const std::filesystem::path& path,
                           const std::string& title, const std::string& xlabel,
                           const std::string& ylabel,
                           const std::vector<double>& xs,
                           const std::vector<double>& ys,
                           const std::vector<double>& fit_xs = {},
                           const std::vector<double>& fit_ys = {}) {
  require(xs.size() == ys.size() && !xs.empty(), "plot needs matching data");
  require(fit_xs.size() == fit_ys.size(), "overlay needs matching data");
  bool log_y = true;
  for (const double y : ys)
    if (!(y > 0.0)) log_y = false;
  double y_min = ys[0], y_max = ys[0];
  for (const double y : ys) {
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (log_y && y_max / std::max(y_min, 1e-300) < 50.0) log_y = false;

  svg::Frame f;
  f.x_lo = xs.front();
  f.x_hi = xs.back();
  if (f.x_hi <= f.x_lo) f.x_hi = f.x_lo + 1.0;
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  auto plottable = [&](double y) { return !log_y || y > 0.0; };
  f.y_lo = ty(y_min);
  f.y_hi = ty(y_max);
  for (const double y : fit_ys) {
    if (!plottable(y)) continue;
    f.y_lo = std::min(f.y_lo, ty(y));
    f.y_hi = std::max(f.y_hi, ty(y));
  }
  if (f.y_hi - f.y_lo < 1e-12) {
    f.y_lo -= 0.5;
    f.y_hi += 0.5;
  }

  std::string out = svg::header(title);
  out += svg::axes(f, xlabel, log_y ? "log10 " + ylabel : ylabel, log_y);
  out += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" "
         "points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += " ";
    out += fmt_fixed(f.px(xs[i])) + "," + fmt_fixed(f.py(ty(ys[i])));
  }
  out += "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out += "<circle cx=\"" + fmt_fixed(f.px(xs[i])) + "\" cy=\"" +
           fmt_fixed(f.py(ty(ys[i]))) + "\" r=\"2.2\" fill=\"#1f77b4\"/>\n";
  if (!fit_xs.empty()) {
    out += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.3\" "
           "stroke-dasharray=\"6 4\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < fit_xs.size(); ++i) {
      if (!plottable(fit_ys[i])) continue;
      if (!first) out += " ";
      first = false;
      out += fmt_fixed(f.px(fit_xs[i])) + "," + fmt_fixed(f.py(ty(fit_ys[i])));
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  write_text_file(path, out);
}

// Histogram bars over [0, pi] for kernel profiles.
inline void write_bars_svg(const std::filesystem::path& path,
                           const std::string& title, const std::string& xlabel,
                           const std::string& ylabel,
                           const std::vector<double>& mass) {
  require(!mass.empty(), "histogram needs at least one bin");
  svg::Frame f;
  f.x_lo = 0.0;
  f.x_hi = kPi;
  f.y_lo = 0.0;
  f.y_hi = *std::max_element(mass.begin(), mass.end());
  if (f.y_hi <= 0.0) f.y_hi = 1.0;

  std::string out = svg::header(title);
  out += svg::axes(f, xlabel, ylabel, false);
  const double width = kPi / static_cast<double>(mass.size());
  for (std::size_t b = 0; b < mass.size(); ++b) {
    const double x0 = f.px(b * width), x1 = f.px((b + 1) * width);
    const double y0 = f.py(0.0), y1 = f.py(mass[b]);
    out += "<rect x=\"" + fmt_fixed(x0 + 1) + "\" y=\"" + fmt_fixed(y1) +
           "\" width=\"" + fmt_fixed(std::max(x1 - x0 - 2, 1.0)) +
           "\" height=\"" + fmt_fixed(std::max(y0 - y1, 0.0)) +
           "\" fill=\"#1f77b4\" fill-opacity=\"0.85\"/>\n";
  }
  out += "</svg>\n";
  write_text_file(path, out);
}

}  // namespace qlyap
