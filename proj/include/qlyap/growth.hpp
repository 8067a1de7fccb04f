#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qlyap/series.hpp"

namespace qlyap {

// Delta values below this are treated as numerical zero and excluded from fits.
inline constexpr double kDeltaFloor = 1e-14;
// Verdict thresholds: growth is called exponential only with a per-kick rate
// above kRateThreshold AND a semilog fit at least as good as the log-log fit;
// otherwise polynomial when the log-log degree exceeds kDegreeThreshold.
inline constexpr double kRateThreshold = 0.1;
inline constexpr double kDegreeThreshold = 0.5;

struct FitOptions {
  int n_lo = 1;                  // first step included in fits (>= 1)
  double leakage_budget = 1e-3;  // fit window stops where leakage exceeds this
};

struct GrowthReport {
  double lambda_per_kick = 0.0;
  double lambda_per_time = 0.0;
  double log_r2 = 0.0;
  double degree = 0.0;
  double loglog_r2 = 0.0;
  double log_intercept = 0.0;
  double loglog_intercept = 0.0;
  int window_lo = 0;
  int window_hi = 0;
  int points_used = 0;
  std::string verdict = "bounded";
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - ym) * (y[i] - ym);
  }
  // A flat response carries no fit quality; define r^2 = 0 rather than 0/0.
  f.r2 = ss_tot < 1e-30 ? 0.0 : 1.0 - ss_res / ss_tot;
  return f;
}

inline GrowthReport fit_growth(const TraceSeries& s,
                               const FitOptions& opt = {}) {
  GrowthReport rep;
  const int lo = std::max(1, opt.n_lo);
  // Maximal budget-respecting prefix; leakage is nondecreasing.
  int hi = -1;
  for (std::size_t m = 0; m < s.size(); ++m) {
    if (s.leakage[m] > opt.leakage_budget) break;
    hi = s.step[m];
  }
  rep.window_lo = lo;
  rep.window_hi = hi;

  std::vector<double> xs_lin, xs_log, ys;
  for (std::size_t m = 0; m < s.size(); ++m) {
    const int n = s.step[m];
    if (n < lo || n > hi) continue;
    if (!(s.delta[m] >= kDeltaFloor)) continue;
    xs_lin.push_back(static_cast<double>(n));
    xs_log.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(s.delta[m]));
  }
  rep.points_used = static_cast<int>(ys.size());
  if (rep.points_used < 2) {
    rep.verdict = "bounded";
    return rep;
  }

  const LineFit semilog = fit_line(xs_lin, ys);
  const LineFit loglog = fit_line(xs_log, ys);
  rep.lambda_per_kick = semilog.slope;
  rep.lambda_per_time = s.tau > 0.0 ? semilog.slope / s.tau : 0.0;
  rep.log_r2 = semilog.r2;
  rep.degree = loglog.slope;
  rep.loglog_r2 = loglog.r2;
  rep.log_intercept = semilog.intercept;
  rep.loglog_intercept = loglog.intercept;

  if (rep.lambda_per_kick > kRateThreshold && rep.log_r2 >= rep.loglog_r2)
    rep.verdict = "exponential";
  else if (rep.degree > kDegreeThreshold)
    rep.verdict = "polynomial";
  else
    rep.verdict = "bounded";
  return rep;
}

}  // namespace qlyap
