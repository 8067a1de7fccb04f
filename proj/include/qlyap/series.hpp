#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "qlyap/trace.hpp"

namespace qlyap {

// Components whose t = 0 magnitude falls below this floor are normalized by
// the full 4-vector norm instead of their own (vanishing) initial value.
inline constexpr double kComponentFloor = 1e-12;

struct TraceSeries {
  std::vector<int> step;                  // 0..N
  std::array<std::vector<cplx>, 4> raw;   // x1, x2, p1, p2
  std::vector<double> delta;              // norm of the normalized 4-vector
  std::vector<double> leakage;            // max dropped mass over pools
  double tau = 1.0;                       // physical time per step

  std::size_t size() const { return step.size(); }
};

inline TraceSeries run_series(const Lattice& lat, const ModelSpec& model,
                              const Rho0Spec& rho, int nsteps,
                              const Eigen::Vector2d& beta0 = {0.0, 0.0}) {
  require(nsteps >= 1, "series needs at least one step");
  TraceEvaluator ev(lat, model, rho, beta0);
  TraceSeries s;
  s.tau = model.tau();
  auto record = [&] {
    const auto t = ev.traces();
    s.step.push_back(ev.steps_done());
    for (int o = 0; o < 4; ++o) s.raw[o].push_back(t[o]);
    s.leakage.push_back(ev.leakage());
  };
  record();
  for (int i = 0; i < nsteps; ++i) {
    ev.step();
    record();
  }

  double norm0 = 0.0;
  for (int o = 0; o < 4; ++o) norm0 += std::norm(s.raw[o][0]);
  norm0 = std::sqrt(norm0);
  require_numerics(norm0 > 0.0,
                   "t = 0 trace vector vanishes; cannot normalize the series");
  std::array<cplx, 4> den;
  for (int o = 0; o < 4; ++o)
    den[o] = std::abs(s.raw[o][0]) > kComponentFloor ? s.raw[o][0]
                                                     : cplx(norm0, 0.0);
  s.delta.resize(s.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    double sum = 0.0;
    for (int o = 0; o < 4; ++o) sum += std::norm(s.raw[o][m] / den[o]);
    s.delta[m] = std::sqrt(sum);
  }
  return s;
}

}  // namespace qlyap
