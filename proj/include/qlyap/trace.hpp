#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>

#include "qlyap/errors.hpp"
#include "qlyap/floquet.hpp"
#include "qlyap/observables.hpp"
#include "qlyap/rho0.hpp"

namespace qlyap {

// Evolves the dyad modes of rho0 and evaluates Tr[rho(t) O] for the four
// windowed observables. One pool carries the analytic (v1) channel at the
// base sector; each active v2 axis adds a symmetric pair of pools at
// beta0 +/- fd_step * e_axis. Bra and ket modes coincide, so each pool is
// evolved once per step and reused for all dyads.
class TraceEvaluator {
 public:
  TraceEvaluator(const Lattice& lat, const ModelSpec& model,
                 const Rho0Spec& rho, const Eigen::Vector2d& beta0 = {0.0, 0.0})
      : rho_(rho), obs_(lat), dyads_(build_dyads(lat, rho)) {
    if (rho.uses_v1()) center_.emplace(lat, model, beta0, dyads_.modes);
    for (int ax = 0; ax < 2; ++ax) {
      if (rho.v2(ax) == 0.0) continue;
      require(rho.fd_step > 0.0, "fd_step must be positive when v2 is used");
      Eigen::Vector2d bp = beta0, bm = beta0;
      bp(ax) += rho.fd_step;
      bm(ax) -= rho.fd_step;
      fd_[ax].emplace(FdPair{Pool(lat, model, bp, dyads_.modes),
                             Pool(lat, model, bm, dyads_.modes)});
    }
  }

  void step() {
    if (center_) center_->step();
    for (auto& pair : fd_)
      if (pair) {
        pair->plus.step();
        pair->minus.step();
      }
    ++steps_;
  }

  int steps_done() const { return steps_; }

  double leakage() const {
    double worst = 0.0;
    if (center_) worst = std::max(worst, center_->max_lost());
    for (const auto& pair : fd_)
      if (pair)
        worst = std::max({worst, pair->plus.max_lost(), pair->minus.max_lost()});
    return worst;
  }

  // Raw trace 4-vector (x1, x2, p1, p2) at the current step.
  std::array<cplx, 4> traces() const {
    std::array<cplx, 4> acc{};
    if (center_) {
      const auto q = quadforms(*center_, true);
      for (int o = 0; o < 4; ++o) acc[o] += q[o];
    }
    for (int ax = 0; ax < 2; ++ax) {
      if (!fd_[ax]) continue;
      const auto qp = quadforms(fd_[ax]->plus, false);
      const auto qm = quadforms(fd_[ax]->minus, false);
      const double scale = rho_.v2(ax) / (2.0 * rho_.fd_step);
      for (int o = 0; o < 4; ++o) acc[o] += scale * (qp[o] - qm[o]);
    }
    for (auto& v : acc) v *= -2.0;
    return acc;
  }

  // Pools in a fixed order: center (if any), then +/- pairs per active axis.
  template <typename F>
  void visit_pools(F&& f) const {
    int idx = 0;
    if (center_) f(idx++, *center_);
    for (const auto& pair : fd_)
      if (pair) {
        f(idx++, pair->plus);
        f(idx++, pair->minus);
      }
  }

  int pool_count() const {
    int n = center_ ? 1 : 0;
    for (const auto& pair : fd_)
      if (pair) n += 2;
    return n;
  }

  // Generic trace where the caller supplies O * states per pool (indices
  // match visit_pools). Lets callers reuse expensive operator factorizations
  // across evaluations instead of rebuilding O for every pool.
  cplx trace_apply(
      const std::function<Mat(int, const Pool&)>& applied) const {
    int idx = 0;
    cplx acc = 0.0;
    if (center_)
      acc += dyad_contraction(center_->states(), applied(idx++, *center_),
                              true);
    for (int ax = 0; ax < 2; ++ax) {
      if (!fd_[ax]) continue;
      const Pool& plus = fd_[ax]->plus;
      const Pool& minus = fd_[ax]->minus;
      const cplx qp = dyad_contraction(plus.states(), applied(idx++, plus),
                                       false);
      const cplx qm = dyad_contraction(minus.states(), applied(idx++, minus),
                                       false);
      acc += rho_.v2(ax) / (2.0 * rho_.fd_step) * (qp - qm);
    }
    return -2.0 * acc;
  }

  // Tr[rho(t) O] for a caller-supplied operator, built at each pool's own
  // sector (the cat map moves sectors; observables must follow).
  cplx trace_of(const std::function<Mat(const Eigen::Vector2d&)>& build) const {
    return trace_apply([&](int, const Pool& p) -> Mat {
      return build(p.beta()) * p.states();
    });
  }

  const DyadSet& dyads() const { return dyads_; }

 private:
  struct FdPair {
    Pool plus;
    Pool minus;
  };

  cplx dyad_contraction(const Mat& a, const Mat& oa, bool v1_weights) const {
    cplx s = 0.0;
    for (const auto& t : dyads_.terms) {
      const cplx w = v1_weights ? t.v1_weight : t.phase_weight;
      if (w == cplx(0.0, 0.0)) continue;
      s += w * a.col(t.bra).dot(oa.col(t.ket));
    }
    return s;
  }

  std::array<cplx, 4> quadforms(const Pool& pool, bool v1_weights) const {
    std::array<cplx, 4> out{};
    Mat oa;
    for (int o = 0; o < 4; ++o) {
      obs_.apply(o, pool.beta(), pool.states(), oa);
      out[o] = dyad_contraction(pool.states(), oa, v1_weights);
    }
    return out;
  }

  Rho0Spec rho_;
  Observables obs_;
  DyadSet dyads_;
  std::optional<Pool> center_;
  std::array<std::optional<FdPair>, 2> fd_;
  int steps_ = 0;
};

}  // namespace qlyap
