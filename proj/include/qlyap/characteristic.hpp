#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "qlyap/errors.hpp"
#include "qlyap/trace.hpp"

namespace qlyap {

inline constexpr int kDisplacementDimCap = 2600;

// Hermitian generator mu . x + nu . p at sector beta, dense in the mode basis.
inline Mat displacement_generator(const Lattice& lat,
                                  const Eigen::Vector2d& mu,
                                  const Eigen::Vector2d& nu,
                                  const Eigen::Vector2d& beta) {
  require(lat.dim() <= kDisplacementDimCap,
          "displacement operators need lattice dim <= 2600 (cutoff <= 25)");
  const int d = lat.dim();
  Mat h = Mat::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    const Mode ma = lat.mode_at(a);
    for (int b = 0; b < d; ++b) {
      const Mode mb = lat.mode_at(b);
      cplx v = 0.0;
      if (ma.k2 == mb.k2 && mu(0) != 0.0)
        v += mu(0) * Lattice::sawtooth_coeff(ma.k1 - mb.k1);
      if (ma.k1 == mb.k1 && mu(1) != 0.0)
        v += mu(1) * Lattice::sawtooth_coeff(ma.k2 - mb.k2);
      if (a == b)
        v += nu(0) * (beta(0) + ma.k1) + nu(1) * (beta(1) + ma.k2);
      h(a, b) = v;
    }
  }
  return h;
}

// Weyl-style displacement D(mu, nu) = exp(i (mu . x + nu . p)).
inline Mat displacement_operator(const Lattice& lat, const Eigen::Vector2d& mu,
                                 const Eigen::Vector2d& nu,
                                 const Eigen::Vector2d& beta) {
  Eigen::SelfAdjointEigenSolver<Mat> es(displacement_generator(lat, mu, nu, beta));
  require_numerics(es.info() == Eigen::Success,
                   "displacement eigendecomposition failed");
  Vec ph(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < ph.size(); ++i)
    ph(i) = std::polar(1.0, es.eigenvalues()(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

struct CharacteristicPoint {
  Eigen::Vector2d mu{0.0, 0.0};
  Eigen::Vector2d nu{0.0, 0.0};
  cplx gradient{0.0, 0.0};   // central difference of G at step eps
  cplx direct{0.0, 0.0};     // i Tr[rho (mu . x + nu . p)]
  double rel_err = 0.0;      // at eps
  double rel_err_half = 0.0; // at eps / 2
  double ratio = 0.0;        // rel_err / rel_err_half, ~4 for an e^2 scheme
};

struct CharacteristicReport {
  std::vector<CharacteristicPoint> points;
  double max_rel_err = 0.0;
  bool converged = true;  // every point: ratio in [3, 5] or at roundoff floor
};

// Unit directions along x1, x2, p1, p2, matching the component order of
// TraceEvaluator::traces().
inline const std::array<std::pair<Eigen::Vector2d, Eigen::Vector2d>, 4>
    kCharacteristicGrid = {{{{1.0, 0.0}, {0.0, 0.0}},
                            {{0.0, 1.0}, {0.0, 0.0}},
                            {{0.0, 0.0}, {1.0, 0.0}},
                            {{0.0, 0.0}, {0.0, 1.0}}}};

// Relative errors are measured against max(|component|, kGradientScaleFloor *
// max component, 1e-12): a component whose exact value is zero (for instance
// a momentum trace killed by parity) would otherwise compare roundoff noise
// against roundoff noise.
inline constexpr double kGradientScaleFloor = 1e-6;

// Verifies that the characteristic function G(s) = Tr[rho(t) e^{i s (mu.x+nu.p)}]
// has derivative i Tr[rho(t) (mu.x+nu.p)] at s = 0, sampling G at +/-eps and
// +/-eps/2 along each axis. The samples come from dense operator exponentials
// while the derivative comes from the evolved quadratic-form pipeline, so the
// two sides are computed by independent routes.
inline CharacteristicReport characteristic_check(
    const Lattice& lat, const ModelSpec& model, const Rho0Spec& rho,
    const Eigen::Vector2d& beta0, int nsteps, double eps = 1e-3) {
  require(nsteps >= 0, "characteristic check needs nsteps >= 0");
  require(eps > 0.0, "characteristic check needs eps > 0");
  TraceEvaluator ev(lat, model, rho, beta0);
  for (int i = 0; i < nsteps; ++i) ev.step();

  const std::array<cplx, 4> direct = ev.traces();
  double gmax = 0.0;
  for (const cplx& t : direct) gmax = std::max(gmax, std::abs(t));

  CharacteristicReport rep;
  for (std::size_t g = 0; g < kCharacteristicGrid.size(); ++g) {
    const auto& [mu, nu] = kCharacteristicGrid[g];
    // One eigendecomposition per pool sector; every finite-difference sample
    // D(s mu, s nu) = V e^{i s w} V^dagger then reuses it.
    std::vector<Eigen::SelfAdjointEigenSolver<Mat>> eig(ev.pool_count());
    ev.visit_pools([&](int i, const Pool& p) {
      eig[i].compute(displacement_generator(lat, mu, nu, p.beta()));
      require_numerics(eig[i].info() == Eigen::Success,
                       "displacement eigendecomposition failed");
    });
    auto value_at = [&](double s) {
      return ev.trace_apply([&](int i, const Pool& p) -> Mat {
        const auto& es = eig[i];
        Vec ph(es.eigenvalues().size());
        for (Eigen::Index j = 0; j < ph.size(); ++j)
          ph(j) = std::polar(1.0, s * es.eigenvalues()(j));
        return es.eigenvectors() *
               (ph.asDiagonal() * (es.eigenvectors().adjoint() * p.states()));
      });
    };
    auto grad_at = [&](double e) {
      return (value_at(e) - value_at(-e)) / (2.0 * e);
    };
    CharacteristicPoint pt;
    pt.mu = mu;
    pt.nu = nu;
    pt.direct = cplx(0.0, 1.0) * direct[g];
    pt.gradient = grad_at(eps);
    const double denom =
        std::max({std::abs(pt.direct), kGradientScaleFloor * gmax, 1e-12});
    pt.rel_err = std::abs(pt.gradient - pt.direct) / denom;
    pt.rel_err_half = std::abs(grad_at(eps / 2.0) - pt.direct) / denom;
    pt.ratio = pt.rel_err_half > 0.0 ? pt.rel_err / pt.rel_err_half
                                     : std::numeric_limits<double>::infinity();
    const bool at_floor = pt.rel_err < 1e-7 && pt.rel_err_half < 1e-7;
    if (!((pt.ratio >= 3.0 && pt.ratio <= 5.0) || at_floor))
      rep.converged = false;
    rep.max_rel_err = std::max(rep.max_rel_err, pt.rel_err);
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace qlyap
