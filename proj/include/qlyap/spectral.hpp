#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

#include "qlyap/errors.hpp"
#include "qlyap/floquet.hpp"
#include "qlyap/observables.hpp"
#include "qlyap/rho0.hpp"

namespace qlyap {

// Reconstruction and eigenmode diagnostics refuse above this defect.
inline constexpr double kDefectGate = 1e-6;
// Dense spectral work is limited to small lattices.
inline constexpr int kSpectralDimCap = 4300;

// One-period matrix in the mode basis at a fixed Bloch sector. Throws if the
// model moves the sector (the cat map does, except at beta = 0).
inline Mat step_matrix(const Lattice& lat, const ModelSpec& model,
                       const Eigen::Vector2d& beta) {
  require(lat.dim() <= kSpectralDimCap,
          "spectral analysis needs lattice dim <= 4300 (cutoff <= 32)");
  std::vector<Mode> all;
  all.reserve(lat.dim());
  for (int k1 = -lat.cutoff(); k1 <= lat.cutoff(); ++k1)
    for (int k2 = -lat.cutoff(); k2 <= lat.cutoff(); ++k2)
      all.push_back({k1, k2});
  Pool pool(lat, model, beta, all);
  pool.step();
  require_numerics((pool.beta() - beta).cwiseAbs().maxCoeff() < 1e-12,
                   "Bloch sector is not invariant under this model at this "
                   "beta; spectral analysis is undefined");
  return pool.states();
}

struct SchurSpectrum {
  Mat q;            // orthonormal Schur basis
  Vec eigenvalues;  // diagonal of T
  double defect = 0.0;
};

// Complex Schur form. Q is orthonormal regardless of degeneracy or
// non-normality; for a normal operator T is diagonal, so the strictly
// upper-triangular mass of T measures how far eigenmode analysis can be
// trusted. A general eigensolver fails badly here: unitary kick spectra are
// massively degenerate and the truncated cat map is nilpotent up to one mode.
inline SchurSpectrum schur_spectrum(const Mat& u) {
  Eigen::ComplexSchur<Mat> schur(u, true);
  require_numerics(schur.info() == Eigen::Success,
                   "complex Schur decomposition failed");
  SchurSpectrum out;
  out.q = schur.matrixU();
  const Mat& t = schur.matrixT();
  out.eigenvalues = t.diagonal();
  const double orth =
      (out.q.adjoint() * out.q - Mat::Identity(u.rows(), u.cols()))
          .cwiseAbs()
          .maxCoeff();
  Mat off = t;
  off.diagonal().setZero();
  const double tnorm = t.norm();
  const double tri = tnorm > 0.0 ? off.norm() / tnorm : 0.0;
  out.defect = std::max(orth, tri);
  return out;
}

inline double unitarity_deviation(const SchurSpectrum& s) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
    worst = std::max(worst, std::abs(std::abs(s.eigenvalues(i)) - 1.0));
  return worst;
}

// Trace series rebuilt from eigenmodes instead of time stepping. The finite
// difference structure of the v2 channel is mirrored exactly: each involved
// sector point gets its own Schur form and kernels, so agreement with the
// direct evolution is limited only by the Schur roundoff.
class SpectralTraceModel {
 public:
  SpectralTraceModel(const Lattice& lat, const ModelSpec& model,
                     const Rho0Spec& rho,
                     const Eigen::Vector2d& beta0 = {0.0, 0.0})
      : dim_(lat.dim()) {
    const DyadSet dy = build_dyads(lat, rho);
    if (rho.uses_v1()) add_point(lat, model, dy, beta0, 1.0, true);
    for (int ax = 0; ax < 2; ++ax) {
      if (rho.v2(ax) == 0.0) continue;
      require(rho.fd_step > 0.0, "fd_step must be positive when v2 is used");
      Eigen::Vector2d bp = beta0, bm = beta0;
      bp(ax) += rho.fd_step;
      bm(ax) -= rho.fd_step;
      const double scale = rho.v2(ax) / (2.0 * rho.fd_step);
      add_point(lat, model, dy, bp, scale, false);
      add_point(lat, model, dy, bm, -scale, false);
    }
    require(!points_.empty(), "rho0 needs v1 or v2 non-zero");
  }

  double defect() const { return defect_; }
  double unitarity_dev() const { return unitarity_; }

  // Raw trace 4-vector at step n >= 0.
  std::array<cplx, 4> traces(int n) const {
    require_numerics(defect_ < kDefectGate,
                     "operator is too far from normal for eigenmode "
                     "reconstruction (defect gate)");
    std::array<cplx, 4> acc{};
    for (const auto& pt : points_) {
      Vec u(pt.lambda.size());
      for (Eigen::Index i = 0; i < u.size(); ++i)
        u(i) = std::pow(pt.lambda(i), n);
      for (int o = 0; o < 4; ++o) {
        const cplx contrib = (u.adjoint() * pt.kernel[o] * u)(0, 0);
        acc[o] += pt.scale * contrib;
      }
    }
    for (auto& v : acc) v *= -2.0;
    return acc;
  }

 private:
  struct Point {
    double scale = 1.0;
    Vec lambda;
    std::array<Mat, 4> kernel;  // (Q^H R Q)^T .* (Q^H O Q)
  };

  void add_point(const Lattice& lat, const ModelSpec& model, const DyadSet& dy,
                 const Eigen::Vector2d& beta, double scale, bool v1_weights) {
    const Mat u = step_matrix(lat, model, beta);
    const SchurSpectrum s = schur_spectrum(u);
    defect_ = std::max(defect_, s.defect);
    unitarity_ = std::max(unitarity_, unitarity_deviation(s));

    Mat r = Mat::Zero(dim_, dim_);
    for (const auto& t : dy.terms) {
      const cplx w = v1_weights ? t.v1_weight : t.phase_weight;
      if (w == cplx(0.0, 0.0)) continue;
      r(lat.index(dy.modes[t.ket]), lat.index(dy.modes[t.bra])) += w;
    }
    const Mat rk = s.q.adjoint() * r * s.q;

    Observables obs(lat);
    Point pt;
    pt.scale = scale;
    pt.lambda = s.eigenvalues;
    Mat od(dim_, dim_), ok;
    const Mat id = Mat::Identity(dim_, dim_);
    for (int o = 0; o < 4; ++o) {
      obs.apply(o, beta, id, od);
      ok = s.q.adjoint() * od * s.q;
      pt.kernel[o] = rk.transpose().cwiseProduct(ok);
    }
    points_.push_back(std::move(pt));
  }

  int dim_;
  double defect_ = 0.0;
  double unitarity_ = 0.0;
  std::vector<Point> points_;
};

struct KernelProfile {
  std::vector<double> mass;  // normalized histogram over [0, pi]
  double defect = 0.0;
  int nonzero_bins = 0;
};

// Distribution of rho0/observable kernel weight versus circular eigenphase
// distance. Bounded dynamics concentrates mass at zero separation; this is a
// diagnostic of the Schur form and stays defined even when the defect gate
// refuses reconstruction (a fully degenerate profile is itself the signal).
inline KernelProfile kernel_profile(const Lattice& lat, const ModelSpec& model,
                                    const Rho0Spec& rho,
                                    const Eigen::Vector2d& beta, int bins) {
  require(bins >= 2 && bins <= 256, "profile bins must be in [2, 256]");
  require(rho.uses_v1(), "kernel profile needs v1-weighted dyads");
  const Mat u = step_matrix(lat, model, beta);
  const SchurSpectrum s = schur_spectrum(u);
  const DyadSet dy = build_dyads(lat, rho);

  const int d = lat.dim();
  Mat r = Mat::Zero(d, d);
  for (const auto& t : dy.terms)
    r(lat.index(dy.modes[t.ket]), lat.index(dy.modes[t.bra])) += t.v1_weight;
  const Mat rk = (s.q.adjoint() * r * s.q).transpose();

  Observables obs(lat);
  Eigen::MatrixXd mag = Eigen::MatrixXd::Zero(d, d);
  Mat od;
  const Mat id = Mat::Identity(d, d);
  for (int o = 0; o < 4; ++o) {
    obs.apply(o, beta, id, od);
    const Mat ok = s.q.adjoint() * od * s.q;
    mag += ok.cwiseAbs2().real();
  }
  mag = mag.cwiseSqrt();

  Eigen::VectorXd theta(d);
  for (int i = 0; i < d; ++i) theta(i) = std::arg(s.eigenvalues(i));

  KernelProfile out;
  out.defect = s.defect;
  out.mass.assign(bins, 0.0);
  double total = 0.0;
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      const double w = std::abs(rk(mu, nu)) * mag(mu, nu);
      if (w == 0.0) continue;
      double dth = std::abs(theta(mu) - theta(nu));
      dth = std::min(dth, 2.0 * kPi - dth);
      int b = static_cast<int>(dth / kPi * bins);
      b = std::min(b, bins - 1);
      out.mass[b] += w;
      total += w;
    }
  require_numerics(total > 0.0, "kernel profile has no weight");
  for (auto& m : out.mass) m /= total;
  for (const double m : out.mass)
    if (m > 1e-12) ++out.nonzero_bins;
  return out;
}

}  // namespace qlyap
