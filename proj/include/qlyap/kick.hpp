#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "qlyap/errors.hpp"
#include "qlyap/lattice.hpp"

namespace qlyap {

// One term c e^{i m x} of a kick profile's Fourier expansion. Profiles are
// real functions, so specs are stored two-sided (each m > 0 entry paired with
// its conjugate at -m).
struct AxisHarmonic {
  int m = 0;
  cplx c{0.0, 0.0};
};

struct CoupledHarmonic {
  int m1 = 0;
  int m2 = 0;
  cplx c{0.0, 0.0};
};

// Kick profile g and strength alpha; the kick operator is exp(i alpha g(x)).
// Separable profiles g(x) = g1(x1) + g2(x2) keep the fast per-axis path;
// `coupled` terms force a dense build.
struct KickSpec {
  double alpha = 0.0;
  std::vector<AxisHarmonic> axis1;
  std::vector<AxisHarmonic> axis2;
  std::vector<CoupledHarmonic> coupled;

  bool separable() const { return coupled.empty(); }
  bool empty() const {
    return axis1.empty() && axis2.empty() && coupled.empty();
  }
};

// Completes a one-sided list (m >= 0) to the two-sided Hermitian-symmetric
// form required for a real profile.
inline std::vector<AxisHarmonic> hermitian_complete(
    const std::vector<AxisHarmonic>& one_sided) {
  std::vector<AxisHarmonic> out;
  for (const auto& h : one_sided) {
    require(h.m >= 0, "kick harmonics are specified for m >= 0");
    if (h.m == 0) {
      require(std::abs(h.c.imag()) == 0.0,
              "the m = 0 kick harmonic must be real");
      out.push_back(h);
    } else {
      out.push_back(h);
      out.push_back({-h.m, std::conj(h.c)});
    }
  }
  return out;
}

inline double eval_profile(const std::vector<AxisHarmonic>& g, double x) {
  cplx s = 0.0;
  for (const auto& h : g) s += h.c * std::polar(1.0, h.m * x);
  return s.real();
}

// Fourier coefficients of exp(i alpha g(x)) for m = -mmax..mmax, by periodic
// trapezoid quadrature (spectrally accurate for trigonometric g).
inline std::vector<cplx> phase_fourier_coeffs(
    double alpha, const std::vector<AxisHarmonic>& g, int mmax,
    int nquad = 4096) {
  require(nquad > 2 * mmax + 1, "quadrature grid too small");
  std::vector<cplx> out(2 * mmax + 1, cplx(0.0, 0.0));
  for (int j = 0; j < nquad; ++j) {
    const double x = -kPi + 2.0 * kPi * j / nquad;
    const cplx f = std::polar(1.0, alpha * eval_profile(g, x));
    for (int m = -mmax; m <= mmax; ++m)
      out[m + mmax] += f * std::polar(1.0, -m * x);
  }
  for (auto& c : out) c /= static_cast<double>(nquad);
  return out;
}

// Windowed Hermitian generator: the n x n Toeplitz section G(a, b) = ghat_{a-b}.
inline Mat axis_generator(const Lattice& lat,
                          const std::vector<AxisHarmonic>& g) {
  const int n = lat.axis_dim();
  Mat gen = Mat::Zero(n, n);
  for (const auto& h : g)
    for (int a = 0; a < n; ++a) {
      const int b = a - h.m;
      if (b >= 0 && b < n) gen(a, b) += h.c;
    }
  return gen;
}

// exp(i alpha G) of a Hermitian G, via eigendecomposition. Unitary to machine
// precision by construction, unlike the Toeplitz section of exp(i alpha g)
// whose window edges break unitarity.
inline Mat unitary_from_generator(const Mat& gen, double alpha) {
  require_numerics((gen - gen.adjoint()).cwiseAbs().maxCoeff() < 1e-12,
                   "kick generator is not Hermitian (profile must be real)");
  Eigen::SelfAdjointEigenSolver<Mat> es(gen);
  require_numerics(es.info() == Eigen::Success,
                   "eigendecomposition of kick generator failed");
  Vec phases(gen.rows());
  for (Eigen::Index i = 0; i < gen.rows(); ++i)
    phases(i) = std::polar(1.0, alpha * es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Largest dense dimension accepted for non-separable profiles.
inline constexpr int kDenseKickCap = 1600;

class KickOperator {
 public:
  KickOperator(const Lattice& lat, const KickSpec& spec) : lat_(lat) {
    require(!spec.empty(), "position kick requires a non-empty profile");
    if (spec.separable()) {
      if (!spec.axis1.empty())
        u1_ = unitary_from_generator(axis_generator(lat, spec.axis1),
                                     spec.alpha);
      if (!spec.axis2.empty())
        u2_ = unitary_from_generator(axis_generator(lat, spec.axis2),
                                     spec.alpha);
    } else {
      require(lat.dim() <= kDenseKickCap,
              "non-separable kick profile needs lattice dim <= 1600 "
              "(cutoff <= 19)");
      Mat gen = Mat::Zero(lat.dim(), lat.dim());
      const Mat g1 = axis_generator(lat, spec.axis1);
      const Mat g2 = axis_generator(lat, spec.axis2);
      for (int a = 0; a < lat.dim(); ++a) {
        const Mode ma = lat.mode_at(a);
        for (int b = 0; b < lat.dim(); ++b) {
          const Mode mb = lat.mode_at(b);
          cplx v = 0.0;
          if (ma.k2 == mb.k2) v += g1(ma.k1 + lat.cutoff(), mb.k1 + lat.cutoff());
          if (ma.k1 == mb.k1) v += g2(ma.k2 + lat.cutoff(), mb.k2 + lat.cutoff());
          for (const auto& h : spec.coupled)
            if (ma.k1 - mb.k1 == h.m1 && ma.k2 - mb.k2 == h.m2) v += h.c;
          gen(a, b) = v;
        }
      }
      dense_ = unitary_from_generator(gen, spec.alpha);
    }
  }

  // In-place batch application to (d x m) state columns.
  void apply(Mat& a) const {
    if (dense_.size() > 0) {
      a = dense_ * a;
      return;
    }
    const int n = lat_.axis_dim();
    const Eigen::Index m = a.cols();
    Eigen::Map<Mat> b(a.data(), n, n * m);
    if (u1_.size() > 0) {
      const Mat u1t = u1_.transpose();
      Mat tmp(n, n);
      for (Eigen::Index j = 0; j < m; ++j) {
        tmp.noalias() = b.middleCols(j * n, n) * u1t;
        b.middleCols(j * n, n) = tmp;
      }
    }
    if (u2_.size() > 0) b = (u2_ * b).eval();
  }

 private:
  Lattice lat_;
  Mat u1_, u2_, dense_;
};

}  // namespace qlyap
