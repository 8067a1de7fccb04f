#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdlib>

#include "qlyap/errors.hpp"

namespace qlyap {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

struct Mode {
  int k1 = 0;
  int k2 = 0;
};

inline bool operator==(Mode a, Mode b) { return a.k1 == b.k1 && a.k2 == b.k2; }

// Truncated plane-wave basis on the 2-torus: modes |k> = e^{i k.x} / (2 pi)
// with |k_i| <= K, flattened as (k1 + K) * (2K + 1) + (k2 + K).
class Lattice {
 public:
  explicit Lattice(int cutoff) : K_(cutoff), n_(2 * cutoff + 1), d_(n_ * n_) {
    require(cutoff >= 1 && cutoff <= 128, "lattice cutoff must be in [1, 128]");
  }

  int cutoff() const { return K_; }
  int axis_dim() const { return n_; }
  int dim() const { return d_; }

  bool inside(int k1, int k2) const {
    return std::abs(k1) <= K_ && std::abs(k2) <= K_;
  }
  bool inside(Mode m) const { return inside(m.k1, m.k2); }

  int index(int k1, int k2) const { return (k1 + K_) * n_ + (k2 + K_); }
  int index(Mode m) const { return index(m.k1, m.k2); }

  Mode mode_at(int index) const {
    return Mode{index / n_ - K_, index % n_ - K_};
  }

  // Fourier coefficient of the sawtooth angle function on (-pi, pi):
  // c_m = i (-1)^m / m, c_0 = 0.
  static cplx sawtooth_coeff(int m) {
    if (m == 0) return {0.0, 0.0};
    return {0.0, (m % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(m)};
  }

  // One-axis section of the position observable, T(a, b) = c_{a-b}. Hermitian.
  Mat position_section() const {
    Mat t(n_, n_);
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) t(a, b) = sawtooth_coeff(a - b);
    return t;
  }

  // Physical momenta beta + k along one axis, k = -K..K.
  Eigen::VectorXd axis_momenta(double beta) const {
    Eigen::VectorXd p(n_);
    for (int i = 0; i < n_; ++i) p(i) = beta + (i - K_);
    return p;
  }

 private:
  int K_;
  int n_;
  int d_;
};

}  // namespace qlyap
