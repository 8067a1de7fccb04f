#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "qlyap/errors.hpp"
#include "qlyap/lattice.hpp"

namespace qlyap {

// Singular perturbation centered at phase-space point (q0, p0):
//
//   rho0 = sum_{|k|_inf <= k_window} w_k |p0 - k><p0 + k|,
//   w_k  = (2 i k.v1 + v2 . d/dbeta) e^{2 i k.q0}.
//
// The v1 part is analytic in the dyad weights; the v2 part is a derivative
// with respect to the Bloch sector, realized by symmetric differences with
// step fd_step. The k <-> -k pairing makes rho0 Hermitian, so traces of
// Hermitian observables against it are real.
struct Rho0Spec {
  std::array<int, 2> p0{0, 0};
  Eigen::Vector2d q0{0.0, 0.0};
  Eigen::Vector2d v1{0.0, 0.0};
  Eigen::Vector2d v2{0.0, 0.0};
  int k_window = 0;
  double fd_step = 1e-4;

  bool uses_v1() const { return v1(0) != 0.0 || v1(1) != 0.0; }
  bool uses_v2() const { return v2(0) != 0.0 || v2(1) != 0.0; }
};

struct DyadTerm {
  int bra = 0;               // pool column of |p0 + k>
  int ket = 0;               // pool column of |p0 - k>
  cplx phase_weight{0, 0};   // e^{2 i k.q0}
  cplx v1_weight{0, 0};      // 2 i (k.v1) e^{2 i k.q0}
};

struct DyadSet {
  std::vector<Mode> modes;      // unique pool modes, insertion-ordered
  std::vector<DyadTerm> terms;  // one per surviving k
};

inline DyadSet build_dyads(const Lattice& lat, const Rho0Spec& s) {
  require(s.k_window >= 0, "k_window must be non-negative");
  require(s.uses_v1() || s.uses_v2(), "rho0 needs v1 or v2 non-zero");
  DyadSet out;
  std::map<std::pair<int, int>, int> seen;
  auto pool_column = [&](Mode m) {
    auto [it, inserted] = seen.try_emplace({m.k1, m.k2},
                                           static_cast<int>(out.modes.size()));
    if (inserted) out.modes.push_back(m);
    return it->second;
  };
  for (int k1 = -s.k_window; k1 <= s.k_window; ++k1)
    for (int k2 = -s.k_window; k2 <= s.k_window; ++k2) {
      const Mode bra{s.p0[0] + k1, s.p0[1] + k2};
      const Mode ket{s.p0[0] - k1, s.p0[1] - k2};
      // Drop the whole dyad if either member is outside, to keep the
      // Hermitian k <-> -k pairing intact.
      if (!lat.inside(bra) || !lat.inside(ket)) continue;
      DyadTerm t;
      t.bra = pool_column(bra);
      t.ket = pool_column(ket);
      const double arg = 2.0 * (k1 * s.q0(0) + k2 * s.q0(1));
      t.phase_weight = std::polar(1.0, arg);
      t.v1_weight =
          cplx(0.0, 2.0 * (k1 * s.v1(0) + k2 * s.v1(1))) * t.phase_weight;
      out.terms.push_back(t);
    }
  require(!out.terms.empty(),
          "rho0 has no dyads inside the lattice (k_window or p0 too large)");
  return out;
}

}  // namespace qlyap
