#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "qlyap/errors.hpp"

namespace qlyap {

// Hyperbolic torus automorphism acting on physical momenta, p -> M p.
// Row-major 2x2 integer matrix {a, b, c, d}.
using CatMat = std::array<std::int64_t, 4>;

inline constexpr CatMat kCatMap{1, 1, 1, 2};
inline constexpr CatMat kCatMapInverse{2, -1, -1, 1};

// Entries of M^n are Fibonacci numbers; n <= 44 keeps them inside int64.
inline constexpr int kCatPowerMax = 44;

inline CatMat cat_mul(const CatMat& x, const CatMat& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
          x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

inline CatMat cat_pow(int n) {
  require(n >= 0 && n <= kCatPowerMax,
          "cat map power must be in [0, 44] (int64 overflow)");
  CatMat out{1, 0, 0, 1};
  for (int i = 0; i < n; ++i) out = cat_mul(out, kCatMap);
  return out;
}

inline const double kGoldenRatio = (1.0 + std::sqrt(5.0)) / 2.0;

// Largest stretching exponent per application of the map: lambda = 2 ln omega.
inline const double kCatRate = 2.0 * std::log(kGoldenRatio);

// M^n from the golden-ratio eigenbasis. The 1/sqrt(5) prefactor is essential;
// entries come out as exact Fibonacci numbers (F_{2n-1}, F_{2n}; F_{2n}, F_{2n+1}).
inline std::array<double, 4> cat_pow_closed(int n) {
  const double w = kGoldenRatio;
  const double s5 = std::sqrt(5.0);
  const double wp = std::pow(w, 2.0 * n);
  const double wm = 1.0 / wp;
  return {(wm * w + wp / w) / s5, (wp - wm) / s5, (wp - wm) / s5,
          (wm / w + wp * w) / s5};
}

}  // namespace qlyap
