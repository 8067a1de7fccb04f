#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "qlyap/cat.hpp"
#include "qlyap/errors.hpp"
#include "qlyap/floquet.hpp"
#include "qlyap/lattice.hpp"

namespace {

constexpr double kTolerance = 1e-12;

}  // namespace

TEST_CASE("cat_matrix_powers_by_repeated_multiplication") {
  const qlyap::CatMat id{1, 0, 0, 1};
  CHECK(qlyap::cat_pow(0) == id);
  CHECK(qlyap::cat_pow(1) == qlyap::kCatMap);
  CHECK(qlyap::cat_pow(2) == qlyap::CatMat{2, 3, 3, 5});
  CHECK(qlyap::cat_pow(3) == qlyap::CatMat{5, 8, 8, 13});
  CHECK(qlyap::cat_mul(qlyap::kCatMap, qlyap::kCatMapInverse) == id);
  CHECK(qlyap::cat_mul(qlyap::kCatMapInverse, qlyap::kCatMap) == id);

  // Action on a mode vector: (k1, k2) -> (a k1 + b k2, c k1 + d k2).
  const qlyap::CatMat m = qlyap::kCatMap;
  const std::int64_t k1 = 8, k2 = 8;
  CHECK(m[0] * k1 + m[1] * k2 == 16);
  CHECK(m[2] * k1 + m[3] * k2 == 24);

  CHECK_THROWS_AS(qlyap::cat_pow(-1), qlyap::ConfigError);
  CHECK_THROWS_AS(qlyap::cat_pow(45), qlyap::ConfigError);
}

TEST_CASE("cat_matrix_powers_are_unimodular") {
  for (int n = 0; n <= 30; ++n) {
    const qlyap::CatMat m = qlyap::cat_pow(n);
    CHECK(m[0] * m[3] - m[1] * m[2] == 1);
    CHECK(m[1] == m[2]);
  }
}

TEST_CASE("closed_form_power_matches_integer_power") {
  for (int n = 0; n <= 30; ++n) {
    const auto closed = qlyap::cat_pow_closed(n);
    const qlyap::CatMat exact = qlyap::cat_pow(n);
    for (int i = 0; i < 4; ++i)
      CHECK(std::llround(closed[i]) == exact[i]);
  }
}

TEST_CASE("golden_ratio_and_stretching_rate") {
  const double w = qlyap::kGoldenRatio;
  CHECK(std::abs(w * w - w - 1.0) < 1e-15);
  CHECK(std::abs(qlyap::kCatRate - 0.9624236501192069) < 1e-15);
  CHECK(std::abs(qlyap::kCatRate - std::log(w * w)) < 1e-15);
}

TEST_CASE("cat_step_moves_sector_and_modes_exactly") {
  const qlyap::Lattice lat(8);
  qlyap::ModelSpec spec;
  spec.type = qlyap::ModelType::kCatMap;
  spec.cutoff = 8;

  qlyap::Pool pool(lat, spec, {0.25, 0.5}, {qlyap::Mode{2, -1}});
  pool.step();
  // M (0.25, 0.5) = (0.75, 1.25): carry (0, 1), sector (0.75, 0.25), and the
  // mode flows by (k1 + k2 + c1, k1 + 2 k2 + c2) = (1, 1).
  CHECK(pool.beta()(0) == 0.75);
  CHECK(pool.beta()(1) == 0.25);
  CHECK(pool.max_lost() == 0.0);
  const qlyap::Vec col = pool.states().col(0);
  CHECK(std::abs(std::abs(col(lat.index(1, 1))) - 1.0) < kTolerance);
  CHECK(std::abs(col.norm() - 1.0) < kTolerance);
}

TEST_CASE("cat_step_accounts_for_amplitude_leaving_the_window") {
  const qlyap::Lattice lat(2);
  qlyap::ModelSpec spec;
  spec.type = qlyap::ModelType::kCatMap;
  spec.cutoff = 2;

  qlyap::Pool pool(lat, spec, {0.0, 0.0}, {qlyap::Mode{2, 2}});
  pool.step();  // (2, 2) -> (4, 6), outside |k| <= 2
  CHECK(std::abs(pool.lost()(0) - 1.0) < kTolerance);
  CHECK(pool.states().col(0).norm() < kTolerance);
  CHECK(std::abs(pool.states().col(0).squaredNorm() + pool.lost()(0) - 1.0) <
        kTolerance);
}
