#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "qlyap/characteristic.hpp"
#include "qlyap/kick.hpp"
#include "qlyap/lattice.hpp"
#include "qlyap/trace.hpp"

namespace {

constexpr double kTolerance = 1e-12;

qlyap::Rho0Spec gradient_probe_rho() {
  qlyap::Rho0Spec rho;
  rho.q0 = {0.8, 0.45};
  rho.v1 = {0.3, -0.2};
  rho.k_window = 4;
  return rho;
}

qlyap::ModelSpec free_model() {
  qlyap::ModelSpec spec;
  spec.cutoff = 8;
  spec.resonant = false;
  spec.tau_value = 1.0;
  return spec;
}

qlyap::ModelSpec kick_model() {
  qlyap::ModelSpec spec;
  spec.type = qlyap::ModelType::kPositionKick;
  spec.cutoff = 8;
  spec.kick.alpha = 0.5;
  spec.kick.axis1 = qlyap::hermitian_complete({{1, {0.5, 0.0}}});
  spec.kick.axis2 = spec.kick.axis1;
  return spec;
}

qlyap::ModelSpec cat_model() {
  qlyap::ModelSpec spec;
  spec.type = qlyap::ModelType::kCatMap;
  spec.cutoff = 8;
  return spec;
}

}  // namespace

TEST_CASE("characteristic_gradient_matches_traces_for_all_models") {
  const qlyap::Lattice lat(8);
  const auto rho = gradient_probe_rho();

  const auto free_rep =
      qlyap::characteristic_check(lat, free_model(), rho, {0.3, 0.7}, 1);
  CHECK(free_rep.max_rel_err < 1e-5);
  CHECK(free_rep.converged);

  const auto kick_rep =
      qlyap::characteristic_check(lat, kick_model(), rho, {0.0, 0.0}, 1);
  CHECK(kick_rep.max_rel_err < 1e-5);
  CHECK(kick_rep.converged);

  const auto cat_rep =
      qlyap::characteristic_check(lat, cat_model(), rho, {0.0, 0.0}, 1);
  CHECK(cat_rep.max_rel_err < 1e-5);
  CHECK(cat_rep.converged);
}

TEST_CASE("characteristic_gradient_free_initial_state_is_tight") {
  const qlyap::Lattice lat(8);
  qlyap::Rho0Spec rho;
  rho.q0 = {0.9, 0.9};
  rho.v1 = {0.7, -0.4};
  rho.k_window = 4;
  const auto rep =
      qlyap::characteristic_check(lat, free_model(), rho, {0.3, 0.7}, 0);
  CHECK(rep.max_rel_err < 1e-6);
  CHECK(rep.converged);
}

TEST_CASE("stencil_error_shrinks_at_second_order") {
  const qlyap::Lattice lat(8);
  const auto rep = qlyap::characteristic_check(lat, free_model(),
                                               gradient_probe_rho(),
                                               {0.3, 0.7}, 1);
  REQUIRE(rep.points.size() == 4);
  int measured = 0;
  for (const auto& pt : rep.points) {
    if (pt.rel_err < 1e-7) continue;  // roundoff-floor direction
    ++measured;
    CHECK(pt.ratio > 3.5);
    CHECK(pt.ratio < 4.5);
  }
  CHECK(measured >= 2);
}

TEST_CASE("displacement_at_the_origin_is_the_identity") {
  const qlyap::Lattice lat(4);
  const qlyap::Mat d =
      qlyap::displacement_operator(lat, {0.0, 0.0}, {0.0, 0.0}, {0.3, 0.7});
  const qlyap::Mat dev = d - qlyap::Mat::Identity(lat.dim(), lat.dim());
  CHECK(dev.cwiseAbs().maxCoeff() < kTolerance);
}

TEST_CASE("displacement_operators_are_unitary") {
  const qlyap::Lattice lat(4);
  const Eigen::Vector2d mu(0.4, -0.3), nu(0.25, 0.35), beta(0.3, 0.7);
  const qlyap::Mat gen = qlyap::displacement_generator(lat, mu, nu, beta);
  CHECK((gen - gen.adjoint()).cwiseAbs().maxCoeff() < kTolerance);
  const qlyap::Mat d = qlyap::displacement_operator(lat, mu, nu, beta);
  const qlyap::Mat dev =
      d.adjoint() * d - qlyap::Mat::Identity(lat.dim(), lat.dim());
  CHECK(dev.cwiseAbs().maxCoeff() < kTolerance);
}

TEST_CASE("momentum_only_displacement_is_diagonal_phases") {
  const qlyap::Lattice lat(3);
  const Eigen::Vector2d nu(0.7, -0.3), beta(0.2, 0.5);
  const qlyap::Mat d =
      qlyap::displacement_operator(lat, {0.0, 0.0}, nu, beta);
  for (int a = 0; a < lat.dim(); ++a) {
    const qlyap::Mode m = lat.mode_at(a);
    const qlyap::cplx expected = std::polar(
        1.0, nu(0) * (beta(0) + m.k1) + nu(1) * (beta(1) + m.k2));
    CHECK(std::abs(d(a, a) - expected) < kTolerance);
    for (int b = 0; b < lat.dim(); ++b)
      if (b != a) CHECK(std::abs(d(a, b)) < kTolerance);
  }
}

TEST_CASE("perturbation_trace_stays_zero_under_evolution") {
  // rho0 is a derivative of a state, hence traceless; unitary steps and the
  // absence of leakage keep G(0, 0) = Tr rho_t at zero.
  const qlyap::Lattice lat(8);
  qlyap::Rho0Spec rho = gradient_probe_rho();
  rho.v2 = {0.1, 0.4};
  rho.fd_step = 1e-4;
  qlyap::TraceEvaluator ev(lat, kick_model(), rho, {0.0, 0.0});
  auto trace_now = [&]() {
    return ev.trace_apply(
        [](int, const qlyap::Pool& p) -> qlyap::Mat { return p.states(); });
  };
  CHECK(std::abs(trace_now()) < 1e-10);
  for (int n = 0; n < 3; ++n) ev.step();
  CHECK(std::abs(trace_now()) < 1e-10);
}
