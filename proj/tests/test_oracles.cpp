#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include <numbers>

using namespace qfp;
using namespace qfp::test;

TEST_CASE("quadrature oracle reproduces reference values") {
  // Reference digits from independent tables.
  CHECK(bessel_quadrature(0, 1.0) == doctest::Approx(0.76519768655796661).epsilon(1e-14));
  CHECK(bessel_quadrature(1, 1.0) == doctest::Approx(0.44005058574493355).epsilon(1e-14));
  CHECK(bessel_quadrature(0, 2.0) == doctest::Approx(0.22389077914123562).epsilon(1e-13));
  CHECK(bessel_quadrature(1, 2.0) == doctest::Approx(0.57672480775687363).epsilon(1e-14));
  CHECK(bessel_quadrature(2, 2.0) == doctest::Approx(0.35283402861563773).epsilon(1e-14));
  CHECK(bessel_quadrature(0, 5.0) == doctest::Approx(-0.17759677131433835).epsilon(1e-13));
  CHECK(bessel_quadrature(3, 7.5) == doctest::Approx(-0.25806091319346031).epsilon(1e-13));
  CHECK(bessel_quadrature(0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(bessel_quadrature(5, 0.0)) < 1e-15);
}

TEST_CASE("quadrature oracle is converged at the working resolution") {
  for (auto [l, th] : {std::pair{0, 0.8283}, {7, 0.8283}, {3, 5.0}, {12, 19.5}, {-4, 1.1}}) {
    const double coarse = bessel_quadrature(l, th, 4096);
    const double fine = bessel_quadrature(l, th, 16384);
    CHECK(std::abs(coarse - fine) < 1e-14);
  }
}

TEST_CASE("quadrature oracle satisfies the reflection identity") {
  for (double th : {0.3, 0.8283, 2.0, 11.0}) {
    for (int l = 1; l <= 9; ++l) {
      const double even = (l % 2 == 0) ? 1.0 : -1.0;
      CHECK(std::abs(bessel_quadrature(-l, th) - even * bessel_quadrature(l, th)) < 1e-14);
    }
  }
}

TEST_CASE("dense transfer oracle: zero modulation leaves only the shaper") {
  const auto shaper = ShaperSpec::step_phase(6, 1.234);
  const auto oracle = dense_transfer_signs(0.0, -1, shaper, 0.0, +1);
  for (int m = -2; m <= 3; ++m) {
    for (int n = 0; n <= 1; ++n) {
      const std::complex<double> expected = (m == n) ? shaper.transmission(n) : 0.0;
      CHECK(std::abs(oracle.at(m, n) - expected) < 1e-13);
    }
  }
}

TEST_CASE("dense transfer oracle: out-of-phase modulators cancel through an all-pass shaper") {
  const auto shaper = ShaperSpec::step_phase(40, 0.0);
  const auto oracle = dense_transfer_signs(0.8283, -1, shaper, 0.8283, +1);
  for (int n = 0; n <= 1; ++n) {
    CHECK(std::abs(oracle.at(n, n) - 1.0) < 1e-10);
    CHECK(std::abs(oracle.at(1 - n, n)) < 1e-10);
  }
}

TEST_CASE("dense transfer oracle: in-phase modulators compound instead") {
  const auto shaper = ShaperSpec::step_phase(40, 0.0);
  const auto oracle = dense_transfer_signs(0.6, +1, shaper, 0.6, +1);
  // e^{i theta sin} twice is a single modulator at 2 theta.
  CHECK(std::abs(std::abs(oracle.at(0, 0)) - std::abs(bessel_quadrature(0, 1.2))) < 1e-10);
  CHECK(std::abs(std::abs(oracle.at(1, 0)) - std::abs(bessel_quadrature(1, 1.2))) < 1e-10);
}

TEST_CASE("finite-difference propagation oracle is self-consistent") {
  const Eigen::Vector4d gamma(0.70, 0.69, 0.71, 0.70);
  const Eigen::Matrix4d cov = 1e-6 * Eigen::Matrix4d::Identity();
  // P~ gradient is gamma itself, so the quadratic form has a closed form.
  const double expected = std::sqrt(gamma.dot(cov * gamma));
  CHECK(fd_ptilde_err(gamma, cov) == doctest::Approx(expected).epsilon(1e-6));
  CHECK(fd_fidelity_err(gamma, std::numbers::pi, cov, 1e-8) > 0.0);
}
