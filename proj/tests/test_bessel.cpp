#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qfp/bessel.hpp"

#include <random>

using namespace qfp;
using qfp::test::bessel_quadrature;

TEST_CASE("series definition anchors") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  CHECK(bessel_j(7, 0.0) == 0.0);
  CHECK(bessel_j(-3, 0.0) == 0.0);
}

TEST_CASE("second-order sideband leakage at the Hadamard index") {
  const double ratio = std::pow(bessel_j(2, 0.8283) / bessel_j(0, 0.8283), 2);
  CHECK(ratio > 0.0085);
  CHECK(ratio < 0.0095);
}

TEST_CASE("row matches the quadrature oracle at the Hadamard index") {
  const auto row = bessel_row(0.8283, 10);
  for (int l = -10; l <= 10; ++l)
    CHECK(std::abs(row(l) - bessel_quadrature(l, 0.8283)) < 1e-12);
}

TEST_CASE("quadrature agreement across the envelope") {
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> theta_dist(0.0, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double theta = theta_dist(rng);
    const int k = truncation_order(theta, 1e-16);
    std::uniform_int_distribution<int> order_dist(-(k + 5), k + 5);
    const int order = order_dist(rng);
    const double impl = bessel_j(order, theta);
    const double oracle = bessel_quadrature(order, theta);
    CHECK(std::abs(impl - oracle) < 1e-12);
    CHECK(std::abs(impl - oracle) <= 1e-13 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("small-argument series path agrees with quadrature") {
  for (double theta : {1e-8, 0.01, 0.2, 0.499}) {
    for (int l = 0; l <= 6; ++l)
      CHECK(std::abs(bessel_j(l, theta) - bessel_quadrature(l, theta)) < 1e-14);
  }
}

TEST_CASE("negative arguments and orders fold with the right parity") {
  for (double theta : {0.3, 1.7, 6.2}) {
    for (int l = 0; l <= 8; ++l) {
      CHECK(bessel_j(-l, theta) == doctest::Approx(((l % 2) ? -1.0 : 1.0) * bessel_j(l, theta))
                                       .epsilon(1e-15));
      CHECK(bessel_j(l, -theta) == doctest::Approx(((l % 2) ? -1.0 : 1.0) * bessel_j(l, theta))
                                       .epsilon(1e-15));
    }
  }
}

TEST_CASE("reflection identity over random arguments") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> theta_dist(0.0, 20.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double theta = theta_dist(rng);
    const int k = truncation_order(theta, 1e-16);
    const auto row = bessel_row(theta, k);
    for (int l = 0; l <= k; ++l)
      CHECK(std::abs(row(-l) - ((l % 2) ? -1.0 : 1.0) * row(l)) < 1e-14);
  }
}

TEST_CASE("Parseval normalization at the truncation order") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> theta_dist(0.0, 20.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double theta = theta_dist(rng);
    const int k = truncation_order(theta, 1e-16);
    const auto row = bessel_row(theta, k);
    CHECK(std::abs(row.values.square().sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("three-term recurrence consistency") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> theta_dist(0.1, 20.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double theta = theta_dist(rng);
    const int k = truncation_order(theta, 1e-16);
    const auto row = bessel_row(theta, k + 1);
    for (int l = -k; l <= k; ++l) {
      const double lhs = row(l - 1) + row(l + 1);
      const double rhs = (2.0 * l / theta) * row(l);
      const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
      CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("truncation_order basics") {
  CHECK(truncation_order(0.0, 1e-16) == 0);
  CHECK(truncation_order(1e-30, 1e-16) == 0);

  const int k = truncation_order(0.8283, 1e-16);
  const auto row = bessel_row(0.8283, k + 60);
  // Residual below tolerance at K, not yet at K-1 (smallest-K property).
  const auto tail_from = [&](int first) {
    double tail = 0.0;
    for (int l = k + 60; l >= first; --l) tail += 2.0 * row(l) * row(l);
    return tail;
  };
  CHECK(tail_from(k + 1) < 1e-16);
  CHECK(tail_from(k) >= 1e-16);
}

TEST_CASE("truncation_order is monotone in theta and tolerance") {
  CHECK(truncation_order(1.0, 1e-16) >= truncation_order(0.8283, 1e-16));
  int prev = 0;
  for (double theta = 0.0; theta <= 20.0; theta += 0.25) {
    const int k = truncation_order(theta, 1e-16);
    CHECK(k >= prev);
    CHECK(k <= static_cast<int>(std::ceil(theta)) + 60);
    prev = k;
  }
  for (double theta : {0.4, 0.8283, 3.0, 12.0}) {
    CHECK(truncation_order(theta, 1e-12) <= truncation_order(theta, 1e-16));
    CHECK(truncation_order(theta, 1e-8) <= truncation_order(theta, 1e-12));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(bessel_j(0, 20.5), std::domain_error);
  CHECK_THROWS_AS(bessel_j(2, -25.0), std::domain_error);
  CHECK_THROWS_AS(truncation_order(0.8, 0.0), std::domain_error);
  CHECK_THROWS_AS(truncation_order(0.8, -1e-12), std::domain_error);
  CHECK_THROWS_AS(truncation_order(22.0, 1e-12), std::domain_error);
  CHECK_THROWS_AS(bessel_row(1.0, -1), std::invalid_argument);
}

TEST_CASE("float instantiation stays usable") {
  const float j0 = bessel_j(0, 1.0f);
  CHECK(std::abs(j0 - 0.7651977f) < 1e-6f);
  CHECK(truncation_order(0.8283f, 1e-7f) >= 4);
}
