#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qfp/metrics.hpp"
#include "qfp/transfer.hpp"

#include <numbers>
#include <random>

using namespace qfp;
using qfp::test::dense_transfer_phased;
using qfp::test::dense_transfer_signs;

namespace {
constexpr double kPi = std::numbers::pi;

ShaperSpec random_shaper(std::mt19937_64& rng, int channels, bool unit_amplitudes) {
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  std::uniform_real_distribution<double> amp(0.3, 1.0);
  ShaperSpec s;
  s.channel_count = channels;
  s.phases = Eigen::ArrayXd::Zero(channels);
  s.amplitudes = Eigen::ArrayXd::Ones(channels);
  for (int i = 0; i < channels; ++i) {
    s.phases[i] = phase(rng);
    if (!unit_amplitudes) s.amplitudes[i] = amp(rng);
  }
  return s;
}
}  // namespace

TEST_CASE("zero modulation leaves only the shaper diagonal") {
  std::mt19937_64 rng(3);
  const ShaperSpec shaper = random_shaper(rng, 6, false);
  const auto v = build_transfer({0.0, -1}, shaper, {0.0, +1}, 2);
  for (int m = v.m_min; m <= v.m_max; ++m) {
    for (int n = 0; n < 2; ++n) {
      const std::complex<double> expected = (m == n) ? shaper.transmission(n) : 0.0;
      CHECK(std::abs(v.at(m, n) - expected) < 1e-15);
    }
  }
}

TEST_CASE("canonical Hadamard configuration") {
  const auto v = canonical_transfer(6, kPi, 0.8283);
  const Eigen::MatrixXcd w = computational_submatrix(v);

  CHECK(std::abs(std::abs(w(0, 0)) - std::abs(w(1, 1))) < 1e-12);
  CHECK(std::abs(std::abs(w(0, 1)) - std::abs(w(1, 0))) < 1e-12);
  // Magnitudes of the balanced splitter: sqrt(2) W = [[0.9875, 0.9869], [0.9869, -0.9875]].
  CHECK(std::abs(w(0, 0)) * std::sqrt(2.0) == doctest::Approx(0.9875).epsilon(5e-5));
  CHECK(std::abs(w(0, 1)) * std::sqrt(2.0) == doctest::Approx(0.9869).epsilon(5e-5));
  CHECK(w(0, 0).real() > 0.0);
  CHECK(w(1, 1).real() < 0.0);

  const GateMetrics g = gate_metrics(v, hadamard_target());
  CHECK(g.fidelity >= 0.999998);
  CHECK(std::abs(g.modified_success - 0.9747) <= 5e-4);
}

TEST_CASE("all-pass shaper with out-of-phase modulators approaches the identity") {
  const auto v = canonical_transfer(40, 0.0, 0.8283);
  const Eigen::MatrixXcd w = computational_submatrix(v);
  CHECK(std::abs(std::abs(w(0, 0)) - 1.0) < 1e-10);
  CHECK(std::abs(std::abs(w(1, 1)) - 1.0) < 1e-10);
  CHECK(std::abs(w(0, 1)) < 1e-10);
  CHECK(std::abs(w(1, 0)) < 1e-10);
}

TEST_CASE("general sign pairs against the dense product oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> theta(0.0, 1.3);
  std::uniform_int_distribution<int> sign(0, 1);
  std::uniform_int_distribution<int> channels(1, 4);

  for (int trial = 0; trial < 30; ++trial) {
    const int b = 2 * channels(rng);
    const ShaperSpec shaper = random_shaper(rng, b, trial % 2 == 0);
    const ModulatorSpec mod1{theta(rng), sign(rng) ? +1 : -1};
    const ModulatorSpec mod2{theta(rng), sign(rng) ? +1 : -1};
    const auto v = build_transfer(mod1, shaper, mod2, 2);
    const auto oracle = dense_transfer_signs(mod1.theta, mod1.sign, shaper, mod2.theta, mod2.sign);
    for (int m = v.m_min; m <= v.m_max; ++m)
      for (int n = 0; n < 2; ++n) CHECK(std::abs(v.at(m, n) - oracle.at(m, n)) < 1e-10);
  }
}

TEST_CASE("unequal modulation indices against the oracle") {
  const ShaperSpec shaper = ShaperSpec::step_phase(6, kPi);
  const auto v = build_transfer({0.9, -1}, shaper, {0.4, +1}, 3);
  const auto oracle = dense_transfer_signs(0.9, -1, shaper, 0.4, +1);
  for (int m = v.m_min; m <= v.m_max; ++m)
    for (int n = 0; n < 3; ++n) CHECK(std::abs(v.at(m, n) - oracle.at(m, n)) < 1e-10);
}

TEST_CASE("single-input build matches the oracle") {
  const ShaperSpec shaper = ShaperSpec::step_phase(4, 1.0);
  const auto v = build_transfer({0.7, -1}, shaper, {0.7, +1}, 1);
  const auto oracle = dense_transfer_signs(0.7, -1, shaper, 0.7, +1);
  for (int m = v.m_min; m <= v.m_max; ++m) CHECK(std::abs(v.at(m, 0) - oracle.at(m, 0)) < 1e-10);
}

TEST_CASE("phased builder reduces to the sign pair at 0 and pi") {
  const ShaperSpec shaper = ShaperSpec::step_phase(6, 2.1);
  const auto by_sign = build_transfer({0.8, -1}, shaper, {0.8, +1}, 2);
  const auto by_phase = build_transfer_phased(0.8, kPi, shaper, 0.8, 0.0, 2);
  for (int m = by_sign.m_min; m <= by_sign.m_max; ++m)
    for (int n = 0; n < 2; ++n) CHECK(std::abs(by_sign.at(m, n) - by_phase.at(m, n)) < 1e-12);
}

TEST_CASE("negative index in the phased builder folds into the drive phase") {
  const ShaperSpec shaper = ShaperSpec::step_phase(6, 1.3);
  const auto negative = build_transfer_phased(-0.7, 0.4, shaper, 0.7, 0.0, 2);
  const auto folded = build_transfer_phased(0.7, 0.4 + kPi, shaper, 0.7, 0.0, 2);
  for (int m = negative.m_min; m <= negative.m_max; ++m)
    for (int n = 0; n < 2; ++n) CHECK(std::abs(negative.at(m, n) - folded.at(m, n)) < 1e-12);
}

TEST_CASE("phased builder with arbitrary drive phases against the oracle") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  std::uniform_real_distribution<double> theta(0.1, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double th1 = theta(rng), th2 = theta(rng);
    const double p1 = phase(rng), p2 = phase(rng);
    const ShaperSpec shaper = ShaperSpec::step_phase(6, phase(rng));
    const auto v = build_transfer_phased(th1, p1, shaper, th2, p2, 2, -1);
    const auto oracle = dense_transfer_phased(th1, p1, shaper, th2, p2);
    for (int m = v.m_min; m <= v.m_max; ++m)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(v.at(m, j) - oracle.at(m, -1 + j)) < 1e-10);
  }
}

TEST_CASE("closed form equals the general builder on 200 random canonical configs") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> b_pick(1, 4);
  std::uniform_real_distribution<double> alpha(0.0, 2 * kPi);
  std::uniform_real_distribution<double> theta(0.0, 1.2);
  for (int trial = 0; trial < 200; ++trial) {
    const int b = 2 * b_pick(rng);
    const double a = alpha(rng), th = theta(rng);
    const auto v = canonical_transfer(b, a, th);
    for (int m = v.m_min; m <= v.m_max; ++m)
      for (int n = 0; n < 2; ++n)
        CHECK(std::abs(v.at(m, n) - eq2_transfer(b, a, th, 2, m, n)) < 1e-12);
  }
}

TEST_CASE("closed form at zero modulation is the shaper step") {
  for (int m = -2; m <= 3; ++m) {
    for (int n = 0; n < 2; ++n) {
      const std::complex<double> got = eq2_transfer(6, 1.1, 0.0, 2, m, n);
      std::complex<double> expected = 0.0;
      if (m == n) expected = (n <= 0) ? 1.0 : std::polar(1.0, 1.1);
      CHECK(std::abs(got - expected) < 1e-15);
    }
  }
}

TEST_CASE("closed-form diagonal magnitude at the Hadamard point") {
  const std::complex<double> v00 = eq2_transfer(6, kPi, 0.8283, 2, 0, 0);
  CHECK(std::norm(v00) == doctest::Approx(0.5 * 0.9875 * 0.9875).epsilon(1e-4));
  const auto oracle = dense_transfer_signs(0.8283, -1, ShaperSpec::step_phase(6, kPi), 0.8283, +1);
  CHECK(std::abs(v00 - oracle.at(0, 0)) < 1e-10);
}

TEST_CASE("four-channel truncation loses second-order sideband mass") {
  const auto v = canonical_transfer(4, kPi, 0.8283);
  const double mass = v.column_mass(0);
  CHECK(mass < 1.0 - 1e-3);
  CHECK(mass > 0.95);
  // Direct summation of the closed form over a wide output range agrees.
  double eq2_mass = 0.0;
  for (int m = -12; m <= 13; ++m) eq2_mass += std::norm(eq2_transfer(4, kPi, 0.8283, 2, m, 0));
  CHECK(eq2_mass == doctest::Approx(mass).epsilon(1e-12));
}

TEST_CASE("passivity: column masses never exceed one") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> b_pick(1, 5);
  std::uniform_real_distribution<double> theta(0.0, 1.3);
  for (int trial = 0; trial < 200; ++trial) {
    const ShaperSpec shaper = random_shaper(rng, 2 * b_pick(rng), trial % 3 != 0);
    const auto v = build_transfer({theta(rng), -1}, shaper, {theta(rng), +1}, 2);
    for (int n = 0; n < 2; ++n) CHECK(v.column_mass(n) <= 1.0 + 1e-12);
  }
}

TEST_CASE("unit-amplitude wide shapers conserve column mass to the tail tolerance") {
  for (double theta : {0.3, 0.8283, 1.2}) {
    const int k = truncation_order(theta, 1e-16);
    const auto v = canonical_transfer(2 * k + 2, 1.3, theta);
    for (int n = 0; n < 2; ++n) CHECK(std::abs(v.column_mass(n) - 1.0) < 1e-13);
  }
}

TEST_CASE("canonical family is symmetric under bin exchange") {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> b_pick(1, 4);
  std::uniform_real_distribution<double> alpha(0.0, 2 * kPi);
  std::uniform_real_distribution<double> theta(0.0, 1.2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = canonical_transfer(2 * b_pick(rng), alpha(rng), theta(rng));
    const Eigen::MatrixXcd w = computational_submatrix(v);
    CHECK(std::abs(std::abs(w(0, 0)) - std::abs(w(1, 1))) < 1e-12);
    CHECK(std::abs(std::abs(w(0, 1)) - std::abs(w(1, 0))) < 1e-12);
    CHECK(std::abs(w(0, 1) - w(1, 0)) < 1e-12);  // m <-> n exchange symmetry
  }
}

TEST_CASE("computational block converges entrywise in the channel count") {
  const double theta = 0.8283;
  const int k = truncation_order(theta, 1e-16);
  Eigen::MatrixXcd prev;
  for (int b = 2 * k + 2; b <= 2 * k + 10; b += 2) {
    const Eigen::MatrixXcd w = computational_submatrix(canonical_transfer(b, kPi, theta));
    if (prev.size() > 0) CHECK((w - prev).cwiseAbs().maxCoeff() < 1e-12);
    prev = w;
  }
}

TEST_CASE("validation and error paths") {
  const ShaperSpec shaper = ShaperSpec::step_phase(6, kPi);
  SUBCASE("odd channel count") {
    ShaperSpec bad = shaper;
    bad.channel_count = 5;
    CHECK_THROWS_AS(build_transfer({0.8, -1}, bad, {0.8, +1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(eq2_transfer(5, kPi, 0.8, 2, 0, 0), std::invalid_argument);
  }
  SUBCASE("non-positive tail tolerance") {
    CHECK_THROWS_AS(build_transfer({0.8, -1}, shaper, {0.8, +1}, 2, 0.0), std::domain_error);
    CHECK_THROWS_AS(build_transfer({0.8, -1}, shaper, {0.8, +1}, 2, -1e-9), std::domain_error);
  }
  SUBCASE("modulator invariants") {
    CHECK_THROWS_AS(build_transfer({-0.1, -1}, shaper, {0.8, +1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_transfer({0.8, 2}, shaper, {0.8, +1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_transfer({21.0, -1}, shaper, {0.8, +1}, 2), std::domain_error);
  }
  SUBCASE("input count") {
    CHECK_THROWS_AS(build_transfer({0.8, -1}, shaper, {0.8, +1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(eq2_transfer(6, kPi, 0.8, 2, 0, 2), std::invalid_argument);
  }
  SUBCASE("amplitude range") {
    ShaperSpec bad = shaper;
    bad.amplitudes[2] = 1.5;
    CHECK_THROWS_AS(build_transfer({0.8, -1}, bad, {0.8, +1}, 2), std::invalid_argument);
  }
  SUBCASE("window accessors") {
    const auto v = canonical_transfer(6, kPi, 0.8283);
    CHECK_THROWS_AS(v.at(v.m_max + 1, 0), std::out_of_range);
    CHECK_THROWS_AS(v.at(0, 2), std::out_of_range);
    TransferMatrix crafted = v;
    crafted.m_min = 5;  // window no longer covers the computational bins
    crafted.m_max = 5 + v.rows() - 1;
    CHECK_THROWS_AS(computational_submatrix(crafted), std::logic_error);
    TransferMatrix shifted = v;
    shifted.input_origin = -1;
    CHECK_THROWS_AS(computational_submatrix(shifted), std::logic_error);
  }
}

TEST_CASE("window sizing keeps per-column leakage below the tolerance") {
  // Compare the windowed mass against the oracle's much wider grid.
  const ShaperSpec shaper = ShaperSpec::step_phase(6, kPi);
  const auto v = build_transfer({0.9, -1}, shaper, {0.9, +1}, 2, 1e-16);
  const auto oracle = dense_transfer_signs(0.9, -1, shaper, 0.9, +1, 40);
  for (int n = 0; n < 2; ++n) {
    CHECK(std::abs(v.column_mass(n) - oracle.column_mass(n)) < 1e-14);
  }
}
