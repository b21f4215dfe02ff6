#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "magband/bands.hpp"

using namespace magband;

namespace {
BandSolver make_solver(double b, double amp = 0.4, int N = 96, int jmax = 6) {
  return BandSolver(HermiteBasis(b, N, 4 * N), FourierPotential(1.0, {0.0, amp}), jmax);
}
}  // namespace

TEST_CASE("flat bands have zero derivative", "[bands]") {
  BandSolver s(HermiteBasis(1.0, 32, 128), FourierPotential(1.0, {0.0}), 3);
  for (double k : {0.0, 0.4, 0.9}) CHECK(std::abs(s.derivative(1, k)) < 1e-13);
}

TEST_CASE("Feynman-Hellmann derivative matches central differences", "[bands]") {
  auto s = make_solver(1.0);
  const double h = 1e-4;
  for (int j : {1, 2, 3}) {
    for (double kf : {0.18, 0.25, 0.32}) {
      const double k = kf * s.tau();
      const double fh = s.derivative(j, k);
      const double fd = (s.energy(j, k + h) - s.energy(j, k - h)) / (2.0 * h);
      CAPTURE(j, kf);
      CHECK(std::abs(fh - fd) <= 1e-5 * std::abs(fd));
    }
  }
}

TEST_CASE("curvature matches second differences where they resolve", "[bands]") {
  auto s = make_solver(1.0);
  const double h = 1e-4;
  for (int j : {4, 5}) {
    for (double kf : {0.03, 0.45}) {
      const double k = kf * s.tau();
      const double cv = s.curvature(j, k).value;
      const double fd2 =
          (s.energy(j, k + h) - 2.0 * s.energy(j, k) + s.energy(j, k - h)) / (h * h);
      CAPTURE(j, kf);
      CHECK(std::abs(cv - fd2) <= 1e-4 * std::abs(fd2));
    }
  }
}

TEST_CASE("eigenvector k-sensitivity obeys the resolvent bound", "[bands]") {
  auto s = make_solver(1.0);
  const double bound = s.potential().sup_norm(1) / (s.b() * s.b());
  for (int j : {1, 2, 3}) {
    for (double kf : {0.1, 0.37}) {
      CHECK(s.curvature(j, kf * s.tau()).dpsi_norm <= bound);
    }
  }
}

TEST_CASE("even potential gives even bands", "[bands]") {
  auto s = make_solver(1.0);
  CHECK(std::abs(s.derivative(1, 0.0)) < 1e-10);
  CHECK(std::abs(s.derivative(2, 0.0)) < 1e-10);
}

TEST_CASE("point bands and gaps for W = 0", "[bands]") {
  BandSolver s(HermiteBasis(1.0, 32, 128), FourierPotential(1.0, {0.0}), 3);
  const auto bands = s.band_edges_and_gaps(3, 64);
  for (int j = 1; j <= 3; ++j) {
    CHECK(bands[j - 1].constant);
    CHECK(bands[j - 1].lower_edge == Catch::Approx(2.0 * j - 1.0).margin(1e-10));
    CHECK(bands[j - 1].upper_edge == Catch::Approx(2.0 * j - 1.0).margin(1e-10));
  }
  REQUIRE(bands[0].gap_above.has_value());
  CHECK(bands[0].gap_above->first == Catch::Approx(1.0).margin(1e-10));
  CHECK(bands[0].gap_above->second == Catch::Approx(3.0).margin(1e-10));
  REQUIRE(bands[1].gap_above.has_value());
}

TEST_CASE("all gaps open under the sufficient condition", "[bands]") {
  // W_+ - W_- = 0.8 < 2b = 1
  auto s = make_solver(0.5, 0.4, 128, 4);
  const auto bands = s.band_edges_and_gaps(4, 128);
  for (int j = 0; j + 1 < 4; ++j) {
    CAPTURE(j);
    CHECK(bands[j].gap_above.has_value());
  }
  for (int j = 0; j + 1 < 4; ++j)
    CHECK(bands[j].upper_edge <= bands[j + 1].upper_edge);
}

TEST_CASE("locate_extrema refuses constant bands", "[bands]") {
  BandSolver s(HermiteBasis(1.0, 32, 128), FourierPotential(1.0, {0.0}), 2);
  CHECK_THROWS_AS(s.locate_extrema(1), numerics_error);
}

TEST_CASE("single-harmonic extrema sit at 0 and tau/2", "[bands]") {
  auto s = make_solver(1.0, 0.4, 64, 4);
  const auto sets = s.locate_extrema(1, 256);
  REQUIRE(sets.maxima.size() == 1);
  REQUIRE(sets.minima.size() == 1);
  const double tau = s.tau();
  CHECK(std::min(sets.maxima[0].k, tau - sets.maxima[0].k) < 1e-6);
  CHECK(std::abs(sets.minima[0].k - 0.5 * tau) < 1e-6);
  CHECK_FALSE(sets.maxima[0].degenerate);
  CHECK(sets.maxima[0].mu() > 0.0);
}

TEST_CASE("locate_extrema agrees with a dense-grid argmax", "[bands]") {
  auto s = make_solver(1.0, 0.4, 48, 2);
  const int dense = 1 << 14;
  const double tau = s.tau();
  double best_k = 0.0, best_v = -1e300, worst_v = 1e300, worst_k = 0.0;
  for (int i = 0; i < dense; ++i) {
    const double k = tau * i / dense;
    const double v = s.energy(1, k);
    if (v > best_v) {
      best_v = v;
      best_k = k;
    }
    if (v < worst_v) {
      worst_v = v;
      worst_k = k;
    }
  }
  const auto sets = s.locate_extrema(1, 256);
  const double spacing = tau / dense;
  auto dist_mod = [tau](double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, tau - d);
  };
  CHECK(dist_mod(sets.maxima[0].k, best_k) <= spacing);
  CHECK(dist_mod(sets.minima[0].k, worst_k) <= spacing);
}

TEST_CASE("local quadratic model fits near a non-degenerate maximum", "[bands]") {
  auto s = make_solver(1.0, 0.4, 64, 2);
  const auto sets = s.locate_extrema(1, 256);
  const auto& m = sets.maxima[0];
  const double mu = m.mu();
  const double delta = s.tau() / 200.0;
  for (double f : {0.25, 0.5, 1.0}) {
    const double dk = f * delta;
    const double model = m.value - mu * dk * dk;
    const double actual = s.energy(1, m.k + dk);
    CHECK(std::abs(actual - model) < 0.05 * mu * delta * delta);
  }
}
