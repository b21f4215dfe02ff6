#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "magband/quadrature.hpp"

using namespace magband;

TEST_CASE("gauss_hermite integrates Gaussian moments at any order", "[quadrature]") {
  // modified weights: int g(x) dx = sum w_i g(x_i) for Gaussian-decaying g
  const double sqrt_pi = 1.7724538509055160273;
  for (int n : {4, 16, 64, 256, 512, 1024}) {
    const QuadRule r = gauss_hermite(n);
    double m0 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = std::exp(-r.nodes[i] * r.nodes[i]);
      m0 += r.weights[i] * g;
      m2 += r.weights[i] * r.nodes[i] * r.nodes[i] * g;
    }
    CAPTURE(n);
    CHECK(std::abs(m0 - sqrt_pi) < 1e-13);
    CHECK(std::abs(m2 - 0.5 * sqrt_pi) < 1e-13);
  }
}

TEST_CASE("gauss_hermite nodes are symmetric and ascending", "[quadrature]") {
  const QuadRule r = gauss_hermite(101);
  REQUIRE(r.size() == 101);
  CHECK(r.nodes[50] == 0.0);
  for (int i = 0; i + 1 < r.size(); ++i) CHECK(r.nodes[i] < r.nodes[i + 1]);
  for (int i = 0; i < r.size(); ++i) {
    CHECK(r.nodes[i] == -r.nodes[r.size() - 1 - i]);
    CHECK(r.weights[i] == r.weights[r.size() - 1 - i]);
    CHECK(r.weights[i] > 0.0);
  }
}

TEST_CASE("gauss_hermite modified weights stay O(1)", "[quadrature]") {
  // no overflow/underflow even where the plain weights are ~ e^{-2000}
  const QuadRule r = gauss_hermite(1024);
  for (double w : r.weights) {
    CHECK(std::isfinite(w));
    CHECK(w > 1e-6);
    CHECK(w < 10.0);
  }
}

TEST_CASE("gauss_legendre exactness and interval mapping", "[quadrature]") {
  const QuadRule r = gauss_legendre(12, 0.0, 1.0);
  double acc = 0.0;
  for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], 23.0);
  CHECK(std::abs(acc - 1.0 / 24.0) < 1e-14);  // exact for degree <= 2n-1

  const QuadRule s = gauss_legendre(40, -2.0, 5.0);
  double c = 0.0, total = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    c += s.weights[i] * std::cos(s.nodes[i]);
    total += s.weights[i];
  }
  CHECK(std::abs(total - 7.0) < 1e-13);
  CHECK(std::abs(c - (std::sin(5.0) - std::sin(-2.0))) < 1e-13);
}

TEST_CASE("quadrature rejects nonpositive order", "[quadrature]") {
  CHECK_THROWS_AS(gauss_hermite(0), numerics_error);
  CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), numerics_error);
}
