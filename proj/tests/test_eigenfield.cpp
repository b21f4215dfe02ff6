#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "magband/eigenfield.hpp"

using namespace magband;

namespace {
BandSolver cos_solver(double b, int N = 96) {
  return BandSolver(HermiteBasis(b, N, 4 * N), FourierPotential(1.0, {0.0, 0.4}), 4);
}
}  // namespace

TEST_CASE("section of the free oscillator is constant in k", "[eigenfield]") {
  BandSolver s(HermiteBasis(1.0, 32, 128), FourierPotential(1.0, {0.0}), 2);
  const auto sec = build_section(s, 1, 0.0, 1.0, 16);
  for (double ov : sec.overlaps) CHECK(ov == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("section overlaps stay high on a fine grid", "[eigenfield]") {
  auto s = cos_solver(1.0);
  const auto sec = build_section(s, 1, 0.0, s.tau(), 512);
  CHECK(sec.min_overlap >= 0.999);
  for (const auto& c : sec.coeffs) CHECK(c.norm() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("rank-one projector from the section is idempotent", "[eigenfield]") {
  auto s = cos_solver(1.0);
  const auto sec = build_section(s, 2, 0.0, 0.5, 8);
  for (const auto& c : sec.coeffs) {
    const Eigen::MatrixXd pi = c * c.transpose();
    CHECK((pi * pi - pi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("lattice translation identity", "[eigenfield]") {
  auto s = cos_solver(1.0);
  CHECK(translate_identity_check(s, 1, 0, 0.21) < 1e-12);
  CHECK(translate_identity_check(s, 1, 1, 0.21) < 1e-6);
  CHECK(translate_identity_check(s, 1, -1, 0.21) < 1e-6);
  CHECK(translate_identity_check(s, 2, 1, 0.0) < 1e-6);
}

TEST_CASE("holonomy of the section is a sign", "[eigenfield]") {
  auto s = cos_solver(1.0);
  const int h = section_holonomy(s, 1, 0.0);
  CHECK((h == 1 || h == -1));
}

TEST_CASE("real-space evaluation is L2-normalized", "[eigenfield]") {
  auto s = cos_solver(1.0);
  const Eigen::VectorXd c = s.solve(0.3).eigenvectors.col(0);
  const QuadRule gl = gauss_legendre(400, -12.0, 12.0);
  double acc = 0.0;
  for (int i = 0; i < gl.size(); ++i) {
    const double v = eval_psi(s.basis(), c, 0.3, gl.nodes[i]);
    acc += gl.weights[i] * v * v;
  }
  CHECK(acc == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("decay slope recovers -b for the free oscillator", "[eigenfield]") {
  for (double b : {1.0, 2.0}) {
    BandSolver s(HermiteBasis(b, 64, 256), FourierPotential(1.0, {0.0}), 2);
    std::vector<double> xi;
    const double hi = std::min(8.0, std::sqrt(70.0 / b));
    for (int i = 0; i < 9; ++i) xi.push_back(4.0 + (hi - 4.0) * i / 8.0);
    const auto fit = decay_slope(s, 1, 0.0, -0.5, 0.5, xi);
    CAPTURE(b);
    CHECK(std::abs(fit.slope + b) < 0.05 * b);
    CHECK(fit.dropped == 0);
    CHECK(fit.s_of_xi.size() == xi.size());
  }
}

TEST_CASE("decay probe preconditions", "[eigenfield]") {
  BandSolver s(HermiteBasis(2.0, 48, 192), FourierPotential(1.0, {0.0}), 2);
  CHECK_THROWS_AS(decay_slope(s, 1, 0.0, -0.5, 0.5, {4.0, 9.0}), numerics_error);
}
