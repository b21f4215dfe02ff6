#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "magband/specutil.hpp"

using namespace magband;

namespace {

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = g(rng);
  return 0.5 * (M + M.transpose()).eval();
}

}  // namespace

TEST_CASE("counting on a known diagonal", "[specutil]") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, 3);
  M.diagonal() << 3.0, 1.0, -2.0;
  CHECK(count_pos(2.0, M) == 1);
  // the spectral projection onto (s, inf) is open: -2 only counts below s = 2
  CHECK(count_neg(1.999, M) == 1);
  CHECK(count_neg(2.0, M) == 0);
}

TEST_CASE("strictness of the threshold", "[specutil]") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2, 2);
  M.diagonal() << 2.0, -2.0;
  CHECK(count_pos(2.0, M) == 0);   // strict inequality
  CHECK(count_neg(1.999, M) == 1);
}

TEST_CASE("eigenvalue counts are dominated by singular counts", "[specutil]") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto M = random_symmetric(rng, 8);
    for (double s : {0.3, 1.0, 2.5}) {
      CHECK(count_pos(s, M) <= count_sv(s, M));
      CHECK(count_neg(s, M) <= count_sv(s, M));
    }
  }
}

TEST_CASE("singular counts of a rectangular matrix and its adjoint", "[specutil]") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd M(5, 9);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 9; ++j) M(i, j) = g(rng);
  for (double s : {0.2, 0.9, 1.7}) {
    CHECK(count_sv(s, M) == count_sv(s, Eigen::MatrixXd(M.transpose())));
  }
}

TEST_CASE("Weyl collapses to threshold monotonicity when T2 = 0", "[specutil]") {
  std::mt19937_64 rng(5);
  const auto M = random_symmetric(rng, 7);
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(7, 7);
  for (double s : {0.5, 1.0}) {
    for (double e : {0.1, 0.5}) {
      CHECK(check_weyl(s, e, M, Z));
      CHECK(count_pos(s * (1.0 + e), M) <= count_pos(s, M));
      CHECK(count_pos(s, M) <= count_pos(s * (1.0 - e), M));
    }
  }
}

TEST_CASE("perturbation inequalities hold on random pairs", "[specutil]") {
  // these are theorems: a violation would flag an eigensolver defect
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<int> dim(4, 12);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = dim(rng);
    const auto A = random_symmetric(rng, n);
    const auto B = random_symmetric(rng, n);
    for (double s : {0.5, 1.0, 2.0}) {
      for (double e : {0.1, 0.5}) {
        CAPTURE(trial, n, s, e);
        REQUIRE(check_weyl(s, e, A, B));
        REQUIRE(check_kyfan(s, e, A, B));
      }
      REQUIRE(check_chebyshev(s, A));
    }
  }
}

TEST_CASE("Frobenius Chebyshev bound is quantitative", "[specutil]") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 4);
  M.diagonal() << 2.0, 1.5, 0.1, 0.05;
  // n_*(1; M) = 2 and ||M||_F^2 = 6.2625
  CHECK(count_sv(1.0, M) == 2);
  CHECK(check_chebyshev(1.0, M));
}

TEST_CASE("complex Hermitian input", "[specutil]") {
  Eigen::MatrixXcd H(2, 2);
  H << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 2.0),
       std::complex<double>(0.0, -2.0), std::complex<double>(-1.0, 0.0);
  // eigenvalues are +-sqrt(5)
  CHECK(count_pos(2.0, H) == 1);
  CHECK(count_neg(2.0, H) == 1);
  CHECK(count_sv(2.0, H) == 2);
}

TEST_CASE("threshold must be positive", "[specutil]") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(count_pos(0.0, M), numerics_error);
  CHECK_THROWS_AS(count_sv(-1.0, M), numerics_error);
}
