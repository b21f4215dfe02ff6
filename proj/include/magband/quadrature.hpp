#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "magband/errors.hpp"

namespace magband {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// Orthonormal Hermite recurrence at z up to degree n, with periodic rescaling
// so it never overflows (plain values reach e^{z^2/2} ~ e^{n}).
// Returns p_n, p_{n-1} at a common (unknown) scale plus log of that scale.
struct ScaledHermite {
  double pn, pnm1, log_scale;
};

inline ScaledHermite hermite_scaled(int n, double z) {
  double p1 = 0.7511255444649425;  // pi^{-1/4} = h_0
  double p2 = 0.0, p3 = 0.0;
  double log_scale = 0.0;
  for (int j = 1; j <= n; ++j) {
    p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
    double a = std::abs(p1);
    if (a > 1e250) {
      p1 *= 1e-250;
      p2 *= 1e-250;
      log_scale += 250.0 * std::log(10.0);
    } else if (a > 0.0 && a < 1e-250) {
      p1 *= 1e250;
      p2 *= 1e250;
      log_scale -= 250.0 * std::log(10.0);
    }
  }
  return {p1, p2, log_scale};
}

}  // namespace detail

// Gauss-Hermite rule in "modified weight" form: for g with Gaussian decay,
//   int_R g(x) dx  ~=  sum_i w_i g(x_i),
// i.e. the weights already contain the e^{+x^2} factor. They equal the
// Christoffel numbers 1/(n F_{n-1}(x_i)^2) with F_j = h_j e^{-x^2/2}, which
// are all O(node spacing), so the rule is overflow-free for any order.
//
// Nodes come from the Jacobi (Golub-Welsch) tridiagonal eigenproblem, then
// two Newton polish steps on the scaled recurrence; the classical
// seed-recursion Newton walk loses roots beyond n ~ 200.
inline QuadRule gauss_hermite(int n) {
  if (n < 1) throw numerics_error("gauss_hermite: order must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  for (int j = 0; j + 1 < n; ++j) sub[j] = std::sqrt((j + 1) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw numerics_error("gauss_hermite: tridiagonal eigensolve failed");

  QuadRule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // symmetrize the +- pair; central node of odd n is exactly 0
    double z = 0.5 * (es.eigenvalues()[n - 1 - i] - es.eigenvalues()[i]);
    if (n % 2 == 1 && i == m - 1) z = 0.0;
    detail::ScaledHermite s = detail::hermite_scaled(n, z);
    for (int it = 0; it < 2 && z != 0.0; ++it) {
      const double dz = s.pn / (std::sqrt(2.0 * n) * s.pnm1);
      const double znew = z - dz;
      if (!(std::abs(dz) < 1.0)) break;  // polish step must stay local
      z = znew;
      s = detail::hermite_scaled(n, z);
    }
    // log F_{n-1}(z) = log|p_{n-1}| + log_scale - z^2/2
    const double logF = std::log(std::abs(s.pnm1)) + s.log_scale - 0.5 * z * z;
    const double logw = -std::log(static_cast<double>(n)) - 2.0 * logF;
    const double w = std::exp(logw);
    r.nodes[n - 1 - i] = z;
    r.nodes[i] = -z;
    r.weights[n - 1 - i] = w;
    r.weights[i] = w;
  }
  return r;
}

// Gauss-Legendre on [a, b].
inline QuadRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw numerics_error("gauss_legendre: order must be >= 1");
  QuadRule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0;; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
      if (it > 100) throw numerics_error("gauss_legendre: Newton iteration stalled");
    }
    r.nodes[i] = xm - xl * z;
    r.nodes[n - 1 - i] = xm + xl * z;
    r.weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  return r;
}

}  // namespace magband
