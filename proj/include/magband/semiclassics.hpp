#pragma once

#include <cmath>
#include <vector>

#include "magband/bands.hpp"
#include "magband/hermite.hpp"
#include "magband/potential.hpp"
#include "magband/quadrature.hpp"

namespace magband {

// Explicit constants of the large-b derivative bounds
//   |E_j'(k)  - W'(k/b)/b|    <= c1 b^{-2} + c2 b^{-3/2}
//   |E_j''(k) - W''(k/b)/b^2| <= c5 b^{-3} + c4 b^{-5/2},  c5 = c3 + 2||W'||^2,
// valid for b > 2||W||_inf. c3, c4 are the c1, c2 analogues with one more
// derivative on W.
struct SemiclassicalConstants {
  int j = 0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;
  double moment = 0.0;        // int |y| phi_j(y)^2 dy
  double series1 = 0.0;       // sum_{l>=1} (2|l-j|-1)^{-2}
  double series2 = 0.0;       // sum_{l!=j} (2|l-j|-3/2)^{-2} + 4
  double sup_w0 = 0.0, sup_w1 = 0.0, sup_w2 = 0.0, sup_w3 = 0.0;
};

namespace detail {

// sum_{m>=1} (2m - shift)^{-2}. The tail beyond M is replaced by the
// midpoint integral comparison int_{M+1/2} (2t-shift)^{-2} dt =
// 1/(2(2M+1-shift)), whose residual is O((2M)^{-3}); stop once that bound
// drops below 1e-10 of the partial sum.
inline double half_series(double shift) {
  double s = 0.0;
  for (int m = 1; m < 10000000; ++m) {
    const double t = 2.0 * m - shift;
    s += 1.0 / (t * t);
    if (m > 8) {
      const double residual = 1.0 / (t * t * t);
      if (residual < 1e-10 * s) return s + 1.0 / (2.0 * (2.0 * m + 1.0 - shift));
    }
  }
  throw numerics_error("half_series: no convergence");
}

// int |y| phi_j(y)^2 dy = 2 int_0^inf y phi_j(y)^2 dy (smooth on the half line)
inline double abs_moment(int j) {
  const double ymax = std::sqrt(2.0 * j + 1.0) + 12.0;
  const QuadRule gl = gauss_legendre(400, 0.0, ymax);
  double acc = 0.0;
  for (int i = 0; i < gl.size(); ++i) {
    const double f = hermite_fn(j, gl.nodes[i]);
    acc += gl.weights[i] * gl.nodes[i] * f * f;
  }
  return 2.0 * acc;
}

}  // namespace detail

inline SemiclassicalConstants semiclassical_constants(int j, const FourierPotential& W) {
  if (j < 1) throw config_error("semiclassical_constants: band index must be >= 1");
  SemiclassicalConstants c;
  c.j = j;
  // sum_{l>=1}(2|l-j|-1)^{-2}: l=j gives 1, l<j a finite prefix (m=j-l),
  // l>j the half-line series (m=l-j)
  c.series1 = 1.0;
  for (int m = 1; m <= j - 1; ++m) c.series1 += 1.0 / ((2.0 * m - 1.0) * (2.0 * m - 1.0));
  c.series1 += detail::half_series(1.0);
  c.series2 = 4.0;
  for (int m = 1; m <= j - 1; ++m) c.series2 += 1.0 / ((2.0 * m - 1.5) * (2.0 * m - 1.5));
  c.series2 += detail::half_series(1.5);

  c.moment = detail::abs_moment(j);
  c.sup_w0 = W.sup_norm(0);
  c.sup_w1 = W.sup_norm(1);
  c.sup_w2 = W.sup_norm(2);
  c.sup_w3 = W.sup_norm(3);
  const double root = std::sqrt(c.series1) * std::sqrt(c.series2);
  c.c1 = c.sup_w0 * c.sup_w1 * root;
  c.c2 = c.sup_w2 * c.moment;
  c.c3 = c.sup_w0 * c.sup_w2 * root;
  c.c4 = c.sup_w3 * c.moment;
  c.c5 = c.c3 + 2.0 * c.sup_w1 * c.sup_w1;
  return c;
}

// Field threshold above which sign(E_j'(b x0)) = sign(W'(x0)) is guaranteed.
inline double threshold_b0(const SemiclassicalConstants& c, const FourierPotential& W,
                           double x0) {
  const double w1 = std::abs(W.eval(x0, 1));
  if (w1 <= 1e-12 * c.sup_w1)
    throw numerics_error("threshold_b0: W'(x0) = 0, threshold undefined");
  const double t = (c.c2 + std::sqrt(c.c2 * c.c2 + 4.0 * c.c1 * w1)) / (2.0 * w1);
  return std::max(2.0 * c.sup_w0, t * t);
}

// Analogue for the curvature: b > b1 forces sign(E_j''(b x0)) = sign(W''(x0)).
inline double threshold_b1(const SemiclassicalConstants& c, const FourierPotential& W,
                           double x0) {
  const double w2 = std::abs(W.eval(x0, 2));
  if (w2 <= 1e-12 * c.sup_w2)
    throw numerics_error("threshold_b1: W''(x0) = 0, threshold undefined");
  const double t = (c.c4 + std::sqrt(c.c4 * c.c4 + 4.0 * c.c5 * w2)) / (2.0 * w2);
  return std::max(2.0 * c.sup_w0, t * t);
}

struct BoundCheck {
  double max_residual = 0.0;  // max over grid of |difference| - bound; <= 0 passes
  double bound = 0.0;
  bool passed = false;
};

inline BoundCheck verify_first_bound(const BandSolver& solver, int j,
                                     const SemiclassicalConstants& c, int k_points = 32,
                                     double tol = 1e-8) {
  const double b = solver.b();
  if (!(b > 2.0 * c.sup_w0))
    throw numerics_error("verify_first_bound: requires b > 2 ||W||_inf");
  const double tau = solver.tau();
  BoundCheck out;
  out.bound = c.c1 / (b * b) + c.c2 / (b * std::sqrt(b));
  out.max_residual = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k_points; ++i) {
    const double k = tau * i / k_points;
    const double diff = std::abs(solver.derivative(j, k) -
                                 solver.potential().eval(k / b, 1) / b);
    out.max_residual = std::max(out.max_residual, diff - out.bound);
  }
  out.passed = out.max_residual <= tol;
  return out;
}

inline BoundCheck verify_second_bound(const BandSolver& solver, int j,
                                      const SemiclassicalConstants& c, int k_points = 32,
                                      double tol = 1e-8) {
  const double b = solver.b();
  if (!(b > 2.0 * c.sup_w0))
    throw numerics_error("verify_second_bound: requires b > 2 ||W||_inf");
  const double tau = solver.tau();
  BoundCheck out;
  out.bound = c.c5 / (b * b * b) + c.c4 / (b * b * std::sqrt(b));
  out.max_residual = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k_points; ++i) {
    const double k = tau * i / k_points;
    const double diff = std::abs(solver.curvature(j, k).value -
                                 solver.potential().eval(k / b, 2) / (b * b));
    out.max_residual = std::max(out.max_residual, diff - out.bound);
  }
  out.passed = out.max_residual <= tol;
  return out;
}

struct DriftEntry {
  int j = 0;
  double drift_lower = 0.0;  // E_j^- - b(2j-1) - <W>
  double drift_upper = 0.0;  // E_j^+ - b(2j-1) - <W>
};

// Edge drift against the Landau ladder shifted by the potential mean;
// vanishes as j -> infinity.
inline std::vector<DriftEntry> kkp_drift(const BandSolver& solver, int j_from, int j_to,
                                         int grid_size = 256) {
  if (j_from < 1 || j_to < j_from) throw config_error("kkp_drift: bad band range");
  const double b = solver.b();
  const double mean = solver.potential().mean();
  auto bands = solver.band_edges_and_gaps(j_to, grid_size);
  std::vector<DriftEntry> out;
  for (int j = j_from; j <= j_to; ++j) {
    DriftEntry e;
    e.j = j;
    e.drift_lower = bands[j - 1].lower_edge - b * (2.0 * j - 1.0) - mean;
    e.drift_upper = bands[j - 1].upper_edge - b * (2.0 * j - 1.0) - mean;
    out.push_back(e);
  }
  return out;
}

}  // namespace magband
