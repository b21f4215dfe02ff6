#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "magband/bands.hpp"
#include "magband/hermite.hpp"
#include "magband/quadrature.hpp"

namespace magband {

// psi_j(x; k) = psi~_j(x - k/b; k) = sum_n c_n b^{1/4} phi_{n+1}(sqrt(b)(x - k/b))
inline double eval_psi(const HermiteBasis& basis, const Eigen::VectorXd& coeffs,
                       double k, double x) {
  const double b = basis.b();
  const double y = std::sqrt(b) * (x - k / b);
  std::vector<double> f(basis.size());
  hermite_fn_all(basis.size(), y, f.data());
  double acc = 0.0;
  for (int n = 0; n < basis.size(); ++n) acc += coeffs[n] * f[n];
  return std::pow(b, 0.25) * acc;
}

// k-continuous real eigenfunction section: eigenvectors along a k-grid with
// signs chained so consecutive overlaps are positive. Simple spectrum makes
// the real eigenvector unique up to sign, so the chain reproduces the
// analytic section at grid resolution.
struct EigenSection {
  int j = 0;
  std::vector<double> k_grid;
  std::vector<Eigen::VectorXd> coeffs;
  std::vector<double> overlaps;  // <psi(k_i), psi(k_{i+1})>, after sign fixing
  double min_overlap = 1.0;
};

inline EigenSection build_section(const BandSolver& solver, int j, double k_begin,
                                  double k_end, int points) {
  if (points < 2) throw numerics_error("build_section: need at least 2 grid points");
  EigenSection sec;
  sec.j = j;
  sec.k_grid.resize(points);
  sec.coeffs.resize(points);
  for (int i = 0; i < points; ++i) {
    sec.k_grid[i] = k_begin + (k_end - k_begin) * i / (points - 1);
    sec.coeffs[i] = solver.solve(sec.k_grid[i]).eigenvectors.col(j - 1);
  }
  sec.overlaps.resize(points - 1);
  for (int i = 0; i + 1 < points; ++i) {
    double ov = sec.coeffs[i].dot(sec.coeffs[i + 1]);
    if (ov < 0.0) {
      sec.coeffs[i + 1] = -sec.coeffs[i + 1];
      ov = -ov;
    }
    sec.overlaps[i] = ov;
    sec.min_overlap = std::min(sec.min_overlap, ov);
    if (ov < 0.5)
      throw numerics_error("build_section: consecutive overlap < 0.5, k-grid too coarse");
  }
  return sec;
}

// || psi_j(.; l tau + k) - psi_j(. - l T; k) ||_{L^2} up to a global sign,
// evaluated on a uniform real-space grid. The lattice translation identity
// makes this vanish exactly; the residual is numerical.
inline double translate_identity_check(const BandSolver& solver, int j, int l,
                                       double k, int grid_points = 1024) {
  const double T = solver.potential().period();
  const double tau = solver.tau();
  const double b = solver.b();
  const double k2 = l * tau + k;
  // continuation path from k to k2 fixes the relative sign
  const int steps = std::max(2, 16 * std::abs(l) + 2);
  const auto sec = build_section(solver, j, k, k2, steps);
  const Eigen::VectorXd& ca = sec.coeffs.front();
  const Eigen::VectorXd& cb = sec.coeffs.back();

  const double center = k / b + 0.5 * l * T;  // both functions live near here
  const double half = std::abs(l) * T * 0.5 + 8.0 / std::sqrt(b) +
                      std::sqrt(2.0 * solver.basis().size() + 1.0) / std::sqrt(b);
  double acc_p = 0.0, acc_m = 0.0;
  const double h = 2.0 * half / grid_points;
  for (int i = 0; i <= grid_points; ++i) {
    const double x = center - half + i * h;
    const double va = eval_psi(solver.basis(), cb, k2, x);
    const double vb = eval_psi(solver.basis(), ca, k, x - l * T);
    const double w = (i == 0 || i == grid_points) ? 0.5 * h : h;
    acc_p += w * (va - vb) * (va - vb);
    acc_m += w * (va + vb) * (va + vb);
  }
  return std::sqrt(std::min(acc_p, acc_m));
}

// Sign holonomy of the section around one period: +-1.
inline int section_holonomy(const BandSolver& solver, int j, double k0, int points = 256) {
  const auto sec = build_section(solver, j, k0, k0 + solver.tau(), points);
  const double closure = sec.coeffs.front().dot(sec.coeffs.back());
  return closure >= 0.0 ? +1 : -1;
}

struct DecayFit {
  std::vector<double> xi;        // probes actually used
  std::vector<double> log_integral;
  std::vector<double> s_of_xi;   // xi^{-2} ln int
  double slope = 0.0;            // fitted xi^2 coefficient, estimates -b
  double residual = 0.0;         // rms fit residual
  int dropped = 0;               // probes lost to integral underflow
};

// Gaussian-decay probe: I(xi) = int_I psi_j(x - xi; k0)^2 dx, fitted with
// ln I = beta xi^2 + gamma xi + delta. The xi-linear term carries the edge
// offset of I; beta alone estimates the xi -> inf limit -b.
inline DecayFit decay_slope(const BandSolver& solver, int j, double k0,
                            double i_lo, double i_hi, const std::vector<double>& xi_list,
                            int quad_points = 64) {
  const double b = solver.b();
  for (double xi : xi_list) {
    if (b * xi * xi > 70.0)
      throw numerics_error("decay_slope: probe outside trustworthy tail (b xi^2 > 70)");
  }
  const Eigen::VectorXd c = solver.solve(k0).eigenvectors.col(j - 1);
  const QuadRule gl = gauss_legendre(quad_points, i_lo, i_hi);
  DecayFit fit;
  for (double xi : xi_list) {
    double acc = 0.0;
    for (int i = 0; i < gl.size(); ++i) {
      const double v = eval_psi(solver.basis(), c, k0, gl.nodes[i] - xi);
      acc += gl.weights[i] * v * v;
    }
    if (!(acc > 1e-290)) {
      ++fit.dropped;  // integral underflow: drop this probe
      continue;
    }
    fit.xi.push_back(xi);
    fit.log_integral.push_back(std::log(acc));
    fit.s_of_xi.push_back(std::log(acc) / (xi * xi));
  }
  const int n = static_cast<int>(fit.xi.size());
  if (n < 4) throw numerics_error("decay_slope: fewer than 4 usable probes");
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = fit.xi[i] * fit.xi[i];
    A(i, 1) = fit.xi[i];
    A(i, 2) = 1.0;
    y[i] = fit.log_integral[i];
  }
  const Eigen::Vector3d beta = A.colPivHouseholderQr().solve(y);
  fit.slope = beta[0];
  fit.residual = std::sqrt((A * beta - y).squaredNorm() / n);
  return fit;
}

}  // namespace magband
