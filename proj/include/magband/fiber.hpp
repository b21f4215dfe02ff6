#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "magband/errors.hpp"
#include "magband/hermite.hpp"
#include "magband/potential.hpp"
#include "magband/quadrature.hpp"

namespace magband {

// Scaled harmonic-oscillator basis chi_n(x) = b^{1/4} phi_{n+1}(sqrt(b) x),
// n = 0..N-1, which diagonalizes -d^2/dx^2 + b^2 x^2 with eigenvalues
// b(2n+1). Only the potential term needs quadrature; the stored Gauss-Hermite
// rule is in modified-weight form and phi values at the nodes are cached.
class HermiteBasis {
 public:
  HermiteBasis(double b, int size, int quad_order)
      : b_(b), N_(size), Q_(quad_order), rule_(gauss_hermite(quad_order)) {
    if (!(b > 0.0)) throw config_error("basis: field b must be positive");
    if (N_ < 1) throw config_error("basis.N must be >= 1");
    if (Q_ < 2 * N_) throw config_error("basis.Q must be >= 2N");
    phi_.resize(N_, Q_);
    std::vector<double> col(N_);
    for (int i = 0; i < Q_; ++i) {
      hermite_fn_all(N_, rule_.nodes[i], col.data());
      for (int n = 0; n < N_; ++n) phi_(n, i) = col[n];
    }
  }

  double b() const { return b_; }
  int size() const { return N_; }
  int quad_order() const { return Q_; }
  const QuadRule& rule() const { return rule_; }
  const Eigen::MatrixXd& phi() const { return phi_; }

  // max |<chi_m, chi_n> - delta_mn| under the stored quadrature
  double gram_deviation() const {
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule_.weights.data(), Q_);
    Eigen::MatrixXd G = phi_ * w.asDiagonal() * phi_.transpose();
    G.diagonal().array() -= 1.0;
    return G.cwiseAbs().maxCoeff();
  }

  // integral of g(y) * psi_a(y) * psi_b(y) dy for psi given by coefficient
  // vectors, with g sampled at the quadrature nodes
  // (everything lives in the scaled variable y = sqrt(b) x).

 private:
  double b_;
  int N_, Q_;
  QuadRule rule_;
  Eigen::MatrixXd phi_;  // N x Q, phi_(n,i) = phi_{n+1}(node_i)
};

// Matrix of h~(k) = -d^2/dx^2 + b^2 x^2 + W(x + k/b):
//   M_mn = b(2n+1) delta_mn + int W(y/sqrt(b) + k/b) phi_{m+1} phi_{n+1} dy.
inline Eigen::MatrixXd assemble_fiber_matrix(const HermiteBasis& basis,
                                             const FourierPotential& W,
                                             double k) {
  const int N = basis.size(), Q = basis.quad_order();
  const double b = basis.b(), sb = std::sqrt(b);
  Eigen::VectorXd wv(Q);
  for (int i = 0; i < Q; ++i)
    wv[i] = basis.rule().weights[i] * W.eval(basis.rule().nodes[i] / sb + k / b);
  Eigen::MatrixXd M = basis.phi() * wv.asDiagonal() * basis.phi().transpose();
  M = 0.5 * (M + M.transpose()).eval();
  for (int n = 0; n < N; ++n) M(n, n) += b * (2 * n + 1);
  return M;
}

// h(k) = -d^2/dx^2 + (bx - k)^2 + W(x) in the *uncentered* basis chi_n(x):
// gauge cross-check target for the unitary equivalence with h~(k).
// (bx-k)^2 = b y^2 - 2 sqrt(b) k y + k^2 in the scaled variable.
inline Eigen::MatrixXd assemble_fiber_matrix_unshifted(const HermiteBasis& basis,
                                                       const FourierPotential& W,
                                                       double k) {
  const int N = basis.size(), Q = basis.quad_order();
  const double b = basis.b(), sb = std::sqrt(b);
  Eigen::VectorXd wv(Q);
  for (int i = 0; i < Q; ++i)
    wv[i] = basis.rule().weights[i] * W.eval(basis.rule().nodes[i] / sb);
  Eigen::MatrixXd M = basis.phi() * wv.asDiagonal() * basis.phi().transpose();
  M = 0.5 * (M + M.transpose()).eval();
  for (int n = 0; n < N; ++n) {
    M(n, n) += b * (2 * n + 1) + k * k;
    // -2 sqrt(b) k <m|y|n>: <n|y|n+1> = sqrt((n+1)/2)
    if (n + 1 < N) {
      const double t = -2.0 * sb * k * std::sqrt((n + 1) / 2.0);
      M(n, n + 1) += t;
      M(n + 1, n) += t;
    }
  }
  return M;
}

struct FiberSolve {
  double k = 0.0;
  Eigen::VectorXd eigenvalues;   // ascending, E_1..E_J
  Eigen::MatrixXd eigenvectors;  // N x J, Hermite-basis coefficients
};

// Lowest J eigenpairs of a symmetric fiber matrix. The 1D fiber operator has
// simple spectrum; a collision below tolerance signals a basis/input problem.
inline FiberSolve eigenpairs(const Eigen::MatrixXd& M, int J, double k = 0.0) {
  const int N = static_cast<int>(M.rows());
  if (J < 1 || 2 * J > N)
    throw numerics_error("eigenpairs: need 1 <= J <= N/2 (upper half of the truncated spectrum is unreliable)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw numerics_error("eigenpairs: eigensolver failed");
  FiberSolve out;
  out.k = k;
  out.eigenvalues = es.eigenvalues().head(J);
  out.eigenvectors = es.eigenvectors().leftCols(J);
  const double scale = std::max(1.0, std::abs(out.eigenvalues[J - 1]));
  for (int j = 0; j + 1 < J; ++j) {
    if (out.eigenvalues[j + 1] - out.eigenvalues[j] <= 1e-12 * scale) {
      std::ostringstream os;
      os << "eigenpairs: near-degenerate pair (E_" << (j + 1) << ", E_" << (j + 2)
         << ") at k=" << k << "; spectrum of the fiber operator is simple";
      throw numerics_error(os.str());
    }
  }
  return out;
}

inline FiberSolve solve_fiber(const HermiteBasis& basis, const FourierPotential& W,
                              double k, int J) {
  return eigenpairs(assemble_fiber_matrix(basis, W, k), J, k);
}

// Entry-wise quadrature stability: largest change of the potential block when
// the quadrature order doubles.
inline double quadrature_drift(const HermiteBasis& basis, const FourierPotential& W,
                               double k) {
  HermiteBasis fine(basis.b(), basis.size(), 2 * basis.quad_order());
  Eigen::MatrixXd a = assemble_fiber_matrix(basis, W, k);
  Eigen::MatrixXd b2 = assemble_fiber_matrix(fine, W, k);
  return (a - b2).cwiseAbs().maxCoeff();
}

// Smallest basis size N (doubling from N0) with |E_j^{(N)} - E_j^{(2N)}| <
// eps for all j <= J over a probe k-grid.
inline int converge_basis(double b, const FourierPotential& W, int J, double eps,
                          int N0 = 16, int Nmax = 512, int probe_points = 8,
                          int quad_factor = 4) {
  if (!(eps > 0.0))
    throw numerics_error("converge_basis: tolerance must be positive (eps = 0 never converges)");
  const double tau = b * W.period();
  std::vector<double> probes(probe_points);
  for (int i = 0; i < probe_points; ++i) probes[i] = tau * i / probe_points;
  int N = std::max(N0, 2 * J);
  while (N <= Nmax) {
    HermiteBasis coarse(b, N, quad_factor * N);
    HermiteBasis fine(b, 2 * N, quad_factor * 2 * N);
    double worst = 0.0;
    for (double k : probes) {
      const auto a = solve_fiber(coarse, W, k, J);
      const auto c = solve_fiber(fine, W, k, J);
      worst = std::max(worst, (a.eigenvalues - c.eigenvalues).cwiseAbs().maxCoeff());
    }
    if (worst < eps) return N;
    N *= 2;
  }
  std::ostringstream os;
  os << "converge_basis: no convergence to " << eps << " by N = " << Nmax;
  throw numerics_error(os.str());
}

}  // namespace magband
