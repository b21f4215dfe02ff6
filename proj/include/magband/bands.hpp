#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "magband/fiber.hpp"

namespace magband {

struct ExtremumPoint {
  double k = 0.0;          // in [0, tau)
  double value = 0.0;      // E_j(k)
  double curvature = 0.0;  // E_j''(k)
  int order = 1;           // 1 = non-degenerate; higher orders not resolved
  bool degenerate = false;
  bool is_max = false;
  // mu_{alpha,j}^{+-} = -+ E''/2, positive for a non-degenerate max/min
  double mu() const { return is_max ? -0.5 * curvature : 0.5 * curvature; }
};

struct BandAnalysis {
  int j = 0;
  std::vector<double> k_grid;
  std::vector<double> values;
  double lower_edge = 0.0;  // E_j^-
  double upper_edge = 0.0;  // E_j^+
  bool constant = false;
  std::vector<ExtremumPoint> minima;  // M_j^-
  std::vector<ExtremumPoint> maxima;  // M_j^+
  std::optional<std::pair<double, double>> gap_above;  // (E_j^+, E_{j+1}^-) if open
};

struct CurvatureResult {
  double value = 0.0;      // E_j''(k)
  double dpsi_norm = 0.0;  // ||d psi~_j / dk||, bounded by ||W'||_inf / b^2
};

// Band functions E_j(k) of the fiber family, with Feynman-Hellmann
// derivatives and a deflated-resolvent curvature. Solves are memoized per k.
class BandSolver {
 public:
  BandSolver(HermiteBasis basis, FourierPotential W, int j_max = 8)
      : basis_(std::move(basis)), W_(std::move(W)), jmax_(j_max) {
    if (jmax_ < 1 || 2 * jmax_ > basis_.size())
      throw config_error("bands.j_max must satisfy 1 <= j_max <= N/2");
  }

  const HermiteBasis& basis() const { return basis_; }
  const FourierPotential& potential() const { return W_; }
  double b() const { return basis_.b(); }
  double tau() const { return basis_.b() * W_.period(); }
  int j_max() const { return jmax_; }

  const FiberSolve& solve(double k) const {
    const auto key = key_of_(k);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto res = solve_fiber(basis_, W_, k, jmax_);
    return cache_.emplace(key, std::move(res)).first->second;
  }

  double energy(int j, double k) const {
    check_band_(j);
    return solve(k).eigenvalues[j - 1];
  }

  // E_j'(k) = (1/b) int W'(x + k/b) psi~_j(x;k)^2 dx  (Feynman-Hellmann)
  double derivative(int j, double k) const {
    check_band_(j);
    const auto& fs = solve(k);
    const Eigen::VectorXd pv = basis_.phi().transpose() * fs.eigenvectors.col(j - 1);
    const double b = basis_.b(), sb = std::sqrt(b);
    double acc = 0.0;
    for (int i = 0; i < basis_.quad_order(); ++i) {
      const double w1 = W_.eval(basis_.rule().nodes[i] / sb + k / b, 1);
      acc += basis_.rule().weights[i] * w1 * pv[i] * pv[i];
    }
    return acc / b;
  }

  // E_j''(k) = (1/b^2) int W'' psi~^2 + (2/b) int W' (d_k psi~) psi~ with
  // d_k psi~ = -(1/b) (h~(k)-E_j)^{-1} (I - pi~_j) W' psi~, evaluated by a
  // deflated solve through the full eigendecomposition.
  CurvatureResult curvature(int j, double k) const {
    check_band_(j);
    const Eigen::MatrixXd M = assemble_fiber_matrix(basis_, W_, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success) throw numerics_error("curvature: eigensolver failed");
    const int N = basis_.size(), Q = basis_.quad_order();
    const Eigen::VectorXd& E = es.eigenvalues();
    const Eigen::VectorXd c = es.eigenvectors().col(j - 1);
    const double b = basis_.b(), sb = std::sqrt(b);
    const Eigen::VectorXd pv = basis_.phi().transpose() * c;

    Eigen::VectorXd w1(Q), w2(Q);
    for (int i = 0; i < Q; ++i) {
      const double x = basis_.rule().nodes[i] / sb + k / b;
      const double wq = basis_.rule().weights[i];
      w1[i] = wq * W_.eval(x, 1);
      w2[i] = wq * W_.eval(x, 2);
    }
    // u_m = <chi_m, W' psi~>
    const Eigen::VectorXd u = basis_.phi() * w1.cwiseProduct(pv).eval();
    Eigen::VectorXd uperp = u - (c.dot(u)) * c;
    Eigen::VectorXd coef = es.eigenvectors().transpose() * uperp;
    const double gap_floor = 1e-10 * std::max(1.0, std::abs(E[j - 1]));
    for (int l = 0; l < N; ++l) {
      if (l == j - 1) {
        coef[l] = 0.0;
        continue;
      }
      const double d = E[l] - E[j - 1];
      if (std::abs(d) < gap_floor)
        throw numerics_error("curvature: near-singular deflated solve (spectral collision)");
      coef[l] /= d;
    }
    const Eigen::VectorXd v = -(1.0 / b) * (es.eigenvectors() * coef);
    const double term1 = w2.dot(pv.cwiseProduct(pv)) / (b * b);
    const double term2 = (2.0 / b) * u.dot(v);
    return {term1 + term2, v.norm()};
  }

  // All roots of E_j' in [0, tau): 512-point grid, sign changes, bisection.
  std::vector<ExtremumPoint> critical_points(int j, int grid_size = 512) const {
    check_band_(j);
    const double tau = this->tau();
    std::vector<double> ks(grid_size), dv(grid_size);
    for (int i = 0; i < grid_size; ++i) {
      ks[i] = tau * i / grid_size;
      dv[i] = derivative(j, ks[i]);
    }
    std::vector<ExtremumPoint> out;
    for (int i = 0; i < grid_size; ++i) {
      const double k1 = ks[i];
      const double k2 = (i + 1 < grid_size) ? ks[i + 1] : tau;
      const double d1 = dv[i];
      const double d2 = (i + 1 < grid_size) ? dv[i + 1] : dv[0];
      double kr;
      if (d1 == 0.0) {
        kr = k1;
      } else if (d1 * d2 < 0.0) {
        kr = bisect_derivative_(j, k1, k2, d1);
      } else {
        continue;
      }
      // critical points are tau-periodic: drop duplicates straddling the seam
      bool duplicate = false;
      for (const auto& seen : out) {
        double d = std::abs(kr - seen.k);
        d = std::min(d, tau - d);
        if (d < 1e-8 * tau) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      ExtremumPoint e;
      e.k = kr;
      e.value = energy(j, kr);
      e.curvature = curvature(j, kr).value;
      out.push_back(e);
    }
    return out;
  }

  struct ExtremaSets {
    std::vector<ExtremumPoint> minima, maxima;
    double lower_edge = 0.0, upper_edge = 0.0;
  };

  // Global minimum/maximum sets M_j^-/M_j^+ with non-degeneracy
  // classification. Constant bands are refused.
  ExtremaSets locate_extrema(int j, int grid_size = 512) const {
    check_band_(j);
    const double tau = this->tau();
    double lo = energy(j, 0.0), hi = lo;
    for (int i = 1; i < 64; ++i) {
      const double v = energy(j, tau * i / 64.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi)))
      throw numerics_error("locate_extrema: band is constant (no isolated extrema)");
    auto crit = critical_points(j, grid_size);
    if (crit.empty()) throw numerics_error("locate_extrema: no critical points located");
    ExtremaSets sets;
    sets.lower_edge = crit[0].value;
    sets.upper_edge = crit[0].value;
    for (const auto& e : crit) {
      sets.lower_edge = std::min(sets.lower_edge, e.value);
      sets.upper_edge = std::max(sets.upper_edge, e.value);
    }
    const double width = sets.upper_edge - sets.lower_edge;
    const double vtol = std::max(1e-10 * width,
                                 4.0 * std::numeric_limits<double>::epsilon() * std::abs(sets.upper_edge));
    const double eps_deg = 1e-6 * width / (tau * tau);
    for (auto e : crit) {
      e.degenerate = std::abs(e.curvature) <= eps_deg;
      if (e.value >= sets.upper_edge - vtol) {
        e.is_max = true;
        sets.maxima.push_back(e);
      } else if (e.value <= sets.lower_edge + vtol) {
        e.is_max = false;
        sets.minima.push_back(e);
      }
    }
    return sets;
  }

  // Per-band edges, extrema and the gap list for j = 1..j_max.
  std::vector<BandAnalysis> band_edges_and_gaps(int j_count, int grid_size = 512) const {
    if (j_count < 1 || j_count > jmax_)
      throw config_error("band_edges_and_gaps: j_count out of range");
    std::vector<BandAnalysis> out(j_count);
    const double tau = this->tau();
    for (int i = 0; i < grid_size; ++i) {
      const double k = tau * i / grid_size;
      const auto& fs = solve(k);
      for (int j = 1; j <= j_count; ++j) {
        if (i == 0) {
          out[j - 1].j = j;
          out[j - 1].k_grid.reserve(grid_size);
          out[j - 1].values.reserve(grid_size);
        }
        out[j - 1].k_grid.push_back(k);
        out[j - 1].values.push_back(fs.eigenvalues[j - 1]);
      }
    }
    for (int j = 1; j <= j_count; ++j) {
      auto& bnd = out[j - 1];
      const auto [mn, mx] = std::minmax_element(bnd.values.begin(), bnd.values.end());
      bnd.lower_edge = *mn;
      bnd.upper_edge = *mx;
      bnd.constant = (*mx - *mn) <=
                     64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(*mx));
      if (!bnd.constant) {
        auto sets = locate_extrema(j, grid_size);
        bnd.lower_edge = std::min(bnd.lower_edge, sets.lower_edge);
        bnd.upper_edge = std::max(bnd.upper_edge, sets.upper_edge);
        bnd.minima = std::move(sets.minima);
        bnd.maxima = std::move(sets.maxima);
      }
    }
    for (int j = 0; j + 1 < j_count; ++j) {
      if (out[j].upper_edge < out[j + 1].lower_edge)
        out[j].gap_above = std::make_pair(out[j].upper_edge, out[j + 1].lower_edge);
    }
    return out;
  }

 private:
  void check_band_(int j) const {
    if (j < 1 || j > jmax_) throw config_error("band index j out of configured range");
  }

  double bisect_derivative_(int j, double a, double b, double fa) const {
    for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = derivative(j, m);
      if (fm == 0.0) return m;
      if (fa * fm < 0.0) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    return 0.5 * (a + b);
  }

  static std::uint64_t key_of_(double k) {
    std::uint64_t u;
    std::memcpy(&u, &k, sizeof(u));
    return u;
  }

  HermiteBasis basis_;
  FourierPotential W_;
  int jmax_;
  mutable std::map<std::uint64_t, FiberSolve> cache_;
};

}  // namespace magband
