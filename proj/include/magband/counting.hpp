#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include "magband/bands.hpp"
#include "magband/eigenfield.hpp"
#include "magband/specutil.hpp"

namespace magband {

// Ent(t) = min{ l in N : l >= t }. The 1e-9 relative slack absorbs double
// roundoff when t lands on an integer (the geometries of interest hit t = 1).
inline int ent(double t) {
  if (!(t > 0.0)) throw numerics_error("ent: argument must be positive");
  const double adj = t - 1e-9 * std::max(1.0, std::abs(t));
  return std::max(1, static_cast<int>(std::ceil(adj)));
}

struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  double amplitude = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

struct Envelope {
  double C0 = 0.0, m1 = 0.0, m2 = 0.0;
};

// Non-negative compactly supported perturbation: a union of weighted
// rectangles with pairwise disjoint interiors (so the tensor quadratures
// below tile the support).
class PerturbationV {
 public:
  explicit PerturbationV(std::vector<Rect> rects, std::optional<Envelope> env = {})
      : rects_(std::move(rects)), envelope_(env) {
    for (const auto& r : rects_) {
      if (!(r.x1 > r.x0) || !(r.y1 > r.y0))
        throw config_error("perturbation.rectangles: intervals must have positive length");
      if (!(r.amplitude > 0.0))
        throw config_error("perturbation.rectangles: amplitude must be positive");
    }
    for (std::size_t i = 0; i < rects_.size(); ++i)
      for (std::size_t j = i + 1; j < rects_.size(); ++j)
        if (overlap_(rects_[i], rects_[j]))
          throw config_error("perturbation.rectangles: interiors must be disjoint");
    if (envelope_) check_envelope_();
  }

  const std::vector<Rect>& rects() const { return rects_; }
  bool empty() const { return rects_.empty(); }

  double value(double x, double y) const {
    double v = 0.0;
    for (const auto& r : rects_)
      if (x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1) v += r.amplitude;
    return v;
  }

  // smallest rectangle R_+ containing the support
  Rect bounding() const {
    if (rects_.empty()) throw numerics_error("perturbation support is empty");
    Rect b = rects_[0];
    b.amplitude = c_plus();
    for (const auto& r : rects_) {
      b.x0 = std::min(b.x0, r.x0);
      b.x1 = std::max(b.x1, r.x1);
      b.y0 = std::min(b.y0, r.y0);
      b.y1 = std::max(b.y1, r.y1);
    }
    return b;
  }

  double c_plus() const {
    double m = 0.0;
    for (const auto& r : rects_) m = std::max(m, r.amplitude);
    return m;
  }

  // rectangle carrying the tallest vertical chord (lower-bound construction)
  const Rect& best_chord_rect() const {
    if (rects_.empty()) throw numerics_error("perturbation support is empty");
    const Rect* best = &rects_[0];
    for (const auto& r : rects_)
      if (r.height() > best->height()) best = &r;
    return *best;
  }

 private:
  static bool overlap_(const Rect& a, const Rect& b) {
    return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
  }

  void check_envelope_() const {
    const auto& e = *envelope_;
    if (!(e.C0 >= 0.0) || !(e.m1 > 0.0) || !(e.m2 > 0.0))
      throw config_error("perturbation.envelope: need C0 >= 0, m1 > 0, m2 > 0");
    for (const auto& r : rects_) {
      const double ax = std::max(std::abs(r.x0), std::abs(r.x1));
      const double ay = std::max(std::abs(r.y0), std::abs(r.y1));
      const double cap = e.C0 * std::pow(1.0 + ax, -e.m1) * std::pow(1.0 + ay, -e.m2);
      if (r.amplitude > cap + 1e-12)
        throw config_error("perturbation.envelope violated at a rectangle corner");
    }
  }

  std::vector<Rect> rects_;
  std::optional<Envelope> envelope_;
};

// Geometric constant of the accumulation law's lower bound: best vertical
// chord per rectangle through Ent. Cross-rectangle chords in unions are not
// detected (per-rectangle restriction).
inline double capacity(const PerturbationV& V, double b, double period) {
  if (V.empty()) throw numerics_error("capacity: empty support");
  double best = 0.0;
  for (const auto& r : V.rects())
    best = std::max(best, 1.0 / ent(2.0 * M_PI / (b * period * r.height())));
  return best;
}

// Effective model at the top of band j: the non-degenerate maxima
// (k_alpha, mu_alpha), their eigenvector coefficients, and truncation and
// quadrature parameters shared by the counting operators. Owns a copy of the
// basis so the model outlives the solver it was built from.
struct EffectiveModel {
  int j = 0;
  double b = 0.0, period = 0.0, tau = 0.0;
  std::vector<ExtremumPoint> maxima;        // M_j^+, all non-degenerate
  std::vector<Eigen::VectorXd> psi_coeffs;  // eigenvector at each k_alpha
  std::shared_ptr<const HermiteBasis> basis;
  int L = 8;       // lattice truncation |l| <= L
  int quad_x = 64; // GL order for x-integrals per rectangle

  int A() const { return static_cast<int>(maxima.size()); }
  int block() const { return 2 * L + 1; }
  int dim() const { return block() * A(); }
  int flat(int l, int a) const { return (l + L) * A() + a; }

  double psi(int a, double k_shifted_x) const {
    return eval_psi(*basis, psi_coeffs[a], maxima[a].k, k_shifted_x);
  }
};

// Adaptive lattice cutoff from the Gaussian decay: keep l while
// exp(-b (lT)^2 (1-margin)) * scale clears threshold^2/10.
inline int adaptive_lattice_cutoff(double b, double period, double scale,
                                   double threshold, double margin = 0.2) {
  const double lhs = std::log(10.0 * std::max(scale, 1e-300)) -
                     2.0 * std::log(std::max(threshold, 1e-300));
  if (lhs <= 0.0) return 4;
  const int L = static_cast<int>(std::ceil(
                    std::sqrt(lhs / (b * period * period * (1.0 - margin))))) + 1;
  return std::min(std::max(L, 4), 64);
}

inline EffectiveModel make_effective_model(const BandSolver& solver, int j,
                                           double lambda_min, const PerturbationV& V,
                                           int grid_size = 512, int quad_x = 64) {
  EffectiveModel m;
  m.j = j;
  m.b = solver.b();
  m.period = solver.potential().period();
  m.tau = solver.tau();
  m.basis = std::make_shared<HermiteBasis>(solver.basis());
  m.quad_x = quad_x;
  auto sets = solver.locate_extrema(j, grid_size);
  for (const auto& e : sets.maxima) {
    if (e.degenerate)
      throw numerics_error("effective model: degenerate band maximum; counting refuses it");
    m.maxima.push_back(e);
    m.psi_coeffs.push_back(solver.solve(e.k).eigenvectors.col(j - 1));
  }
  if (m.maxima.empty()) throw numerics_error("effective model: no band maxima found");
  double mu_min = m.maxima[0].mu();
  for (const auto& e : m.maxima) mu_min = std::min(mu_min, e.mu());
  const Rect box = V.bounding();
  const double scale = box.amplitude * box.height() / std::sqrt(mu_min);
  m.L = adaptive_lattice_cutoff(m.b, m.period, scale, 2.0 * std::sqrt(lambda_min));
  return m;
}

namespace detail {

inline std::complex<double> segment_phase_integral(double omega, double y0, double y1) {
  // int_{y0}^{y1} e^{-i omega y} dy
  if (omega == 0.0) return {y1 - y0, 0.0};
  const std::complex<double> i(0.0, 1.0);
  return (std::exp(-i * omega * y1) - std::exp(-i * omega * y0)) / (-i * omega);
}

// per-rectangle x-profiles: P[a][l+L] = psi_j(x_i - l T; k_alpha) on GL nodes
struct RectProfiles {
  QuadRule gl;
  std::vector<std::vector<Eigen::VectorXd>> P;  // [A][2L+1] -> nodes
};

inline RectProfiles rect_profiles(const EffectiveModel& m, const Rect& r) {
  RectProfiles rp;
  rp.gl = gauss_legendre(m.quad_x, r.x0, r.x1);
  rp.P.assign(m.A(), std::vector<Eigen::VectorXd>(m.block()));
  for (int a = 0; a < m.A(); ++a) {
    for (int l = -m.L; l <= m.L; ++l) {
      Eigen::VectorXd col(rp.gl.size());
      for (int i = 0; i < rp.gl.size(); ++i)
        col[i] = m.psi(a, rp.gl.nodes[i] - l * m.period);
      rp.P[a][l + m.L] = std::move(col);
    }
  }
  return rp;
}

}  // namespace detail

// Gram matrix G2* G2 over (l, alpha):
//  (mu_a mu_b)^{-1/4} iint V psi_j(x-lT;k_a) psi_j(x-mT;k_b)
//                          e^{-i y((l-m)tau + k_a - k_b)} dx dy.
// The x-factor is Gauss-Legendre per rectangle; the y-factor is elementary
// and computed in closed form (exact zeros at resonant rectangle heights).
inline Eigen::MatrixXcd gram_G2(const EffectiveModel& m, const PerturbationV& V) {
  const int n = m.dim();
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& r : V.rects()) {
    const auto rp = detail::rect_profiles(m, r);
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rp.gl.weights.data(), rp.gl.size());
    for (int a = 0; a < m.A(); ++a) {
      for (int b2 = 0; b2 < m.A(); ++b2) {
        const double mu_pref =
            std::pow(m.maxima[a].mu() * m.maxima[b2].mu(), -0.25);
        for (int l = -m.L; l <= m.L; ++l) {
          for (int mm = -m.L; mm <= m.L; ++mm) {
            const double xint =
                w.dot(rp.P[a][l + m.L].cwiseProduct(rp.P[b2][mm + m.L]));
            const double omega =
                (l - mm) * m.tau + m.maxima[a].k - m.maxima[b2].k;
            G(m.flat(l, a), m.flat(mm, b2)) +=
                r.amplitude * mu_pref * xint *
                detail::segment_phase_integral(omega, r.y0, r.y1);
          }
        }
      }
    }
  }
  G = 0.5 * (G + G.adjoint()).eval();
  return G;
}

// n_*(sqrt(2 sqrt(lambda)); G2) = n_+(2 sqrt(lambda); G2*G2).
// Above the dense eigensolver floor (1e-12 ||gram||_F) this is a plain
// eigencount. Below it the count is still certified when the off-diagonal
// mass provably cannot move any eigenvalue across the threshold (Weyl with
// the off-diagonal Frobenius norm); otherwise the floor error fires.
inline int count_G2(double lambda, const Eigen::MatrixXcd& gram) {
  if (!(lambda > 0.0)) throw numerics_error("count_G2: lambda must be positive");
  const double thr = 2.0 * std::sqrt(lambda);
  const double fro = gram.norm();
  if (thr >= 1e-12 * fro) return count_pos(thr, gram);
  Eigen::MatrixXcd off = gram;
  off.diagonal().setZero();
  const double shift = off.norm();
  int count = 0;
  for (int i = 0; i < gram.rows(); ++i) {
    const double d = gram(i, i).real();
    if (std::abs(d - thr) <= shift) {
      std::ostringstream os;
      os << "count_G2: 2 sqrt(lambda) = " << thr
         << " is below the eigensolver noise floor " << 1e-12 * fro
         << " and the diagonal certificate fails near entry " << i;
      throw numerics_error(os.str());
    }
    if (d > thr) ++count;
  }
  return count;
}

// Nystrom matrix of the explicit M1(lambda) kernel on supp V:
//   sqrt(V V') sum_{l,a} e^{-sqrt(lambda/mu_a) |y-y'|} / (2 sqrt(mu_a lambda))
//              e^{i(l tau + k_a)(y-y')} psi_j(x-lT;k_a) psi_j(x'-lT;k_a).
inline Eigen::MatrixXcd m1_nystrom(const EffectiveModel& m, const PerturbationV& V,
                                   double lambda, int nx, int ny) {
  if (!(lambda > 0.0)) throw numerics_error("m1_nystrom: lambda must be positive");
  // tiled nodes over the rectangles
  std::vector<double> px, py, pw;
  for (const auto& r : V.rects()) {
    const QuadRule gx = gauss_legendre(nx, r.x0, r.x1);
    const QuadRule gy = gauss_legendre(ny, r.y0, r.y1);
    for (int i = 0; i < nx; ++i)
      for (int k = 0; k < ny; ++k) {
        px.push_back(gx.nodes[i]);
        py.push_back(gy.nodes[k]);
        pw.push_back(gx.weights[i] * gy.weights[k]);
      }
  }
  const int n = static_cast<int>(px.size());
  Eigen::VectorXd sqv(n);
  for (int i = 0; i < n; ++i)
    sqv[i] = std::sqrt(pw[i] * V.value(px[i], py[i]));
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n, n);
  const std::complex<double> iu(0.0, 1.0);
  for (int a = 0; a < m.A(); ++a) {
    const double mu = m.maxima[a].mu();
    const double ka = m.maxima[a].k;
    const double decay = std::sqrt(lambda / mu);
    const double pref = 1.0 / (2.0 * std::sqrt(mu * lambda));
    for (int l = -m.L; l <= m.L; ++l) {
      Eigen::VectorXd psi_vals(n);
      for (int i = 0; i < n; ++i) psi_vals[i] = m.psi(a, px[i] - l * m.period);
      const double freq = l * m.tau + ka;
      for (int i = 0; i < n; ++i) {
        if (psi_vals[i] == 0.0) continue;
        for (int k = 0; k <= i; ++k) {
          const double dy = py[i] - py[k];
          K(i, k) += pref * psi_vals[i] * psi_vals[k] *
                     std::exp(-decay * std::abs(dy)) * std::exp(iu * freq * dy);
        }
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) K(i, k) = std::conj(K(k, i));
  return sqv.asDiagonal() * K * sqv.asDiagonal();
}

// eigencount n_+(s^2; .) of the M1 Nystrom matrix; s = 1 default.
inline int count_M1(const EffectiveModel& m, const PerturbationV& V, double lambda,
                    int nx, int ny, double s = 1.0) {
  return count_pos(s * s, m1_nystrom(m, V, lambda, nx, ny));
}

// Diagonal comparison tables. nu_plus over (l, alpha) bounds the Gram from
// above after Cauchy-Schwarz on the bounding rectangle R+; nu_minus over m
// bounds it from below through the inscribed rectangle R- of chord q:
//   nu+_{l,a} = |J+| sum_b mu_b^{-1/2} sum_m (m^2+1)^{-1} (l^2+1)
//               int_{I+} psi_j(x-lT;k_a)^2 dx            (scaled by C+)
//   nu-_m     = 2 pi / (tau L sqrt(mu_1)) int_{I-} psi_j(x-mLT;k_1)^2 dx
//               with L = Ent(2 pi/(tau q))               (scaled by C-)
struct NuTables {
  std::vector<double> nu_plus;   // flat (l, alpha) indexing per EffectiveModel
  std::vector<double> nu_minus;  // index by m, |m| <= M
  std::vector<int> ms;
  int L_q = 1;
  double chord = 0.0;
  double nu0_plus = 0.0, nu0_minus = 0.0;  // l = 0 (resp. m = 0) scale entries
};

namespace detail {

// sum_{m in Z} (m^2+1)^{-1} by partial sum + arctan tail (residual < 1e-10)
inline double lattice_weight_sum() {
  double s = 1.0;
  const int M = 4000;
  for (int m2 = 1; m2 <= M; ++m2) s += 2.0 / (m2 * static_cast<double>(m2) + 1.0);
  s += 2.0 * (M_PI / 2.0 - std::atan(M + 0.5));
  return s;
}

inline double x_mass(const EffectiveModel& m, int a, double shift, double x0, double x1) {
  const QuadRule gl = gauss_legendre(m.quad_x, x0, x1);
  double acc = 0.0;
  for (int i = 0; i < gl.size(); ++i) {
    const double v = m.psi(a, gl.nodes[i] - shift);
    acc += gl.weights[i] * v * v;
  }
  return acc;
}

}  // namespace detail

inline NuTables nu_bounds(const EffectiveModel& m, const PerturbationV& V) {
  if (V.empty()) throw numerics_error("nu_bounds: empty support");
  NuTables t;
  const Rect rp = V.bounding();
  const double c_plus = V.c_plus();
  const double wsum = detail::lattice_weight_sum();
  double mu_sum = 0.0;
  for (const auto& e : m.maxima) mu_sum += 1.0 / std::sqrt(e.mu());
  t.nu_plus.assign(m.dim(), 0.0);
  for (int l = -m.L; l <= m.L; ++l)
    for (int a = 0; a < m.A(); ++a) {
      const double mass = detail::x_mass(m, a, l * m.period, rp.x0, rp.x1);
      t.nu_plus[m.flat(l, a)] =
          c_plus * rp.height() * mu_sum * wsum * (l * l + 1.0) * mass;
    }
  t.nu0_plus = t.nu_plus[m.flat(0, 0)];

  const Rect& rm = V.best_chord_rect();
  t.chord = rm.height();
  t.L_q = ent(2.0 * M_PI / (m.tau * t.chord));
  const double mu1 = m.maxima[0].mu();
  const double pref = rm.amplitude * 2.0 * M_PI / (m.tau * t.L_q * std::sqrt(mu1));
  const int Mmax = std::max(1, m.L / t.L_q + 2);
  for (int mm = -Mmax; mm <= Mmax; ++mm) {
    t.ms.push_back(mm);
    t.nu_minus.push_back(
        pref * detail::x_mass(m, 0, mm * t.L_q * m.period, rm.x0, rm.x1));
    if (mm == 0) t.nu0_minus = t.nu_minus.back();
  }
  return t;
}

inline int count_above(const std::vector<double>& table, double thr) {
  int n = 0;
  for (double v : table)
    if (v > thr) ++n;
  return n;
}

// Birman-Schwinger count at E inside the gap above band j:
// n_-(1; V^{1/2} (H0 - E)^{-1} V^{1/2}) with the resolvent kernel summed over
// bands 1..j_count, the k-line unfolded through the lattice translation
// identity, and a Nystrom grid tiling supp V.
struct BsOptions {
  int j_count = 12;   // bands kept in the resolvent
  int k_points = 32;  // GL nodes per period
  int l_max = 8;      // lattice unfolding |l| <= l_max
  int nx = 16, ny = 48;
  double tail_budget = 0.5;  // combined truncation estimate must stay below
};

inline int bs_oracle(const BandSolver& solver, const PerturbationV& V, double E,
                     double gap_lo, double gap_hi, const BsOptions& opt = {}) {
  if (!(E - gap_lo > 1e-8) || !(gap_hi - E > 1e-8))
    throw numerics_error("bs_oracle: E must lie strictly inside the gap (margin 1e-8)");
  if (opt.j_count > solver.j_max())
    throw config_error("bs_oracle: j_count exceeds configured j_max");
  const double b = solver.b(), tau = solver.tau(), T = solver.potential().period();

  // band-tail estimate: ||V|| / dist(E, bottom of band j_count+1)
  const double next_band = b * (2.0 * (opt.j_count + 1) - 1.0) - solver.potential().sup_norm(0);
  if (next_band <= E)
    throw numerics_error("bs_oracle: j_count too small for this energy");
  double tail = V.c_plus() / (next_band - E);

  const QuadRule gk = gauss_legendre(opt.k_points, 0.0, tau);
  std::vector<Eigen::VectorXd> Ej(opt.k_points);
  std::vector<Eigen::MatrixXd> Uj(opt.k_points);
  for (int q = 0; q < opt.k_points; ++q) {
    const auto& fs = solver.solve(gk.nodes[q]);
    Ej[q] = fs.eigenvalues.head(opt.j_count);
    Uj[q] = fs.eigenvectors.leftCols(opt.j_count);
  }

  std::vector<double> px, py, pw;
  for (const auto& r : V.rects()) {
    const QuadRule gx = gauss_legendre(opt.nx, r.x0, r.x1);
    const QuadRule gy = gauss_legendre(opt.ny, r.y0, r.y1);
    for (int i = 0; i < opt.nx; ++i)
      for (int k = 0; k < opt.ny; ++k) {
        px.push_back(gx.nodes[i]);
        py.push_back(gy.nodes[k]);
        pw.push_back(gx.weights[i] * gy.weights[k]);
      }
  }
  const int n = static_cast<int>(px.size());
  Eigen::VectorXd sqv(n);
  for (int i = 0; i < n; ++i)
    sqv[i] = std::sqrt(pw[i] * V.value(px[i], py[i]));

  const int nf = opt.j_count * (2 * opt.l_max + 1) * opt.k_points;
  Eigen::MatrixXcd C(n, nf);
  Eigen::VectorXd D(nf);
  const std::complex<double> iu(0.0, 1.0);
  // per-l feature weight, used for the lattice-tail estimate
  std::vector<double> l_weight(2 * opt.l_max + 1, 0.0);
  int col = 0;
  for (int j = 0; j < opt.j_count; ++j)
    for (int l = -opt.l_max; l <= opt.l_max; ++l)
      for (int q = 0; q < opt.k_points; ++q, ++col) {
        const double kq = gk.nodes[q];
        const double wq = std::sqrt(gk.weights[q] / (2.0 * M_PI));
        double colsq = 0.0;
        for (int i = 0; i < n; ++i) {
          const double psi = eval_psi(solver.basis(), Uj[q].col(j), kq, px[i] - l * T);
          const std::complex<double> val =
              sqv[i] * psi * std::exp(iu * ((l * tau + kq) * py[i])) * wq;
          C(i, col) = val;
          colsq += std::norm(val);
        }
        D[col] = 1.0 / (Ej[q][j] - E);
        l_weight[l + opt.l_max] += colsq / std::abs(Ej[q][j] - E);
      }
  // lattice-tail estimate by geometric extension of the outermost shells;
  // shells at the evaluation noise floor (negligible vs the total weight)
  // certify the truncation directly
  const double edge = l_weight.front() + l_weight.back();
  const double inner = l_weight[1] + l_weight[2 * opt.l_max - 1];
  double total = 0.0;
  for (double w : l_weight) total += w;
  if (edge <= 1e-9 * total) {
    tail += 2.0 * edge;
  } else if (inner > 0.0 && edge > 0.0) {
    const double ratio = edge / inner;
    if (ratio < 0.9) tail += edge * ratio / (1.0 - ratio);
    else tail += 1e9;  // decay not yet geometric: truncation unsafe
  }
  if (tail > opt.tail_budget) {
    std::ostringstream os;
    os << "bs_oracle: truncation tail estimate " << tail << " exceeds budget "
       << opt.tail_budget << " (raise j_count / l_max)";
    throw numerics_error(os.str());
  }
  const Eigen::MatrixXcd A = C * D.asDiagonal() * C.adjoint();
  return count_neg(1.0, A);
}

struct GaussianFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms
};

// Least-squares line N ~ slope sqrt(|ln lambda|) + intercept.
inline GaussianFit gaussian_fit(const std::vector<double>& lambdas,
                                const std::vector<int>& counts) {
  if (lambdas.size() != counts.size())
    throw numerics_error("gaussian_fit: size mismatch");
  const int n = static_cast<int>(lambdas.size());
  if (n < 4) throw numerics_error("gaussian_fit: fewer than 4 usable points");
  double lmin = lambdas[0], lmax = lambdas[0];
  for (double l : lambdas) {
    if (!(l > 0.0) || l >= 1.0)
      throw numerics_error("gaussian_fit: lambdas must lie in (0,1)");
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
  }
  if (lmax / lmin < 1e6)
    throw numerics_error("gaussian_fit: need at least 6 decades of lambda");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::sqrt(std::abs(std::log(lambdas[i])));
    sx += x;
    sy += counts[i];
    sxx += x * x;
    sxy += x * counts[i];
  }
  GaussianFit f;
  const double det = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::sqrt(std::abs(std::log(lambdas[i])));
    const double r = counts[i] - (f.slope * x + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

}  // namespace magband
