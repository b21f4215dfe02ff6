#pragma once

#include <cmath>
#include <vector>

#include "magband/errors.hpp"
#include "magband/quadrature.hpp"

namespace magband {

// T-periodic edge potential as a finite trigonometric series,
//   W(x) = a_0 + sum_n a_n cos(2 pi n x / T) + b_n sin(2 pi n x / T).
// Smooth by construction, with exact derivatives up to order 3.
class FourierPotential {
 public:
  FourierPotential(double period, std::vector<double> cos_coeffs,
                   std::vector<double> sin_coeffs = {})
      : period_(period),
        cos_(std::move(cos_coeffs)),
        sin_(std::move(sin_coeffs)) {
    if (!(period_ > 0.0) || !std::isfinite(period_))
      throw config_error("potential.period must be a positive finite real");
    if (cos_.empty()) cos_.push_back(0.0);
    for (double c : cos_)
      if (!std::isfinite(c)) throw config_error("potential.cos has a non-finite entry");
    for (double c : sin_)
      if (!std::isfinite(c)) throw config_error("potential.sin has a non-finite entry");
  }

  double period() const { return period_; }

  bool is_constant() const {
    for (std::size_t n = 1; n < cos_.size(); ++n)
      if (cos_[n] != 0.0) return false;
    for (double c : sin_)
      if (c != 0.0) return false;
    return true;
  }

  // d^order W / dx^order, order in 0..3, from the series.
  double eval(double x, int order = 0) const {
    if (order < 0 || order > 3)
      throw numerics_error("FourierPotential::eval: derivative order must be in 0..3");
    const double w = 2.0 * M_PI / period_;
    double out = (order == 0) ? cos_[0] : 0.0;
    for (std::size_t n = 1; n < cos_.size(); ++n) {
      if (cos_[n] == 0.0) continue;
      const double t = n * w * x, c = cos_[n] * std::pow(n * w, order);
      switch (order) {
        case 0: out += c * std::cos(t); break;
        case 1: out += -c * std::sin(t); break;
        case 2: out += -c * std::cos(t); break;
        case 3: out += c * std::sin(t); break;
      }
    }
    for (std::size_t i = 0; i < sin_.size(); ++i) {
      if (sin_[i] == 0.0) continue;
      const std::size_t n = i + 1;
      const double t = n * w * x, c = sin_[i] * std::pow(n * w, order);
      switch (order) {
        case 0: out += c * std::sin(t); break;
        case 1: out += c * std::cos(t); break;
        case 2: out += -c * std::sin(t); break;
        case 3: out += -c * std::cos(t); break;
      }
    }
    return out;
  }

  // Mean over one period; equals a_0 by orthogonality.
  double mean() const { return cos_[0]; }

  // sup over a period of |d^order W|, dense grid + golden-section polish.
  double sup_norm(int order, int grid = 1 << 14) const {
    double best = 0.0;
    double xbest = 0.0;
    const double h = period_ / grid;
    for (int i = 0; i < grid; ++i) {
      const double v = std::abs(eval(i * h, order));
      if (v > best) {
        best = v;
        xbest = i * h;
      }
    }
    // golden-section maximization of |W^{(order)}| on the bracketing cells
    double a = xbest - h, b = xbest + h;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * period_; ++it) {
      if (std::abs(eval(c, order)) > std::abs(eval(d, order))) {
        b = d;
      } else {
        a = c;
      }
      c = b - gr * (b - a);
      d = a + gr * (b - a);
    }
    return std::max(best, std::abs(eval(0.5 * (a + b), order)));
  }

  struct Extremum {
    double x = 0.0;
    double value = 0.0;
    double second_derivative = 0.0;
    bool degenerate = false;
    bool is_max = false;
  };

  struct RangeInfo {
    double min = 0.0, max = 0.0;
    std::vector<Extremum> minima, maxima;  // global extrema sets M_W^-, M_W^+
    bool constant = false;                 // W' == 0: no isolated extrema
  };

  // Global min/max over [0, T) and the attaining sets, located by dense
  // sampling of W' sign changes plus bisection/Newton polish.
  RangeInfo range_and_extrema(int grid_size = 4096) const {
    if (grid_size < 64)
      throw numerics_error("range_and_extrema: grid_size must be >= 64");
    RangeInfo info;
    if (is_constant()) {
      info.constant = true;
      info.min = info.max = cos_[0];
      return info;
    }
    const double h = period_ / grid_size;
    std::vector<Extremum> crit;
    double dprev = eval(0.0, 1);
    for (int i = 0; i < grid_size; ++i) {
      const double x1 = i * h, x2 = (i + 1) * h;
      const double dnext = eval(x2, 1);
      double xr = -1.0;
      if (dprev == 0.0) {
        xr = x1;
      } else if (dprev * dnext < 0.0) {
        xr = polish_root_(x1, x2);
      }
      if (xr >= 0.0) {
        Extremum e;
        e.x = xr;
        e.value = eval(xr, 0);
        e.second_derivative = eval(xr, 2);
        crit.push_back(e);
      }
      dprev = dnext;
    }
    if (crit.empty())
      throw numerics_error("range_and_extrema: no critical points found on a non-constant potential");
    info.min = crit[0].value;
    info.max = crit[0].value;
    for (const auto& e : crit) {
      info.min = std::min(info.min, e.value);
      info.max = std::max(info.max, e.value);
    }
    double d2max = 0.0;
    for (const auto& e : crit) d2max = std::max(d2max, std::abs(e.second_derivative));
    const double d2tol = 1e-8 * d2max;
    const double vtol = 1e-10 * std::max(info.max - info.min, 1e-300);
    for (auto e : crit) {
      e.degenerate = std::abs(e.second_derivative) <= d2tol;
      if (e.value >= info.max - vtol) {
        e.is_max = true;
        info.maxima.push_back(e);
      } else if (e.value <= info.min + vtol) {
        e.is_max = false;
        info.minima.push_back(e);
      }
    }
    return info;
  }

  // Sufficient gap condition W_+ - W_- < 2b.
  bool gap_condition(double b) const {
    if (!(b > 0.0)) throw config_error("gap_condition: b must be positive");
    if (is_constant()) return true;
    const auto info = range_and_extrema();
    return info.max - info.min < 2.0 * b;
  }

 private:
  // bisection/Newton hybrid on W' inside a sign-change bracket
  double polish_root_(double a, double b) const {
    double fa = eval(a, 1);
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
      const double fx = eval(x, 1);
      const double dfx = eval(x, 2);
      double xn = (dfx != 0.0) ? x - fx / dfx : x;
      if (!(xn > a && xn < b)) {  // Newton left the bracket: bisect
        if (fa * fx <= 0.0)
          b = x;
        else {
          a = x;
          fa = fx;
        }
        xn = 0.5 * (a + b);
      }
      if (std::abs(xn - x) < 1e-15 * period_) return xn;
      x = xn;
    }
    return x;
  }

  double period_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace magband
