#pragma once

#include <cmath>
#include <vector>

#include "magband/errors.hpp"

namespace magband {

// Normalized harmonic-oscillator eigenfunctions phi_n, n >= 1:
//   -phi_n'' + x^2 phi_n = (2n-1) phi_n,   ||phi_n||_{L^2} = 1,
//   phi_n(x) = h_{n-1}(x) e^{-x^2/2} with h_k the orthonormal Hermite
// polynomials (h_0 = pi^{-1/4}).
//
// The three-term recurrence runs on the functions themselves (Gaussian
// included), so every intermediate stays O(1); in the far tail the start
// value underflows to 0, which is below double precision of the true value
// wherever these functions are used.

// phi_1..phi_nmax at a single point; out must have size nmax.
inline void hermite_fn_all(int nmax, double y, double* out) {
  if (nmax < 1) throw numerics_error("hermite_fn_all: nmax must be >= 1");
  const double f0 = 0.7511255444649425 * std::exp(-0.5 * y * y);
  out[0] = f0;
  if (nmax == 1) return;
  out[1] = std::sqrt(2.0) * y * f0;
  for (int j = 1; j + 1 < nmax; ++j) {
    out[j + 1] = y * std::sqrt(2.0 / (j + 1)) * out[j] -
                 std::sqrt(j / (j + 1.0)) * out[j - 1];
  }
}

inline double hermite_fn(int n, double y) {
  if (n < 1) throw numerics_error("hermite_fn: index must be >= 1");
  std::vector<double> buf(n);
  hermite_fn_all(n, y, buf.data());
  return buf[n - 1];
}

}  // namespace magband
