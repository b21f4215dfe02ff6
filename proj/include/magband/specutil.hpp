#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "magband/errors.hpp"

namespace magband {

// Counting functions for Hermitian matrices:
//   n_+(s; T) / n_-(s; T): eigenvalues above s / below -s,
//   n_*(s; T) = n_+(s^2; T^* T): singular values above s.

namespace detail {

template <typename Derived>
Eigen::VectorXd selfadjoint_eigenvalues(const Eigen::MatrixBase<Derived>& M) {
  Eigen::SelfAdjointEigenSolver<typename Derived::PlainObject> es(M.derived(),
                                                                  Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw numerics_error("counting: eigensolver failed");
  return es.eigenvalues();
}

}  // namespace detail

template <typename Derived>
int count_pos(double s, const Eigen::MatrixBase<Derived>& M) {
  if (!(s > 0.0)) throw numerics_error("count_pos: threshold must be positive");
  const Eigen::VectorXd ev = detail::selfadjoint_eigenvalues(M);
  int n = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] > s) ++n;
  return n;
}

template <typename Derived>
int count_neg(double s, const Eigen::MatrixBase<Derived>& M) {
  if (!(s > 0.0)) throw numerics_error("count_neg: threshold must be positive");
  const Eigen::VectorXd ev = detail::selfadjoint_eigenvalues(M);
  int n = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] < -s) ++n;
  return n;
}

// n_*(s; T) = n_+(s^2; T^*T) for possibly rectangular T.
template <typename Derived>
int count_sv(double s, const Eigen::MatrixBase<Derived>& M) {
  if (!(s > 0.0)) throw numerics_error("count_sv: threshold must be positive");
  using Plain = typename Derived::PlainObject;
  const Plain G = M.derived().adjoint() * M.derived();
  return count_pos(s * s, G);
}

// Weyl:  n_+(s(1+e); T1) - n_-(se; T2) <= n_+(s; T1+T2) <= n_+(s(1-e); T1) + n_+(se; T2)
template <typename D1, typename D2>
bool check_weyl(double s, double eps, const Eigen::MatrixBase<D1>& T1,
                const Eigen::MatrixBase<D2>& T2) {
  if (!(eps > 0.0 && eps < 1.0)) throw numerics_error("check_weyl: eps must be in (0,1)");
  const int mid = count_pos(s, (T1.derived() + T2.derived()).eval());
  const int lo = count_pos(s * (1.0 + eps), T1) - count_neg(s * eps, T2);
  const int hi = count_pos(s * (1.0 - eps), T1) + count_pos(s * eps, T2);
  return lo <= mid && mid <= hi;
}

// Ky Fan: same shape with n_* throughout.
template <typename D1, typename D2>
bool check_kyfan(double s, double eps, const Eigen::MatrixBase<D1>& T1,
                 const Eigen::MatrixBase<D2>& T2) {
  if (!(eps > 0.0 && eps < 1.0)) throw numerics_error("check_kyfan: eps must be in (0,1)");
  const int mid = count_sv(s, (T1.derived() + T2.derived()).eval());
  const int lo = count_sv(s * (1.0 + eps), T1) - count_sv(s * eps, T2);
  const int hi = count_sv(s * (1.0 - eps), T1) + count_sv(s * eps, T2);
  return lo <= mid && mid <= hi;
}

// Chebyshev-type bound, Frobenius case: n_*(s; T) <= s^{-2} ||T||_F^2.
template <typename Derived>
bool check_chebyshev(double s, const Eigen::MatrixBase<Derived>& T) {
  if (!(s > 0.0)) throw numerics_error("check_chebyshev: threshold must be positive");
  const double rhs = T.derived().squaredNorm() / (s * s);
  return count_sv(s, T) <= rhs;
}

}  // namespace magband
