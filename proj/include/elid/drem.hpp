#pragma once

#include <vector>

#include "elid/types.hpp"

namespace elid {

// ---------------------------------------------------------------------------
// Kreisselmeier dynamic regressor extension and mixing: an n x W regression
// equation Y = Reg * theta is extended through
//
//   Zdot   = -lambda_e Z   + Reg' Y
//   Psidot = -lambda_e Psi + Reg' Reg
//
// and mixed into W scalar equations  ycal_i = delta * theta_i  with
// ycal = adj(Psi) Z and delta = det(Psi).
// ---------------------------------------------------------------------------

namespace detail {

template <int N>
Eigen::Matrix<double, N - 1, N - 1> drop_row_col(const Eigen::Matrix<double, N, N>& a, int row,
                                                 int col) {
  Eigen::Matrix<double, N - 1, N - 1> minor;
  for (int r = 0, mr = 0; r < N; ++r) {
    if (r == row) continue;
    for (int c = 0, mc = 0; c < N; ++c) {
      if (c == col) continue;
      minor(mr, mc) = a(r, c);
      ++mc;
    }
    ++mr;
  }
  return minor;
}

// Closed-form small determinants on index-mapped views; the mixing step
// calls these once per cofactor, so no submatrix is materialized.
template <int N, class Mat>
double minor_det(const Mat& a, const int* rows, const int* cols) {
  if constexpr (N == 1) {
    return a(rows[0], cols[0]);
  } else if constexpr (N == 2) {
    return a(rows[0], cols[0]) * a(rows[1], cols[1]) -
           a(rows[0], cols[1]) * a(rows[1], cols[0]);
  } else {
    double det = 0.0;
    double sign = 1.0;
    int sub_cols[N - 1];
    for (int j = 0; j < N; ++j) {
      for (int c = 0, sc = 0; c < N; ++c)
        if (c != j) sub_cols[sc++] = cols[c];
      det += sign * a(rows[0], cols[j]) * minor_det<N - 1>(a, rows + 1, sub_cols);
      sign = -sign;
    }
    return det;
  }
}

}  // namespace detail

/// Determinant by cofactor expansion. Intended for the small matrices of the
/// mixing step (N <= 6).
template <int N>
double cofactor_determinant(const Eigen::Matrix<double, N, N>& a) {
  static_assert(N >= 1 && N <= 6, "cofactor expansion is only sensible for small matrices");
  int idx[N];
  for (int k = 0; k < N; ++k) idx[k] = k;
  return detail::minor_det<N>(a, idx, idx);
}

/// Cofactor adjugate, adj(A) A = det(A) I. Stays well defined as det(A) -> 0,
/// which is the regime of interest here. adj of a 1x1 matrix is 1.
template <int N>
Eigen::Matrix<double, N, N> adjugate(const Eigen::Matrix<double, N, N>& a) {
  static_assert(N >= 1 && N <= 6, "cofactor expansion is only sensible for small matrices");
  Eigen::Matrix<double, N, N> adj;
  if constexpr (N == 1) {
    adj(0, 0) = 1.0;
  } else {
    int rows[N - 1];
    int cols[N - 1];
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        for (int r = 0, k = 0; r < N; ++r)
          if (r != j) rows[k++] = r;
        for (int c = 0, k = 0; c < N; ++c)
          if (c != i) cols[k++] = c;
        const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        adj(i, j) = sign * detail::minor_det<N - 1>(a, rows, cols);
      }
  }
  return adj;
}

template <int W>
struct DremState {
  Eigen::Matrix<double, W, 1> extended = Eigen::Matrix<double, W, 1>::Zero();  // Z
  Eigen::Matrix<double, W, W> gram = Eigen::Matrix<double, W, W>::Zero();      // Psi
};

/// The W decoupled scalar regression equations ycal_i = delta theta_i.
template <int W>
struct MixedLre {
  Eigen::Matrix<double, W, 1> ycal;
  double delta;
};

template <int W, int N>
DremState<W> drem_deriv(const DremState<W>& s, const Eigen::Matrix<double, N, 1>& y,
                        const Eigen::Matrix<double, N, W>& reg, double lambda_e) {
  DremState<W> d;
  d.extended = -lambda_e * s.extended + reg.transpose() * y;
  d.gram = -lambda_e * s.gram + reg.transpose() * reg;
  return d;
}

template <int W>
MixedLre<W> mix(const DremState<W>& s) {
  const Eigen::Matrix<double, W, W> adj = adjugate<W>(s.gram);
  MixedLre<W> out;
  out.ycal = adj * s.extended;
  out.delta = s.gram.row(0).dot(adj.col(0));  // (Psi adj)(0,0) = det(Psi)
  return out;
}

/// Trapezoidal integral of delta^2 over a uniformly sampled history; reports
/// the interval-excitation level reached by the mixing determinant.
inline double excitation_integral(const std::vector<double>& delta, double dt) {
  if (delta.size() < 2) return 0.0;
  double acc = 0.5 * (delta.front() * delta.front() + delta.back() * delta.back());
  for (std::size_t k = 1; k + 1 < delta.size(); ++k) acc += delta[k] * delta[k];
  return acc * dt;
}

}  // namespace elid
