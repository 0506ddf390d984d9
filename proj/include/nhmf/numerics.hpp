#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>

namespace nhmf {

using cplx = std::complex<double>;

using Vec2 = Eigen::Matrix<cplx, 2, 1>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;

inline constexpr cplx I{0.0, 1.0};

/// Bilinear product sum_i u_i v_i (no conjugation). Throws DimensionError on
/// length mismatch.
cplx c_inner(std::span<const cplx> u, std::span<const cplx> v);

/// Hermitian product sum_i conj(u_i) v_i.
cplx herm_inner(std::span<const cplx> u, std::span<const cplx> v);

double herm_norm(std::span<const cplx> u);

/// 1 - |<u,v>| / (|u| |v|). Zero iff the two vectors span the same ray.
double projective_distance(std::span<const cplx> u, std::span<const cplx> v);

template <int N>
std::span<const cplx> view(const Eigen::Matrix<cplx, N, 1>& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

template <int N>
cplx c_inner(const Eigen::Matrix<cplx, N, 1>& u, const Eigen::Matrix<cplx, N, 1>& v) {
  return c_inner(view(u), view(v));
}

template <int N>
cplx herm_inner(const Eigen::Matrix<cplx, N, 1>& u, const Eigen::Matrix<cplx, N, 1>& v) {
  return herm_inner(view(u), view(v));
}

template <int N>
double projective_distance(const Eigen::Matrix<cplx, N, 1>& u,
                           const Eigen::Matrix<cplx, N, 1>& v) {
  return projective_distance(view(u), view(v));
}

template <int N>
bool all_finite(const Eigen::Matrix<cplx, N, N>& m) {
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

/// max_ij |M_ij - M_ji|
template <int N>
double asymmetry(const Eigen::Matrix<cplx, N, N>& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

template <int N>
bool is_complex_symmetric(const Eigen::Matrix<cplx, N, N>& m, double tol = 1e-12) {
  return asymmetry(m) <= tol;
}

template <int N>
struct EigenPair {
  cplx value;
  Eigen::Matrix<cplx, N, 1> vector;  // unit Hermitian norm
  double residual = 0.0;             // |M v - value v| / |v|
  bool defective = false;            // c-norm of vector collapsed
};

using EigenPair2 = EigenPair<2>;
using EigenPair4 = EigenPair<4>;

inline constexpr double kEigenResidualBound = 1e-10;
inline constexpr double kDefectiveThreshold = 1e-8;

/// Closed-form eigenpairs of a 2x2 matrix, ascending real part then
/// imaginary part.
std::array<EigenPair2, 2> eig_small(const Mat2& m);

/// Eigenpairs of a 4x4 matrix in the same canonical order. Every pair meets
/// kEigenResidualBound (relative to the matrix scale) or ConvergenceError is
/// raised.
std::array<EigenPair4, 4> eig_small(const Mat4& m);

/// Canonical eigenvalue ordering: ascending real part, ties (1e-12) broken by
/// ascending imaginary part.
bool canonical_less(cplx x, cplx y);

/// Multiply by a phase so that the largest-modulus entry is real positive.
template <int N>
Eigen::Matrix<cplx, N, 1> phase_aligned(const Eigen::Matrix<cplx, N, 1>& v) {
  int k = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(k))) k = i;
  if (std::abs(v(k)) == 0.0) return v;
  return v * (std::abs(v(k)) / v(k));
}

}  // namespace nhmf
