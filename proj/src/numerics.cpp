#include "nhmf/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "nhmf/errors.hpp"

namespace nhmf {

namespace {

void require_same_length(std::span<const cplx> u, std::span<const cplx> v) {
  if (u.size() != v.size())
    throw DimensionError("vector length mismatch: " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
}

template <int N>
double residual_of(const Eigen::Matrix<cplx, N, N>& m, cplx value,
                   const Eigen::Matrix<cplx, N, 1>& v) {
  return (m * v - value * v).norm() / v.norm();
}

template <int N>
void finish_pair(EigenPair<N>& p, const Eigen::Matrix<cplx, N, N>& m) {
  p.vector = phase_aligned<N>(Eigen::Matrix<cplx, N, 1>(p.vector / p.vector.norm()));
  p.residual = residual_of<N>(m, p.value, p.vector);
  const double cn = std::abs(c_inner<N>(p.vector, p.vector));
  p.defective = cn < kDefectiveThreshold * p.vector.squaredNorm();
}

template <int N>
void sort_canonical(std::array<EigenPair<N>, N>& pairs) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& x, const auto& y) { return canonical_less(x.value, y.value); });
}

}  // namespace

bool canonical_less(cplx x, cplx y) {
  constexpr double tie = 1e-12;
  if (std::abs(x.real() - y.real()) > tie) return x.real() < y.real();
  return x.imag() < y.imag() - tie;
}

cplx c_inner(std::span<const cplx> u, std::span<const cplx> v) {
  require_same_length(u, v);
  cplx acc{};
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

cplx herm_inner(std::span<const cplx> u, std::span<const cplx> v) {
  require_same_length(u, v);
  cplx acc{};
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
  return acc;
}

double herm_norm(std::span<const cplx> u) {
  double acc = 0.0;
  for (const cplx& x : u) acc += std::norm(x);
  return std::sqrt(acc);
}

double projective_distance(std::span<const cplx> u, std::span<const cplx> v) {
  require_same_length(u, v);
  const double nu = herm_norm(u);
  const double nv = herm_norm(v);
  if (nu == 0.0 || nv == 0.0) throw InputError("projective_distance: zero vector");
  const double overlap = std::abs(herm_inner(u, v)) / (nu * nv);
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

std::array<EigenPair2, 2> eig_small(const Mat2& m) {
  if (!all_finite<2>(m)) throw InputError("eig_small: non-finite matrix entry");

  const cplx p = m(0, 0), q = m(0, 1), r = m(1, 0), s = m(1, 1);
  const cplx mean = 0.5 * (p + s);
  const cplx half_diff = 0.5 * (p - s);
  const cplx disc = std::sqrt(half_diff * half_diff + q * r);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());

  std::array<EigenPair2, 2> out;
  const cplx values[2] = {mean - disc, mean + disc};
  for (int k = 0; k < 2; ++k) {
    const cplx lam = values[k];
    Vec2 v1(q, lam - p);
    Vec2 v2(lam - s, r);
    Vec2 v = v1.norm() >= v2.norm() ? v1 : v2;
    if (v.norm() <= 1e-14 * scale) {
      // scalar matrix: any basis works
      v = Vec2::Zero();
      v(k) = 1.0;
    }
    out[k].value = lam;
    out[k].vector = v;
    finish_pair<2>(out[k], m);
  }
  sort_canonical<2>(out);
  return out;
}

std::array<EigenPair4, 4> eig_small(const Mat4& m) {
  if (!all_finite<4>(m)) throw InputError("eig_small: non-finite matrix entry");

  Eigen::ComplexEigenSolver<Mat4> solver(m, true);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eig_small: 4x4 solver failed", 0.0);

  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  std::array<EigenPair4, 4> out;
  for (int k = 0; k < 4; ++k) {
    out[k].value = solver.eigenvalues()(k);
    out[k].vector = solver.eigenvectors().col(k);
    finish_pair<4>(out[k], m);

    // polish with a few steps of shifted inverse iteration
    for (int it = 0; it < 3 && out[k].residual > 1e-13 * scale; ++it) {
      const cplx shift = out[k].value + cplx(1e-13 * scale, 0.0);
      Vec4 w = (m - shift * Mat4::Identity()).partialPivLu().solve(out[k].vector);
      if (!w.allFinite() || w.norm() == 0.0) break;
      w /= w.norm();
      const cplx rq = w.dot(m * w);  // Hermitian Rayleigh quotient
      EigenPair4 trial{rq, w, 0.0, false};
      finish_pair<4>(trial, m);
      if (trial.residual < out[k].residual) out[k] = trial;
    }
    if (out[k].residual > kEigenResidualBound * scale)
      throw ConvergenceError("eig_small: eigenpair residual above bound", out[k].residual);
  }
  sort_canonical<4>(out);
  return out;
}

}  // namespace nhmf
