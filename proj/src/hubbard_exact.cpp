#include "nhmf/hubbard_exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nhmf/errors.hpp"

namespace nhmf {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

ModelParams ModelParams::reference(double U) {
  ModelParams p;
  p.U = U;
  return p;
}

ModelParams ModelParams::symmetric(double U, double t) {
  ModelParams p;
  p.t = t;
  p.U = U;
  p.h_up_a = p.h_up_b = p.h_dn_a = p.h_dn_b = 0.0;
  return p;
}

void ModelParams::validate() const {
  if (!std::isfinite(t) || !std::isfinite(U)) throw InputError("ModelParams: non-finite t or U");
  if (!(t > 0.0)) throw InputError("ModelParams: hopping t must be positive");
  if (!(U >= 0.0)) throw InputError("ModelParams: interaction U must be non-negative");
  for (cplx h : {h_up_a, h_up_b, h_dn_a, h_dn_b})
    if (!finite(h)) throw InputError("ModelParams: non-finite on-site energy");
}

bool ModelParams::is_isolated() const {
  return h_up_a.imag() == 0.0 && h_up_b.imag() == 0.0 && h_dn_a.imag() == 0.0 &&
         h_dn_b.imag() == 0.0;
}

std::array<cplx, 4> ExactSpectrum::eigenvalues() const {
  std::array<cplx, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = eigenpairs[k].value;
  return out;
}

std::array<cplx, 4> exact_diagonal(const ModelParams& p) {
  return {p.h_up_a + p.h_dn_a + p.U, p.h_up_b + p.h_dn_b + p.U, p.h_up_a + p.h_dn_b,
          p.h_dn_a + p.h_up_b};
}

Mat4 build_exact_hamiltonian(const ModelParams& p) {
  p.validate();
  const auto e = exact_diagonal(p);
  const double t = p.t;
  Mat4 h;
  // clang-format off
  h << e[0], 0.0,  -t,   t,
       0.0,  e[1], -t,   t,
       -t,   -t,   e[2], 0.0,
       t,    t,    0.0,  e[3];
  // clang-format on
  return h;
}

ExactSpectrum exact_spectrum(const ModelParams& p) {
  const Mat4 h = build_exact_hamiltonian(p);
  return ExactSpectrum{p, eig_small(h)};
}

std::vector<ExactSpectrum> exact_sweep(const ModelParams& p, const std::vector<double>& u_grid) {
  if (u_grid.empty()) throw InputError("exact_sweep: empty U grid");
  if (!std::is_sorted(u_grid.begin(), u_grid.end()))
    throw InputError("exact_sweep: U grid must be ascending");
  std::vector<ExactSpectrum> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) out.push_back(exact_spectrum(p.with_U(u)));
  return out;
}

std::vector<std::array<cplx, 4>> match_branches(const std::vector<ExactSpectrum>& sweep) {
  std::vector<std::array<cplx, 4>> out;
  out.reserve(sweep.size());
  for (const auto& s : sweep) {
    auto vals = s.eigenvalues();
    if (out.empty()) {
      out.push_back(vals);
      continue;
    }
    const auto& prev = out.back();
    std::array<int, 4> perm{0, 1, 2, 3}, best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (int k = 0; k < 4; ++k) cost += std::abs(vals[perm[k]] - prev[k]);
      if (cost < best_cost) {
        best_cost = cost;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::array<cplx, 4> matched;
    for (int k = 0; k < 4; ++k) matched[k] = vals[best[k]];
    out.push_back(matched);
  }
  return out;
}

}  // namespace nhmf
