#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "nhmf/numerics.hpp"

namespace nhmf {

/// Two-site Hubbard model parameters. On-site energies are complex so the
/// same type carries source/sink-dressed runs; isolated molecules keep them
/// real.
struct ModelParams {
  double t = 1.0;
  double U = 0.0;
  cplx h_up_a{0.25, 0.0};
  cplx h_up_b{-0.25, 0.0};
  cplx h_dn_a{0.0, 0.0};
  cplx h_dn_b{0.0, 0.0};

  /// Asymmetric reference parameter set (t = 1, h_up = +-1/4, h_dn = 0).
  static ModelParams reference(double U);
  /// h = 0 on every site and spin.
  static ModelParams symmetric(double U, double t = 1.0);

  /// Throws InputError unless t > 0, U >= 0 and everything is finite.
  void validate() const;
  bool is_isolated() const;

  ModelParams with_U(double u) const {
    ModelParams p = *this;
    p.U = u;
    return p;
  }
};

/// Labels of the four opposite-spin two-electron basis states, in matrix
/// order.
inline constexpr std::array<std::string_view, 4> kBasisLabels = {
    "c+_1up c+_1dn |0>  (both on site 1)",
    "c+_2up c+_2dn |0>  (both on site 2)",
    "c+_1up c+_2dn |0>  (different sites)",
    "c+_1dn c+_2up |0>  (different sites)",
};

struct ExactSpectrum {
  ModelParams params;
  std::array<EigenPair4, 4> eigenpairs;

  std::array<cplx, 4> eigenvalues() const;
};

/// Diagonal energies E1..E4 of the opposite-spin basis.
std::array<cplx, 4> exact_diagonal(const ModelParams& p);

Mat4 build_exact_hamiltonian(const ModelParams& p);

ExactSpectrum exact_spectrum(const ModelParams& p);

/// One spectrum per grid value; only U differs between entries. The grid
/// must be nonempty and ascending.
std::vector<ExactSpectrum> exact_sweep(const ModelParams& p, const std::vector<double>& u_grid);

/// Reorders each spectrum's eigenvalues so that index k follows one
/// continuous curve across the sweep, choosing at each step the permutation
/// with the smallest total displacement from the previous point.
std::vector<std::array<cplx, 4>> match_branches(const std::vector<ExactSpectrum>& sweep);

}  // namespace nhmf
