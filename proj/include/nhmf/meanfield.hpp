#pragma once

#include <array>

#include "nhmf/hubbard_exact.hpp"
#include "nhmf/numerics.hpp"

namespace nhmf {

/// Up-spin orbital a*phi_1 + b*phi_2 and down-spin orbital c*phi_1 + d*phi_2.
/// Coefficients are never normalized implicitly; every functional below is
/// homogeneous of degree zero in each spin's pair.
struct OrbitalPair {
  cplx a{1.0}, b{0.0}, c{1.0}, d{0.0};

  Vec2 up() const { return {a, b}; }
  Vec2 dn() const { return {c, d}; }
  std::array<cplx, 4> coeffs() const { return {a, b, c, d}; }
  static OrbitalPair from(const std::array<cplx, 4>& x) { return {x[0], x[1], x[2], x[3]}; }
  static OrbitalPair from(const Vec2& up, const Vec2& dn) { return {up(0), up(1), dn(0), dn(1)}; }

  OrbitalPair conj() const { return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)}; }

  /// Throws InputError if either spin's coefficient pair is zero.
  void require_nonzero() const;
  /// True when both c-norms are resolvable (relative 1e-12).
  bool nh_evaluable() const;
};

inline constexpr double kGaugeSingularThreshold = 1e-12;

enum class FockFlavor { Hermitian, NonHermitian };

struct FockPair {
  Mat2 up;
  Mat2 dn;
  FockFlavor flavor = FockFlavor::NonHermitian;
};

struct SiteDensities {
  cplx up_a, up_b, dn_a, dn_b;
};

struct NhEnergy {
  cplx energy;   // total non-Hermitian mean-field energy
  cplx hartree;  // double-counting term
  double gamma() const { return -2.0 * energy.imag(); }
};

struct HEnergy {
  double energy;
  double hartree;
  double imag_residue;  // zero for real on-site energies
};

struct MeanFieldEnergies {
  cplx nh_energy;
  double h_energy;
  double gamma;
  cplx nh_hartree;
  double h_hartree;
};

/// c-normalized densities a^2/(a^2+b^2), ... . Throws GaugeSingularError
/// when a c-norm collapses.
SiteDensities nh_site_densities(const OrbitalPair& orb);
/// Conventional densities |a|^2/(|a|^2+|b|^2), ... (imaginary parts zero).
SiteDensities h_site_densities(const OrbitalPair& orb);

FockPair nh_fock(const ModelParams& p, const OrbitalPair& orb);
FockPair h_fock(const ModelParams& p, const OrbitalPair& orb);

NhEnergy nhmf_energy(const ModelParams& p, const OrbitalPair& orb);
HEnergy hmf_energy(const ModelParams& p, const OrbitalPair& orb);
MeanFieldEnergies evaluate_energies(const ModelParams& p, const OrbitalPair& orb);

/// Holomorphic partials dE/d(a,b,c,d) of the NH energy.
std::array<cplx, 4> nhmf_gradient(const ModelParams& p, const OrbitalPair& orb);

/// Gradient with each spin's components multiplied by its squared c-norm,
/// N_s^2 dE/dx. Same zeros as the plain gradient but finite and free of
/// large cancelling terms near exceptional points.
std::array<cplx, 4> nhmf_scaled_gradient(const ModelParams& p, const OrbitalPair& orb);

/// Holomorphic Hessian of the NH energy.
Mat4 nhmf_hessian(const ModelParams& p, const OrbitalPair& orb);

/// Jacobian d(scaled gradient)_k / dx_j, used by the Newton searches.
Mat4 nhmf_scaled_jacobian(const ModelParams& p, const OrbitalPair& orb);

/// Gauge-invariant stationarity measure: per spin, max |N_s^2 dE/dx| / |v_s|^3.
double stationarity_residual(const ModelParams& p, const OrbitalPair& orb);

/// Occupied-orbital energies (up, dn). NH flavor uses the c-Rayleigh
/// quotient, Hermitian flavor the conventional one.
std::array<cplx, 2> orbital_energies(const FockPair& fock, const OrbitalPair& orb);

/// Tight-binding bond current 2t Im(conj(a) b)/(|a|^2+|b|^2) per spin.
std::array<double, 2> bond_current(const OrbitalPair& orb, double t);

}  // namespace nhmf
