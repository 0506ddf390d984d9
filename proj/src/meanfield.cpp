#include "nhmf/meanfield.hpp"

#include <algorithm>
#include <cmath>

#include "nhmf/errors.hpp"

namespace nhmf {

namespace {

// Kinetic quotient K = (h1 x^2 + h2 y^2 - 2 t x y)/(x^2 + y^2) and the
// c-density p = x^2/(x^2 + y^2) of one spin, with first and second
// holomorphic derivatives in (x, y).
struct SpinTerms {
  cplx x, y;
  cplx n;     // x^2 + y^2
  cplx poly;  // h1 x^2 + h2 y^2 - 2 t x y
  cplx k;     // poly / n
  cplx p;     // x^2 / n
  std::array<cplx, 2> dn, dpoly, dk, dp;
  std::array<std::array<cplx, 2>, 2> ddk, ddp;

  SpinTerms(cplx x_, cplx y_, cplx h1, cplx h2, double t) : x(x_), y(y_) {
    n = x * x + y * y;
    poly = h1 * x * x + h2 * y * y - 2.0 * t * x * y;
    k = poly / n;
    p = x * x / n;
    dn = {2.0 * x, 2.0 * y};
    dpoly = {2.0 * h1 * x - 2.0 * t * y, 2.0 * h2 * y - 2.0 * t * x};
    const std::array<cplx, 2> dm{2.0 * x, 0.0};
    const cplx ddpoly[2][2] = {{2.0 * h1, -2.0 * t}, {-2.0 * t, 2.0 * h2}};
    const cplx ddn[2][2] = {{2.0, 0.0}, {0.0, 2.0}};
    const cplx ddm[2][2] = {{2.0, 0.0}, {0.0, 0.0}};
    for (int i = 0; i < 2; ++i) {
      dk[i] = (dpoly[i] - k * dn[i]) / n;
      dp[i] = (dm[i] - p * dn[i]) / n;
    }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        ddk[i][j] = (ddpoly[i][j] - dk[i] * dn[j] - dk[j] * dn[i] - k * ddn[i][j]) / n;
        ddp[i][j] = (ddm[i][j] - dp[i] * dn[j] - dp[j] * dn[i] - p * ddn[i][j]) / n;
      }
  }
};

void check_c_norm(cplx x, cplx y, const char* spin) {
  const double herm = std::norm(x) + std::norm(y);
  const double cn = std::abs(x * x + y * y);
  if (herm == 0.0) throw InputError(std::string("zero ") + spin + "-spin orbital");
  if (!(cn > kGaugeSingularThreshold * herm))
    throw GaugeSingularError(std::string("c-norm collapse in ") + spin + "-spin orbital", cn);
}

void check_nh(const OrbitalPair& orb) {
  check_c_norm(orb.a, orb.b, "up");
  check_c_norm(orb.c, orb.d, "down");
}

cplx c_rayleigh(const Mat2& f, const Vec2& v) {
  return (v.transpose() * f * v)(0, 0) / (v.transpose() * v)(0, 0);
}

cplx h_rayleigh(const Mat2& f, const Vec2& v) {
  return v.dot(f * v) / v.squaredNorm();
}

Mat2 fock_block(cplx h1, cplx h2, double t, cplx shift1, cplx shift2) {
  Mat2 f;
  f << h1 + shift1, -t, -t, h2 + shift2;
  return f;
}

}  // namespace

void OrbitalPair::require_nonzero() const {
  if (a == 0.0 && b == 0.0) throw InputError("zero up-spin orbital");
  if (c == 0.0 && d == 0.0) throw InputError("zero down-spin orbital");
}

bool OrbitalPair::nh_evaluable() const {
  auto ok = [](cplx x, cplx y) {
    const double herm = std::norm(x) + std::norm(y);
    return herm > 0.0 && std::abs(x * x + y * y) > kGaugeSingularThreshold * herm;
  };
  return ok(a, b) && ok(c, d);
}

SiteDensities nh_site_densities(const OrbitalPair& orb) {
  check_nh(orb);
  const cplx nu = orb.a * orb.a + orb.b * orb.b;
  const cplx nd = orb.c * orb.c + orb.d * orb.d;
  const cplx up_a = orb.a * orb.a / nu;
  const cplx dn_a = orb.c * orb.c / nd;
  return {up_a, 1.0 - up_a, dn_a, 1.0 - dn_a};
}

SiteDensities h_site_densities(const OrbitalPair& orb) {
  orb.require_nonzero();
  const double nu = std::norm(orb.a) + std::norm(orb.b);
  const double nd = std::norm(orb.c) + std::norm(orb.d);
  return {std::norm(orb.a) / nu, std::norm(orb.b) / nu, std::norm(orb.c) / nd,
          std::norm(orb.d) / nd};
}

FockPair nh_fock(const ModelParams& p, const OrbitalPair& orb) {
  const SiteDensities n = nh_site_densities(orb);
  return {fock_block(p.h_up_a, p.h_up_b, p.t, p.U * n.dn_a, p.U * n.dn_b),
          fock_block(p.h_dn_a, p.h_dn_b, p.t, p.U * n.up_a, p.U * n.up_b),
          FockFlavor::NonHermitian};
}

FockPair h_fock(const ModelParams& p, const OrbitalPair& orb) {
  const SiteDensities n = h_site_densities(orb);
  return {fock_block(p.h_up_a, p.h_up_b, p.t, p.U * n.dn_a, p.U * n.dn_b),
          fock_block(p.h_dn_a, p.h_dn_b, p.t, p.U * n.up_a, p.U * n.up_b),
          FockFlavor::Hermitian};
}

NhEnergy nhmf_energy(const ModelParams& p, const OrbitalPair& orb) {
  const FockPair f = nh_fock(p, orb);
  const cplx nu = orb.a * orb.a + orb.b * orb.b;
  const cplx nd = orb.c * orb.c + orb.d * orb.d;
  const cplx hartree =
      p.U * (orb.a * orb.a * orb.c * orb.c + orb.b * orb.b * orb.d * orb.d) / (nu * nd);
  const cplx e = c_rayleigh(f.up, orb.up()) + c_rayleigh(f.dn, orb.dn()) - hartree;
  return {e, hartree};
}

HEnergy hmf_energy(const ModelParams& p, const OrbitalPair& orb) {
  const FockPair f = h_fock(p, orb);
  const double nu = std::norm(orb.a) + std::norm(orb.b);
  const double nd = std::norm(orb.c) + std::norm(orb.d);
  const double hartree =
      p.U * (std::norm(orb.a) * std::norm(orb.c) + std::norm(orb.b) * std::norm(orb.d)) /
      (nu * nd);
  const cplx e = h_rayleigh(f.up, orb.up()) + h_rayleigh(f.dn, orb.dn()) - hartree;
  return {e.real(), hartree, e.imag()};
}

MeanFieldEnergies evaluate_energies(const ModelParams& p, const OrbitalPair& orb) {
  const NhEnergy nh = nhmf_energy(p, orb);
  const HEnergy h = hmf_energy(p, orb);
  return {nh.energy, h.energy, nh.gamma(), nh.hartree, h.hartree};
}

std::array<cplx, 4> nhmf_gradient(const ModelParams& p, const OrbitalPair& orb) {
  check_nh(orb);
  const SpinTerms up(orb.a, orb.b, p.h_up_a, p.h_up_b, p.t);
  const SpinTerms dn(orb.c, orb.d, p.h_dn_a, p.h_dn_b, p.t);
  // E = K_up + K_dn + U (p q + (1-p)(1-q))
  const cplx ds_dp = p.U * (2.0 * dn.p - 1.0);
  const cplx ds_dq = p.U * (2.0 * up.p - 1.0);
  return {up.dk[0] + ds_dp * up.dp[0], up.dk[1] + ds_dp * up.dp[1],
          dn.dk[0] + ds_dq * dn.dp[0], dn.dk[1] + ds_dq * dn.dp[1]};
}

std::array<cplx, 4> nhmf_scaled_gradient(const ModelParams& p, const OrbitalPair& orb) {
  check_nh(orb);
  const double t = p.t;
  auto spin = [t](cplx x, cplx y, cplx h1, cplx h2, cplx coupling) {
    // coupling = U (2 q - 1) of the opposite spin
    const cplx n = x * x + y * y;
    const cplx poly = h1 * x * x + h2 * y * y - 2.0 * t * x * y;
    return std::array<cplx, 2>{
        2.0 * n * (h1 * x - t * y) - 2.0 * poly * x + 2.0 * coupling * x * y * y,
        2.0 * n * (h2 * y - t * x) - 2.0 * poly * y - 2.0 * coupling * x * x * y};
  };
  const cplx nu = orb.a * orb.a + orb.b * orb.b;
  const cplx nd = orb.c * orb.c + orb.d * orb.d;
  const cplx coupling_up = p.U * (orb.c * orb.c - orb.d * orb.d) / nd;
  const cplx coupling_dn = p.U * (orb.a * orb.a - orb.b * orb.b) / nu;
  const auto gu = spin(orb.a, orb.b, p.h_up_a, p.h_up_b, coupling_up);
  const auto gd = spin(orb.c, orb.d, p.h_dn_a, p.h_dn_b, coupling_dn);
  return {gu[0], gu[1], gd[0], gd[1]};
}

Mat4 nhmf_hessian(const ModelParams& p, const OrbitalPair& orb) {
  check_nh(orb);
  const SpinTerms up(orb.a, orb.b, p.h_up_a, p.h_up_b, p.t);
  const SpinTerms dn(orb.c, orb.d, p.h_dn_a, p.h_dn_b, p.t);
  const cplx ds_dp = p.U * (2.0 * dn.p - 1.0);
  const cplx ds_dq = p.U * (2.0 * up.p - 1.0);
  Mat4 h;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      h(i, j) = up.ddk[i][j] + ds_dp * up.ddp[i][j];
      h(2 + i, 2 + j) = dn.ddk[i][j] + ds_dq * dn.ddp[i][j];
      h(i, 2 + j) = 2.0 * p.U * up.dp[i] * dn.dp[j];
      h(2 + j, i) = h(i, 2 + j);
    }
  return h;
}

Mat4 nhmf_scaled_jacobian(const ModelParams& p, const OrbitalPair& orb) {
  const auto g = nhmf_gradient(p, orb);
  const Mat4 h = nhmf_hessian(p, orb);
  const cplx n[2] = {orb.a * orb.a + orb.b * orb.b, orb.c * orb.c + orb.d * orb.d};
  const auto x = orb.coeffs();
  Mat4 j;
  for (int k = 0; k < 4; ++k) {
    const int s = k / 2;
    for (int m = 0; m < 4; ++m) {
      j(k, m) = n[s] * n[s] * h(k, m);
      // d(N_s^2)/dx_m = 2 N_s * 2 x_m for coordinates of the same spin
      if (m / 2 == s) j(k, m) += 4.0 * n[s] * x[m] * g[k];
    }
  }
  return j;
}

double stationarity_residual(const ModelParams& p, const OrbitalPair& orb) {
  const auto g = nhmf_scaled_gradient(p, orb);
  const double nu = std::pow(herm_norm(view<2>(orb.up())), 3);
  const double nd = std::pow(herm_norm(view<2>(orb.dn())), 3);
  return std::max({std::abs(g[0]) / nu, std::abs(g[1]) / nu, std::abs(g[2]) / nd,
                   std::abs(g[3]) / nd});
}

std::array<cplx, 2> orbital_energies(const FockPair& fock, const OrbitalPair& orb) {
  if (fock.flavor == FockFlavor::NonHermitian) {
    check_nh(orb);
    return {c_rayleigh(fock.up, orb.up()), c_rayleigh(fock.dn, orb.dn())};
  }
  orb.require_nonzero();
  return {h_rayleigh(fock.up, orb.up()), h_rayleigh(fock.dn, orb.dn())};
}

std::array<double, 2> bond_current(const OrbitalPair& orb, double t) {
  orb.require_nonzero();
  auto j = [t](cplx x, cplx y) {
    return 2.0 * t * (std::conj(x) * y).imag() / (std::norm(x) + std::norm(y));
  };
  return {j(orb.a, orb.b), j(orb.c, orb.d)};
}

}  // namespace nhmf
