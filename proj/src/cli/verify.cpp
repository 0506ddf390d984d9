// Runtime invariant suite behind the `verify` command.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nhmf/cli/commands.hpp"

namespace nhmf::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CheckResult upper(std::string name, double measured, double bound, std::string detail = {}) {
  return {std::move(name), measured, bound, false, measured <= bound, std::move(detail)};
}

CheckResult lower(std::string name, double measured, double bound, std::string detail = {}) {
  return {std::move(name), measured, bound, true, measured >= bound, std::move(detail)};
}

double rel(cplx x, cplx y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); }

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  cplx complex(double r = 1.0) { return {uniform(-r, r), uniform(-r, r)}; }
  cplx unit_scale() { return std::polar(uniform(0.5, 2.0), uniform(-M_PI, M_PI)); }

  // Orbitals whose c-norms stay well away from zero.
  OrbitalPair orbitals(bool real) {
    for (;;) {
      OrbitalPair o = real ? OrbitalPair{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)}
                           : OrbitalPair{complex(), complex(), complex(), complex()};
      const double nu = std::abs(o.a * o.a + o.b * o.b) / (std::norm(o.a) + std::norm(o.b));
      const double nd = std::abs(o.c * o.c + o.d * o.d) / (std::norm(o.c) + std::norm(o.d));
      if (nu > 0.2 && nd > 0.2) return o;
    }
  }

 private:
  std::mt19937_64 rng_;
};

std::array<cplx, 2> one_particle_levels(cplx ha, cplx hb, double t) {
  const cplx mean = 0.5 * (ha + hb), half = 0.5 * (ha - hb);
  const cplx root = std::sqrt(half * half + t * t);
  return {mean - root, mean + root};
}

void energy_checks(const RunConfig& cfg, std::vector<CheckResult>& out) {
  Sampler rng(cfg.search.rng_seed);
  double nh = 0.0, h = 0.0, red = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const ModelParams p = cfg.model.with_U(rng.uniform(0.0, 8.0));
    const OrbitalPair o = rng.orbitals(false);
    const cplx lu = rng.unit_scale(), ld = rng.unit_scale();
    const OrbitalPair s{lu * o.a, lu * o.b, ld * o.c, ld * o.d};
    nh = std::max(nh, rel(nhmf_energy(p, s).energy, nhmf_energy(p, o).energy));
    h = std::max(h, rel(hmf_energy(p, s).energy, hmf_energy(p, o).energy));
    const OrbitalPair r = rng.orbitals(true);
    red = std::max(red, rel(nhmf_energy(p, r).energy, hmf_energy(p, r).energy));
  }
  out.push_back(upper("gauge invariance of NH energy", nh, 1e-12, "1000 random points"));
  out.push_back(upper("gauge invariance of Hermitian energy", h, 1e-12, "1000 random points"));
  out.push_back(upper("NH energy reduces to Hermitian on real orbitals", red, 1e-12, "1000 random points"));
}

void gradient_checks(const RunConfig& cfg, const VerifyOptions& opt, std::vector<CheckResult>& out) {
  Sampler rng(cfg.search.rng_seed + 1);
  const double step = 1e-5;
  double re_err = 0.0, im_err = 0.0, holo = 0.0;
  for (int k = 0; k < 200; ++k) {
    const ModelParams p = cfg.model.with_U(rng.uniform(0.0, 8.0));
    const OrbitalPair o = rng.orbitals(false);
    auto g = nhmf_gradient(p, o);
    if (opt.corrupt_gradient)
      for (auto& x : g) x += 1e-2 * (1.0 + std::abs(x));
    const auto x0 = o.coeffs();
    auto energy_at = [&](std::size_t i, cplx dx) {
      auto x = x0;
      x[i] += dx;
      return nhmf_energy(p, OrbitalPair::from(x)).energy;
    };
    for (std::size_t i = 0; i < 4; ++i) {
      const cplx fr = (energy_at(i, step) - energy_at(i, -step)) / (2.0 * step);
      const cplx fi = (energy_at(i, I * step) - energy_at(i, -I * step)) / (2.0 * I * step);
      const double scale = std::max(1.0, std::abs(g[i]));
      re_err = std::max(re_err, std::abs(fr - g[i]) / scale);
      im_err = std::max(im_err, std::abs(fi - g[i]) / scale);
      holo = std::max(holo, std::abs(fr - fi) / scale);
    }
  }
  out.push_back(upper("gradient vs real-direction difference quotient", re_err, 1e-4, "200 random points"));
  out.push_back(upper("gradient vs imaginary-direction difference quotient", im_err, 1e-4, "200 random points"));
  out.push_back(upper("real and imaginary quotients agree", holo, 1e-4, "200 random points"));
}

void stationary_checks(const RunConfig& cfg, std::vector<CheckResult>& out) {
  double grad = 0.0, sc = 0.0, pair = 0.0, current = kInf;
  int unpaired = 0, bad_census = 0;
  std::string census;
  for (double U : {1e-4, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const ModelParams p = cfg.model.with_U(U);
    const auto pts = find_nhmf_stationary(p, cfg.search);
    census += (census.empty() ? "" : " ") + format_double(U) + ":" + std::to_string(pts.size());
    if (pts.size() != 8) ++bad_census;
    for (const auto& s : pts) {
      grad = std::max(grad, s.grad_residual);
      sc = std::max(sc, s.self_consistency);
      if (s.cls != PointClass::Complex) continue;
      if (!s.partner) {
        ++unpaired;
        continue;
      }
      const auto& q = pts[*s.partner];
      pair = std::max(pair, std::abs(s.nh_energy - std::conj(q.nh_energy)) / std::max(1.0, std::abs(s.nh_energy)));
      const auto j = bond_current(s.orb, p.t);
      current = std::min(current, std::max(std::abs(j[0]), std::abs(j[1])));
    }
    if (U == 0.5 || U == 4.0)
      for (const auto& s : find_hmf_stationary(p, cfg.hmf_grid)) {
        grad = std::max(grad, s.grad_residual);
        sc = std::max(sc, s.self_consistency);
      }
  }
  out.push_back(upper("stationarity residual at reported points", grad, kGradResidualBound));
  out.push_back(upper("self-consistency residual at reported points", sc, kSelfConsistencyBound));
  out.push_back(upper("NHMF census differs from eight", bad_census, 0.0, census));
  out.push_back(upper("unpaired complex points", unpaired, 0.0));
  out.push_back(upper("conjugate partners have conjugate energies", pair, 1e-8));
  out.push_back(lower("bond current on complex points", current, 1e-6));

  const auto p0 = cfg.model.with_U(0.0);
  const auto ex0 = exact_spectrum(p0).eigenvalues();
  double u0 = 0.0;
  for (const auto& s : find_nhmf_stationary(p0, cfg.search)) {
    double best = kInf;
    for (cplx e : ex0) best = std::min(best, std::abs(s.nh_energy - e));
    u0 = std::max(u0, best);
  }
  out.push_back(upper("uncorrelated NHMF energies are exact eigenvalues", u0, 1e-9));
}

void symmetric_checks(const RunConfig& cfg, std::vector<CheckResult>& out) {
  double im_total = 0.0, im_density = kInf;
  int complex_points = 0;
  for (double U : {0.5, 1.0}) {
    const ModelParams p = ModelParams::symmetric(U, cfg.model.t);
    for (const auto& s : find_nhmf_stationary(p, cfg.search)) {
      if (s.cls != PointClass::Complex) continue;
      ++complex_points;
      im_total = std::max(im_total, std::abs(s.nh_energy.imag()));
      const auto d = nh_site_densities(s.orb);
      im_density = std::min(im_density, std::max({std::abs(d.up_a.imag()), std::abs(d.dn_a.imag())}));
    }
  }
  out.push_back(upper("symmetric case: complex-branch total NH energy is real", im_total, 1e-8,
                      std::to_string(complex_points) + " complex points"));
  out.push_back(lower("symmetric case: complex-branch densities stay complex", im_density, 1e-6));
}

void exact_checks(const RunConfig& cfg, std::vector<CheckResult>& out) {
  double trace = 0.0;
  for (double U : {0.0, 0.5, 2.0, 8.0}) {
    const ModelParams p = cfg.model.with_U(U);
    cplx sum = 0.0;
    for (cplx e : exact_spectrum(p).eigenvalues()) sum += e;
    trace = std::max(trace, rel(sum, build_exact_hamiltonian(p).trace()));
  }
  out.push_back(upper("eigenvalue sum equals trace", trace, 1e-10));

  const ModelParams p0 = cfg.model.with_U(0.0);
  const auto up = one_particle_levels(p0.h_up_a, p0.h_up_b, p0.t);
  const auto dn = one_particle_levels(p0.h_dn_a, p0.h_dn_b, p0.t);
  std::vector<cplx> sums;
  for (cplx x : up)
    for (cplx y : dn) sums.push_back(x + y);
  double kron = 0.0;
  for (cplx e : exact_spectrum(p0).eigenvalues()) {
    double best = kInf;
    for (cplx s : sums) best = std::min(best, std::abs(e - s));
    kron = std::max(kron, best);
  }
  out.push_back(upper("uncorrelated spectrum is the one-particle sum", kron, 1e-9));

  double sym = 0.0;
  for (double U : {0.0, 1.0, 4.0}) {
    const double t = cfg.model.t, r = std::sqrt(U * U + 16.0 * t * t);
    std::array<double, 4> want{(U - r) / 2, 0.0, U, (U + r) / 2};
    std::sort(want.begin(), want.end());
    const auto got = exact_spectrum(ModelParams::symmetric(U, t)).eigenvalues();
    for (std::size_t k = 0; k < 4; ++k) sym = std::max(sym, std::abs(got[k] - want[k]));
  }
  out.push_back(upper("symmetric spectrum closed form", sym, 1e-9));
}

void transport_checks(const RunConfig& cfg, std::vector<CheckResult>& out) {
  const ModelParams p0 = cfg.model.with_U(0.0);
  const auto dn = one_particle_levels(p0.h_dn_a, p0.h_dn_b, p0.t);
  const double beta = cfg.beta;
  double fact = 0.0;
  for (double E = -2.5; E <= 2.5; E += 0.1) {
    const auto roots = exact_reflection_roots(p0, beta, E);
    for (cplx eps : dn) {
      const cplx x = E - eps;
      const cplx g = -I * (p0.t * p0.t / (p0.h_up_b - I * beta - x) - (p0.h_up_a - x));
      const cplx want = r_of_gamma(beta, g);
      double best = kInf;
      for (cplx r : roots) best = std::min(best, std::abs(r - want));
      fact = std::max(fact, best);
    }
  }
  out.push_back(upper("uncorrelated reflections factorise", fact, 1e-9));

  SSPConfig ssp;
  ssp.beta = beta;
  ssp.e_grid = SSPConfig::grid(-2.0, 2.0, 0.02);
  double outside = 0.0;
  for (int k : {0, 1})
    for (const auto& s : exact_transmission_curve(cfg.model.with_U(0.2), ssp, k).points)
      if (s.branch_flag) outside = std::max({outside, -s.T, s.T - 1.0});
  out.push_back(upper("unflagged transmission lies in [0, 1]", outside, 1e-12));
}

}  // namespace

std::vector<CheckResult> run_verify(const RunConfig& cfg, const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  energy_checks(cfg, out);
  gradient_checks(cfg, opt, out);
  stationary_checks(cfg, out);
  symmetric_checks(cfg, out);
  exact_checks(cfg, out);
  transport_checks(cfg, out);
  return out;
}

}  // namespace nhmf::cli
