#include "nhmf/ssp_transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nhmf/errors.hpp"

namespace nhmf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

cplx exact_det(const ModelParams& p, double beta, cplx gamma_a, double E) {
  const Mat4 h = build_exact_hamiltonian(dressed_params(p, beta, gamma_a));
  return (h - E * Mat4::Identity()).determinant();
}

std::array<cplx, 2> stable_quadratic(cplx a, cplx b, cplx c) {
  const cplx disc = std::sqrt(b * b - 4.0 * a * c);
  const cplx q = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0.0 ? disc : -disc));
  return {q / a, c / q};
}

ReflectionSolution make_solution(double energy, cplx r) {
  ReflectionSolution s;
  s.energy = energy;
  s.r = r;
  s.T = transmission_from_r(r);
  s.branch_flag = std::isfinite(std::abs(r)) && std::abs(r) <= 1.0 + 1e-9;
  return s;
}

ReflectionSolution flagged_solution(double energy) {
  ReflectionSolution s;
  s.energy = energy;
  s.r = {kNaN, kNaN};
  s.T = kNaN;
  s.branch_flag = false;
  return s;
}

// Chart-reduced unknowns of the coupled transport problem.
struct MfIterate {
  bool pin_first_up = false, pin_first_dn = false;
  cplx zu, zd, g;

  OrbitalPair orbitals() const {
    OrbitalPair o;
    if (pin_first_up) o.a = 1.0, o.b = zu;
    else o.a = zu, o.b = 1.0;
    if (pin_first_dn) o.c = 1.0, o.d = zd;
    else o.c = zd, o.d = 1.0;
    return o;
  }
  int free_up() const { return pin_first_up ? 1 : 0; }
  int free_dn() const { return pin_first_dn ? 3 : 2; }
};

MfIterate mf_iterate_from(const MfState& s) {
  const OrbitalPair o = gauge_fix(s.orb);
  MfIterate it;
  it.pin_first_up = (o.a == 1.0);
  it.pin_first_dn = (o.c == 1.0);
  it.zu = it.pin_first_up ? o.b : o.a;
  it.zd = it.pin_first_dn ? o.d : o.c;
  it.g = s.gamma_a;
  return it;
}

struct MfSystem {
  Eigen::Matrix<cplx, 3, 1> f;
  Eigen::Matrix<cplx, 3, 3> j;
};

std::optional<MfSystem> mf_system(const ModelParams& p, double beta, double E, const MfIterate& it,
                                  bool with_jacobian) {
  const OrbitalPair o = it.orbitals();
  if (!o.nh_evaluable()) return std::nullopt;
  const ModelParams pg = dressed_params(p, beta, it.g);
  const auto sg = nhmf_scaled_gradient(pg, o);
  const cplx nd = o.c * o.c + o.d * o.d;
  const cplx q = o.c * o.c / nd;
  const cplx du = pg.h_up_a + p.U * q - E;
  const cplx dd = pg.h_up_b + p.U * (1.0 - q) - E;

  MfSystem s;
  s.f << sg[it.free_up()], sg[it.free_dn()], du * dd - p.t * p.t;
  if (!s.f.allFinite()) return std::nullopt;
  if (!with_jacobian) return s;

  const Mat4 js = nhmf_scaled_jacobian(pg, o);
  const int iu = it.free_up(), id = it.free_dn();
  // d(scaled up gradient)/d h_up_a, times d h_up_a / d g = i
  const cplx dsg_dh = iu == 0 ? 2.0 * o.a * o.b * o.b : -2.0 * o.a * o.a * o.b;
  const cplx dq = id == 2 ? 2.0 * o.c * o.d * o.d / (nd * nd) : -2.0 * o.c * o.c * o.d / (nd * nd);
  s.j << js(iu, iu), js(iu, id), I * dsg_dh,
         js(id, iu), js(id, id), 0.0,
         0.0, p.U * dq * (dd - du), I * dd;
  return s;
}

}  // namespace

void SSPConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("SSPConfig: beta must be positive");
  if (e_grid.empty()) throw InputError("SSPConfig: empty energy grid");
  for (std::size_t i = 1; i < e_grid.size(); ++i)
    if (!(e_grid[i] > e_grid[i - 1])) throw InputError("SSPConfig: energy grid must be strictly ascending");
  if (root_pick == RootPick::Index && (root_index < 0 || root_index > 1))
    throw InputError("SSPConfig: root index must be 0 or 1");
}

std::vector<double> SSPConfig::grid(double e_min, double e_max, double e_step) {
  if (!(e_step > 0.0) || !(e_max >= e_min)) throw InputError("energy grid: bad range or step");
  const auto n = static_cast<long>(std::floor((e_max - e_min) / e_step + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) out.push_back(e_min + static_cast<double>(k) * e_step);
  return out;
}

cplx gamma_of_r(double beta, cplx r) {
  if (r == cplx(1.0)) throw PoleError("gamma_of_r: pole at r = 1");
  return beta * (1.0 + r) / (1.0 - r);
}

cplx r_of_gamma(double beta, cplx g) { return (g - beta) / (g + beta); }

Mat2 ssp_one_particle_matrix(cplx h_a, cplx h_b, double t, double beta, cplx r) {
  const cplx ga = gamma_of_r(beta, r);
  Mat2 m;
  m << h_a + I * ga, -t, -t, h_b - I * beta;
  return m;
}

double transmission_from_r(cplx r) { return 1.0 - std::norm(r); }

ModelParams dressed_params(const ModelParams& p, double beta, cplx gamma_a) {
  ModelParams q = p;
  q.h_up_a += I * gamma_a;
  q.h_up_b -= I * beta;
  return q;
}

std::vector<cplx> exact_reflection_roots(const ModelParams& p, double beta, double E) {
  p.validate();
  if (!(beta > 0.0)) throw InputError("exact_reflection_roots: beta must be positive");
  // det(H(g) - E) is quadratic in g
  const cplx f0 = exact_det(p, beta, 0.0, E);
  const cplx f1 = exact_det(p, beta, 1.0, E);
  const cplx fm = exact_det(p, beta, -1.0, E);
  const cplx A = 0.5 * (f1 + fm) - f0, B = 0.5 * (f1 - fm), C = f0;
  const double b = beta, b2 = beta * beta;
  const cplx c2 = A * b2 - B * b + C;
  const cplx c1 = 2.0 * A * b2 - 2.0 * C;
  const cplx c0 = A * b2 + B * b + C;
  const double scale = std::abs(f0) + std::abs(f1) + std::abs(fm);
  const double cmax = std::max({std::abs(c0), std::abs(c1), std::abs(c2)});
  if (cmax <= 1e-14 * std::max(1.0, scale))
    throw DegenerateError("exact_reflection_roots: cleared polynomial vanishes identically");

  std::vector<cplx> roots;
  if (std::abs(c2) <= 1e-14 * cmax) {
    if (std::abs(c1) > 1e-14 * cmax) roots.push_back(-c0 / c1);
  } else {
    const auto q = stable_quadratic(c2, c1, c0);
    roots.assign(q.begin(), q.end());
  }

  std::vector<cplx> out;
  for (cplx r : roots) {
    if (!std::isfinite(std::abs(r))) continue;
    for (int it = 0; it < 3; ++it) {
      const cplx val = (c2 * r + c1) * r + c0;
      const cplx der = 2.0 * c2 * r + c1;
      if (der == 0.0) break;
      r -= val / der;
    }
    if (std::abs(r - 1.0) <= 1e-12) continue;
    out.push_back(r);
  }
  return out;
}

StationaryPoint matching_nhmf_point(const ModelParams& p, int state,
                                    const std::vector<StationaryPoint>& isolated) {
  if (state < 0 || state > 3) throw InputError("matching_nhmf_point: state index must be 0..3");
  const double exact = exact_spectrum(p).eigenvalues()[static_cast<std::size_t>(state)].real();
  const StationaryPoint* best = nullptr;
  for (const auto& s : isolated) {
    if (state == 0) {
      if (s.cls == PointClass::RealRepresentable && (!best || s.nh_energy.real() < best->nh_energy.real()))
        best = &s;
    } else if (state == 1) {
      if (s.cls != PointClass::Complex || s.nh_energy.imag() >= 0.0) continue;
      if (!best || std::abs(s.h_energy_at_point - exact) < std::abs(best->h_energy_at_point - exact))
        best = &s;
    } else {
      if (s.cls != PointClass::RealRepresentable) continue;
      if (!best || std::abs(s.h_energy_at_point - exact) < std::abs(best->h_energy_at_point - exact))
        best = &s;
    }
  }
  if (!best) throw CensusError("no NHMF point matches exact state " + std::to_string(state));
  return *best;
}

TransmissionCurve exact_transmission_curve(const ModelParams& p, const SSPConfig& cfg, int state) {
  cfg.validate();
  if (state < 0 || state > 3) throw InputError("exact_transmission_curve: state index must be 0..3");
  TransmissionCurve curve;
  curve.state_label = "exact-" + std::to_string(state);
  if (cfg.shift_mode == ShiftMode::Fixed) {
    curve.shift = cfg.shift_value;
  } else {
    const auto pts = find_nhmf_stationary(p);
    curve.shift = matching_nhmf_point(p, state, pts).occ_energies[1].real();
  }

  const std::size_t n = cfg.e_grid.size();
  std::vector<std::array<cplx, 2>> tracks(n);
  std::vector<int> count(n, 0);
  std::optional<std::array<cplx, 2>> prev;
  for (std::size_t i = 0; i < n; ++i) {
    const auto roots = exact_reflection_roots(p, cfg.beta, cfg.e_grid[i] + curve.shift);
    count[i] = static_cast<int>(roots.size());
    std::array<cplx, 2> pair{roots.size() > 0 ? roots[0] : cplx(kNaN, kNaN),
                             roots.size() > 1 ? roots[1] : cplx(kNaN, kNaN)};
    if (prev && roots.size() == 2) {
      const double keep = std::abs(pair[0] - (*prev)[0]) + std::abs(pair[1] - (*prev)[1]);
      const double swap = std::abs(pair[1] - (*prev)[0]) + std::abs(pair[0] - (*prev)[1]);
      if (swap < keep) std::swap(pair[0], pair[1]);
    }
    if (roots.size() == 2) prev = pair;
    tracks[i] = pair;
  }

  int pick = cfg.root_index;
  if (cfg.root_pick == RootPick::PhysicalContinuity) {
    const double eig = exact_spectrum(p).eigenvalues()[static_cast<std::size_t>(state)].real();
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(cfg.e_grid[i] + curve.shift - eig) < std::abs(cfg.e_grid[anchor] + curve.shift - eig))
        anchor = i;
    const auto& a = tracks[anchor];
    auto badness = [](cplx r) { return std::isfinite(std::abs(r)) ? std::abs(r) : 1e300; };
    pick = badness(a[1]) < badness(a[0]) ? 1 : 0;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const cplx r = tracks[i][static_cast<std::size_t>(pick)];
    curve.points.push_back(std::isfinite(std::abs(r)) ? make_solution(cfg.e_grid[i], r)
                                                      : flagged_solution(cfg.e_grid[i]));
  }
  return curve;
}

cplx mf_seed_gamma(const ModelParams& p, double beta, double E, const OrbitalPair& orb) {
  const SiteDensities n = nh_site_densities(orb);
  const cplx b = p.h_up_b - I * beta + p.U * n.dn_b - E;
  if (b == 0.0) throw PoleError("mf_seed_gamma: singular seed");
  return (p.t * p.t / b - (p.h_up_a + p.U * n.dn_a - E)) / I;
}

std::pair<StationaryPoint, ReflectionSolution> mf_reflection(const ModelParams& p, double beta,
                                                             double E, const MfState& seed) {
  p.validate();
  if (!(beta > 0.0)) throw InputError("mf_reflection: beta must be positive");
  MfIterate it = mf_iterate_from(seed);
  double last = std::numeric_limits<double>::infinity();

  auto finish = [&]() {
    const OrbitalPair o = it.orbitals();
    const ModelParams pg = dressed_params(p, beta, it.g);
    const auto sys = mf_system(p, beta, E, it, false);
    if (!sys) throw ConvergenceError("mf_reflection: gauge-singular iterate", last);
    const double res = std::max(stationarity_residual(pg, o), std::abs(sys->f(2)));
    if (!(res <= 1e-10) || it.g + beta == 0.0)
      throw ConvergenceError("mf_reflection: residual above bound", res);
    StationaryPoint s = make_point(pg, o);
    return std::make_pair(s, make_solution(E, r_of_gamma(beta, it.g)));
  };

  for (int iter = 0; iter < 60; ++iter) {
    const auto sys = mf_system(p, beta, E, it, true);
    if (!sys) throw ConvergenceError("mf_reflection: gauge-singular iterate", last);
    last = sys->f.norm();
    if (last == 0.0) return finish();
    const auto lu = sys->j.fullPivLu();
    if (!lu.isInvertible()) throw ConvergenceError("mf_reflection: singular Jacobian", last);
    const Eigen::Matrix<cplx, 3, 1> step = -lu.solve(sys->f);

    double lam = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 20; ++h, lam *= 0.5) {
      MfIterate trial = it;
      trial.zu += lam * step(0);
      trial.zd += lam * step(1);
      trial.g += lam * step(2);
      const auto ts = mf_system(p, beta, E, trial, false);
      if (ts && ts->f.norm() < last) {
        it = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) return finish();
    const double scale = std::max({1.0, std::abs(it.zu), std::abs(it.zd), std::abs(it.g)});
    if (lam * step.norm() <= 1e-13 * scale) return finish();
  }
  return finish();
}

TransmissionCurve mf_transmission_curve(const ModelParams& p, const SSPConfig& cfg,
                                        const StationaryPoint& isolated, std::string label) {
  cfg.validate();
  TransmissionCurve curve;
  curve.state_label = std::move(label);
  curve.shift = 0.0;  // the channel energy is already an orbital energy
  std::optional<MfState> prev;
  for (double E : cfg.e_grid) {
    std::vector<MfState> seeds;
    if (prev) seeds.push_back(*prev);
    try {
      seeds.push_back({isolated.orb, mf_seed_gamma(p, cfg.beta, E, isolated.orb)});
    } catch (const Error&) {
    }
    bool done = false;
    for (const auto& s : seeds) {
      try {
        auto [pt, sol] = mf_reflection(p, cfg.beta, E, s);
        prev = MfState{pt.orb, gamma_of_r(cfg.beta, sol.r)};
        curve.points.push_back(sol);
        done = true;
        break;
      } catch (const Error&) {
      }
    }
    if (!done) {
      curve.points.push_back(flagged_solution(E));
      prev.reset();
    }
  }
  return curve;
}

std::vector<TransmissionCurve> mf_transmission_curves(const ModelParams& p, const SSPConfig& cfg,
                                                      const SearchConfig& search) {
  cfg.validate();
  const auto pts = find_nhmf_stationary(p, search);
  const StationaryPoint ground = matching_nhmf_point(p, 0, pts);

  const StationaryPoint* partner = nullptr;
  for (const auto& s : pts) {
    if (s.cls != PointClass::RealRepresentable || orbital_distance(s.orb, ground.orb) <= 1e-8) continue;
    if (!partner || projective_distance<2>(s.orb.up(), ground.orb.up()) <
                        projective_distance<2>(partner->orb.up(), ground.orb.up()))
      partner = &s;
  }
  if (!partner) throw CensusError("mf_transmission_curves: no partner for the ground point");

  const StationaryPoint excited = matching_nhmf_point(p, 1, pts);
  if (!excited.partner) throw CensusError("mf_transmission_curves: first excited point has no partner");
  const StationaryPoint* conj = nullptr;
  for (const auto& s : pts)
    if (orbital_distance(s.orb, excited.orb.conj()) <= kPairingTol) conj = &s;
  if (!conj) throw CensusError("mf_transmission_curves: conjugate partner not found");

  std::vector<TransmissionCurve> out;
  out.push_back(mf_transmission_curve(p, cfg, ground, "mf-standard-ground"));
  out.push_back(mf_transmission_curve(p, cfg, *partner, "mf-standard-partner"));
  out.push_back(mf_transmission_curve(p, cfg, excited, "mf-complex-minus"));
  out.push_back(mf_transmission_curve(p, cfg, *conj, "mf-complex-plus"));
  return out;
}

std::vector<double> curve_peaks(const TransmissionCurve& c, double floor) {
  std::vector<double> out;
  const auto& pts = c.points;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (!pts[i - 1].branch_flag || !pts[i].branch_flag || !pts[i + 1].branch_flag) continue;
    if (pts[i].T > pts[i - 1].T && pts[i].T >= pts[i + 1].T && pts[i].T > floor)
      out.push_back(pts[i].energy);
  }
  return out;
}

}  // namespace nhmf
