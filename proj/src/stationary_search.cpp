#include "nhmf/stationary_search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nhmf/errors.hpp"

namespace nhmf {

namespace {

constexpr double kPi = std::numbers::pi;

// Chart-reduced iterate: each spin has one coefficient pinned to 1 and one
// free coordinate z.
struct ChartIterate {
  bool pin_first_up = false;  // false: b = 1, free a
  bool pin_first_dn = false;  // false: d = 1, free c
  cplx zu, zd;

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

  // switch a spin's chart once its free coordinate dominates the pinned one
  void rechart() {
    if (std::abs(zu) > 10.0) zu = 1.0 / zu, pin_first_up = !pin_first_up;
    if (std::abs(zd) > 10.0) zd = 1.0 / zd, pin_first_dn = !pin_first_dn;
  }
};

Chart chart_of(bool pin_first_up, bool pin_first_dn) {
  if (!pin_first_up) return pin_first_dn ? Chart::BC : Chart::BD;
  return pin_first_dn ? Chart::AC : Chart::AD;
}

ChartIterate iterate_in(Chart c, cplx zu, cplx zd) {
  ChartIterate it;
  it.pin_first_up = (c == Chart::AD || c == Chart::AC);
  it.pin_first_dn = (c == Chart::BC || c == Chart::AC);
  it.zu = zu;
  it.zd = zd;
  return it;
}

ChartIterate iterate_from(const OrbitalPair& orb) {
  Chart c;
  const OrbitalPair g = gauge_fix(orb, &c);
  const ChartIterate probe = iterate_in(c, 0.0, 0.0);
  return iterate_in(c, probe.pin_first_up ? g.b : g.a, probe.pin_first_dn ? g.d : g.c);
}

std::optional<Vec2> chart_residual(const ModelParams& p, const ChartIterate& it) {
  const OrbitalPair o = it.orbitals();
  if (!o.nh_evaluable()) return std::nullopt;
  const auto g = nhmf_scaled_gradient(p, o);
  Vec2 f(g[it.free_up()], g[it.free_dn()]);
  if (!f.allFinite()) return std::nullopt;
  return f;
}

double spin_self_consistency(const Mat2& f, const Vec2& v) {
  const auto pairs = eig_small(f);
  return std::min(projective_distance<2>(pairs[0].vector, v),
                  projective_distance<2>(pairs[1].vector, v));
}

bool points_less(const StationaryPoint& x, const StationaryPoint& y) {
  constexpr double tie = 1e-9;
  if (std::abs(x.nh_energy.real() - y.nh_energy.real()) > tie)
    return x.nh_energy.real() < y.nh_energy.real();
  if (std::abs(x.nh_energy.imag() - y.nh_energy.imag()) > tie)
    return x.nh_energy.imag() < y.nh_energy.imag();
  return x.h_energy_at_point < y.h_energy_at_point;
}

void insert_unique(std::vector<StationaryPoint>& set, StationaryPoint s, double tol) {
  for (auto& q : set) {
    if (orbital_distance(q.orb, s.orb) <= tol) {
      if (s.grad_residual < q.grad_residual) q = std::move(s);
      return;
    }
  }
  set.push_back(std::move(s));
}

// Hermitian functional over real orbitals (cos th, sin th), (cos ph, sin ph).
struct AngleModel {
  double t, du, dd, U;
  explicit AngleModel(const ModelParams& p)
      : t(p.t),
        du((p.h_up_a - p.h_up_b).real()),
        dd((p.h_dn_a - p.h_dn_b).real()),
        U(p.U) {}

  std::array<double, 2> gradient(double th, double ph) const {
    const double s2t = std::sin(2 * th), c2t = std::cos(2 * th);
    const double s2p = std::sin(2 * ph), c2p = std::cos(2 * ph);
    return {-du * s2t - 2 * t * c2t - U * c2p * s2t, -dd * s2p - 2 * t * c2p - U * c2t * s2p};
  }

  std::array<double, 3> hessian(double th, double ph) const {
    const double s2t = std::sin(2 * th), c2t = std::cos(2 * th);
    const double s2p = std::sin(2 * ph), c2p = std::cos(2 * ph);
    return {-2 * du * c2t + 4 * t * s2t - 2 * U * c2p * c2t,
            -2 * dd * c2p + 4 * t * s2p - 2 * U * c2t * c2p, 2 * U * s2p * s2t};
  }
};

double wrap_pi(double x) {
  x = std::fmod(x, kPi);
  return x < 0 ? x + kPi : x;
}

std::optional<std::array<double, 2>> angle_newton(const AngleModel& m, double th, double ph) {
  for (int it = 0; it < 60; ++it) {
    const auto g = m.gradient(th, ph);
    const double gn = std::hypot(g[0], g[1]);
    if (gn <= 1e-14) return std::array<double, 2>{wrap_pi(th), wrap_pi(ph)};
    const auto h = m.hessian(th, ph);
    const double det = h[0] * h[1] - h[2] * h[2];
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const double dth = -(h[1] * g[0] - h[2] * g[1]) / det;
    const double dph = -(h[0] * g[1] - h[2] * g[0]) / det;
    double lam = 1.0;
    bool accepted = false;
    for (int k = 0; k <= 20; ++k, lam *= 0.5) {
      const auto gt = m.gradient(th + lam * dth, ph + lam * dph);
      if (std::hypot(gt[0], gt[1]) < gn) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return gn <= 1e-12 ? std::optional{std::array<double, 2>{wrap_pi(th), wrap_pi(ph)}}
                                      : std::nullopt;
    th += lam * dth;
    ph += lam * dph;
    if (lam * std::hypot(dth, dph) <= 1e-15) break;
  }
  const auto g = m.gradient(th, ph);
  if (std::hypot(g[0], g[1]) > 1e-12) return std::nullopt;
  return std::array<double, 2>{wrap_pi(th), wrap_pi(ph)};
}

double angle_distance(double x, double y) {
  const double d = std::abs(wrap_pi(x) - wrap_pi(y));
  return std::min(d, kPi - d);
}

OrbitalPair angle_orbitals(double th, double ph) {
  return {std::cos(th), std::sin(th), std::cos(ph), std::sin(ph)};
}

std::array<double, 2> orbital_angles(const OrbitalPair& o) {
  return {wrap_pi(std::atan2(o.b.real(), o.a.real())), wrap_pi(std::atan2(o.d.real(), o.c.real()))};
}

}  // namespace

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::BD: return "b=1,d=1";
    case Chart::AD: return "a=1,d=1";
    case Chart::BC: return "b=1,c=1";
    case Chart::AC: return "a=1,c=1";
  }
  return "?";
}

const char* class_name(PointClass c) {
  return c == PointClass::RealRepresentable ? "real" : "complex";
}

double orbital_distance(const OrbitalPair& x, const OrbitalPair& y) {
  return std::max(projective_distance<2>(x.up(), y.up()), projective_distance<2>(x.dn(), y.dn()));
}

OrbitalPair gauge_fix(const OrbitalPair& orb, Chart* chart) {
  orb.require_nonzero();
  const bool pin_first_up = std::abs(orb.a) >= std::abs(orb.b);
  const bool pin_first_dn = std::abs(orb.c) >= std::abs(orb.d);
  OrbitalPair g;
  if (pin_first_up) g.a = 1.0, g.b = orb.b / orb.a;
  else g.a = orb.a / orb.b, g.b = 1.0;
  if (pin_first_dn) g.c = 1.0, g.d = orb.d / orb.c;
  else g.c = orb.c / orb.d, g.d = 1.0;
  if (chart) *chart = chart_of(pin_first_up, pin_first_dn);
  return g;
}

StationaryPoint make_point(const ModelParams& p, const OrbitalPair& orb) {
  StationaryPoint s;
  s.orb = gauge_fix(orb, &s.chart);
  const NhEnergy nh = nhmf_energy(p, s.orb);
  s.nh_energy = nh.energy;
  s.gamma = nh.gamma();
  s.h_energy_at_point = hmf_energy(p, s.orb).energy;
  s.fock = nh_fock(p, s.orb);
  s.occ_energies = orbital_energies(s.fock, s.orb);
  s.grad_residual = stationarity_residual(p, s.orb);
  s.self_consistency = std::max(spin_self_consistency(s.fock.up, s.orb.up()),
                                spin_self_consistency(s.fock.dn, s.orb.dn()));
  const bool real_up = projective_distance<2>(s.orb.up(), Vec2(s.orb.up().conjugate())) <= kRealClassTol;
  const bool real_dn = projective_distance<2>(s.orb.dn(), Vec2(s.orb.dn().conjugate())) <= kRealClassTol;
  s.cls = (real_up && real_dn) ? PointClass::RealRepresentable : PointClass::Complex;
  return s;
}

bool is_accepted(const StationaryPoint& s) {
  return s.grad_residual <= kGradResidualBound && s.self_consistency <= kSelfConsistencyBound;
}

StationaryPoint refine_newton(const ModelParams& p, const OrbitalPair& seed, const SearchConfig& cfg) {
  seed.require_nonzero();
  ChartIterate it = iterate_from(seed);
  double last = std::numeric_limits<double>::infinity();

  auto finish = [&]() -> StationaryPoint {
    const OrbitalPair o = it.orbitals();
    if (!o.nh_evaluable()) throw ConvergenceError("refine_newton: iterate is gauge-singular", last);
    StationaryPoint s = make_point(p, o);
    if (!is_accepted(s))
      throw ConvergenceError("refine_newton: residual above bound", s.grad_residual);
    return s;
  };

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    it.rechart();
    const auto f = chart_residual(p, it);
    if (!f) throw ConvergenceError("refine_newton: iterate is gauge-singular", last);
    last = f->norm();
    if (last == 0.0) return finish();

    const Mat4 j4 = nhmf_scaled_jacobian(p, it.orbitals());
    Mat2 j;
    j << j4(it.free_up(), it.free_up()), j4(it.free_up(), it.free_dn()),
        j4(it.free_dn(), it.free_up()), j4(it.free_dn(), it.free_dn());
    const cplx det = j.determinant();
    if (det == 0.0 || !std::isfinite(std::abs(det)))
      throw ConvergenceError("refine_newton: singular Jacobian", last);
    const Vec2 step = -(j.inverse() * (*f));

    double lam = 1.0;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, lam *= 0.5) {
      ChartIterate trial = it;
      trial.zu += lam * step(0);
      trial.zd += lam * step(1);
      const auto ft = chart_residual(p, trial);
      if (ft && ft->norm() < last) {
        it = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) return finish();  // rounding floor or a stalled seed
    const double scale = std::max({1.0, std::abs(it.zu), std::abs(it.zd)});
    if (lam * step.norm() <= cfg.newton_tol * scale) return finish();
  }
  return finish();
}

std::vector<StationaryPoint> find_nhmf_stationary(const ModelParams& p, const SearchConfig& cfg) {
  p.validate();
  std::vector<cplx> values;
  for (double re : cfg.seed_values)
    for (double im : cfg.seed_values) values.emplace_back(re, im);

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);

  std::vector<StationaryPoint> found;
  auto attempt = [&](Chart c, cplx zu, cplx zd) {
    const OrbitalPair seed = iterate_in(c, zu, zd).orbitals();
    if (!seed.nh_evaluable()) return;
    try {
      insert_unique(found, refine_newton(p, seed, cfg), cfg.dedupe_tol);
    } catch (const Error&) {
      // seed outside every basin
    }
  };

  for (Chart c : {Chart::BD, Chart::AD, Chart::BC, Chart::AC}) {
    for (cplx zu : values)
      for (cplx zd : values) attempt(c, zu, zd);
    for (double eps : cfg.singular_offsets)
      for (double su : {-1.0, 1.0})
        for (double sd : {-1.0, 1.0})
          for (int ku = 0; ku < 4; ++ku)
            for (int kd = 0; kd < 4; ++kd) {
              const cplx zu = su * I * (1.0 + std::polar(eps, 0.25 * kPi * (2 * ku + 1)));
              const cplx zd = sd * I * (1.0 + std::polar(eps, 0.25 * kPi * (2 * kd + 1)));
              attempt(c, zu, zd);
            }
    for (int k = 0; k < cfg.random_starts; ++k) {
      const cplx zu(uni(rng), uni(rng)), zd(uni(rng), uni(rng));
      attempt(c, zu, zd);
    }
  }

  if (p.is_isolated()) {
    // real parameters: the set is closed under conjugation
    const std::size_t n = found.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (found[i].cls != PointClass::Complex) continue;
      try {
        insert_unique(found, refine_newton(p, found[i].orb.conj(), cfg), cfg.dedupe_tol);
      } catch (const Error&) {
      }
    }
  }

  sort_points(found);
  if (p.is_isolated()) {
    try {
      classify_points(found);
    } catch (const PairingError&) {
      // leave partners unset; the census check reports it
    }
  }
  return found;
}

std::vector<StationaryPoint> find_hmf_stationary(const ModelParams& p, int grid) {
  p.validate();
  if (!p.is_isolated()) throw InputError("find_hmf_stationary: on-site energies must be real");
  if (grid < 8) throw InputError("find_hmf_stationary: grid too coarse");
  const AngleModel m(p);
  const double step = kPi / grid;

  std::vector<double> g2(static_cast<std::size_t>(grid) * grid);
  auto at = [&](int i, int j) -> double& {
    return g2[static_cast<std::size_t>((i + grid) % grid) * grid + (j + grid) % grid];
  };
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const auto g = m.gradient(i * step, j * step);
      at(i, j) = g[0] * g[0] + g[1] * g[1];
    }

  std::vector<std::array<double, 2>> roots;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double v = at(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          if ((di || dj) && at(i + di, j + dj) < v) {
            is_min = false;
            break;
          }
      if (!is_min) continue;
      const auto r = angle_newton(m, i * step, j * step);
      if (!r) continue;
      bool dup = false;
      for (const auto& q : roots)
        if (angle_distance(q[0], (*r)[0]) <= 1e-6 && angle_distance(q[1], (*r)[1]) <= 1e-6) dup = true;
      if (!dup) roots.push_back(*r);
    }

  std::vector<StationaryPoint> out;
  for (const auto& r : roots) {
    StationaryPoint s = make_point(p, angle_orbitals(r[0], r[1]));
    s.cls = PointClass::RealRepresentable;
    out.push_back(std::move(s));
  }
  sort_points(out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].partner = i;
  return out;
}

void classify_points(std::vector<StationaryPoint>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& s = points[i];
    if (s.cls == PointClass::RealRepresentable) {
      s.partner = i;
      continue;
    }
    const OrbitalPair c = s.orb.conj();
    std::optional<std::size_t> match;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i || points[j].cls != PointClass::Complex) continue;
      if (orbital_distance(points[j].orb, c) <= kPairingTol) {
        match = j;
        break;
      }
    }
    if (!match) throw PairingError("classify_points: complex point without conjugate partner");
    s.partner = match;
  }
}

void sort_points(std::vector<StationaryPoint>& points) {
  std::stable_sort(points.begin(), points.end(), points_less);
}

std::vector<BranchFamily> sweep_branches(const ModelParams& p, const std::vector<double>& u_grid,
                                         const SweepOptions& opt) {
  if (u_grid.empty()) throw InputError("sweep_branches: empty U grid");
  if (!std::is_sorted(u_grid.begin(), u_grid.end()))
    throw InputError("sweep_branches: U grid must be ascending");
  const bool nh = opt.functional == Functional::NonHermitian;
  const std::string prefix = nh ? "nh" : "h";

  std::vector<BranchFamily> branches;
  for (std::size_t gi = 0; gi < u_grid.size(); ++gi) {
    const ModelParams pu = p.with_U(u_grid[gi]);

    std::vector<StationaryPoint> cand =
        nh ? find_nhmf_stationary(pu, opt.search) : find_hmf_stationary(pu, opt.hmf_grid);

    // continuation from the previous grid point
    if (gi > 0) {
      const AngleModel am(pu);
      for (const auto& b : branches) {
        if (!b.points.back()) continue;
        const OrbitalPair& prev = b.points.back()->orb;
        try {
          if (nh) {
            insert_unique(cand, refine_newton(pu, prev, opt.search), opt.search.dedupe_tol);
          } else {
            const auto ang = orbital_angles(prev);
            if (const auto r = angle_newton(am, ang[0], ang[1])) {
              StationaryPoint s = make_point(pu, angle_orbitals((*r)[0], (*r)[1]));
              s.cls = PointClass::RealRepresentable;
              insert_unique(cand, std::move(s), opt.search.dedupe_tol);
            }
          }
        } catch (const Error&) {
        }
      }
    }
    sort_points(cand);
    if (nh && pu.is_isolated()) {
      try {
        classify_points(cand);
      } catch (const PairingError&) {
      }
    }

    // greedy assignment by projective distance
    struct Link {
      double d;
      std::size_t branch, point;
    };
    std::vector<Link> links;
    for (std::size_t bi = 0; bi < branches.size(); ++bi) {
      if (!branches[bi].points.back()) continue;
      for (std::size_t ci = 0; ci < cand.size(); ++ci) {
        const double d = orbital_distance(branches[bi].points.back()->orb, cand[ci].orb);
        if (d <= opt.max_jump) links.push_back({d, bi, ci});
      }
    }
    std::stable_sort(links.begin(), links.end(), [](const Link& x, const Link& y) { return x.d < y.d; });
    std::vector<std::optional<std::size_t>> assigned(branches.size());
    std::vector<bool> used(cand.size(), false);
    for (const auto& l : links) {
      if (assigned[l.branch] || used[l.point]) continue;
      assigned[l.branch] = l.point;
      used[l.point] = true;
    }
    for (std::size_t bi = 0; bi < branches.size(); ++bi) {
      branches[bi].u_values.push_back(u_grid[gi]);
      if (assigned[bi]) branches[bi].points.push_back(cand[*assigned[bi]]);
      else branches[bi].points.push_back(std::nullopt);
    }
    for (std::size_t ci = 0; ci < cand.size(); ++ci) {
      if (used[ci]) continue;
      BranchFamily b;
      b.label = prefix + "-" + std::to_string(branches.size());
      b.u_values.assign(u_grid.begin(), u_grid.begin() + static_cast<long>(gi) + 1);
      b.points.assign(gi, std::nullopt);
      b.points.push_back(cand[ci]);
      branches.push_back(std::move(b));
    }
  }
  return branches;
}

double locate_hmf_bifurcation(const ModelParams& p, double u_lo, double u_hi, double tol, int grid) {
  if (!(u_lo < u_hi)) throw InputError("locate_hmf_bifurcation: empty bracket");
  auto count = [&](double u) { return find_hmf_stationary(p.with_U(u), grid).size(); };
  const std::size_t n_lo = count(u_lo);
  if (count(u_hi) == n_lo) throw BracketError("locate_hmf_bifurcation: counts equal at both ends");
  while (u_hi - u_lo > tol) {
    const double mid = 0.5 * (u_lo + u_hi);
    if (count(mid) == n_lo) u_lo = mid;
    else u_hi = mid;
  }
  return 0.5 * (u_lo + u_hi);
}

}  // namespace nhmf
