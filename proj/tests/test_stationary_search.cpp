#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nhmf/errors.hpp"
#include "nhmf/stationary_search.hpp"
#include "oracles.hpp"

using namespace nhmf;

namespace {

const OrbitalPair kCaseStudyOrb{0.708, {0.176, 0.684}, {0.162, 0.667}, 0.728};

const StationaryPoint* first_excited(const std::vector<StationaryPoint>& pts, double exact) {
  const StationaryPoint* best = nullptr;
  for (const auto& s : pts) {
    if (s.cls != PointClass::Complex || s.nh_energy.imag() >= 0.0) continue;
    if (!best || std::abs(s.h_energy_at_point - exact) < std::abs(best->h_energy_at_point - exact))
      best = &s;
  }
  return best;
}

}  // namespace

TEST_CASE("census agrees with the elimination oracle") {
  for (double U : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    CAPTURE(U);
    const auto p = ModelParams::reference(U);
    const auto pts = find_nhmf_stationary(p);
    REQUIRE(pts.size() == 8);
    const auto roots = oracle::census_by_resultant(p);
    REQUIRE(roots.size() == 8);
    std::vector<bool> used(roots.size(), false);
    for (const auto& s : pts) {
      double best = 1e300;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < roots.size(); ++k) {
        if (used[k]) continue;
        const double d = std::abs(oracle::nh_energy_chart(p, roots[k][0], roots[k][1]) - s.nh_energy);
        if (d < best) best = d, arg = k;
      }
      used[arg] = true;
      CHECK(best < 1e-7 * std::max(1.0, std::abs(s.nh_energy)));
    }
  }
}

TEST_CASE("returned points satisfy the stationary-point invariants") {
  for (double U : {1e-4, 0.5, 2.0, 4.0}) {
    CAPTURE(U);
    const auto p = ModelParams::reference(U);
    const auto pts = find_nhmf_stationary(p);
    REQUIRE(pts.size() == 8);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& s = pts[i];
      CHECK(s.grad_residual <= kGradResidualBound);
      CHECK(s.self_consistency <= kSelfConsistencyBound);
      // independent re-evaluation
      CHECK(stationarity_residual(p, s.orb) <= kGradResidualBound);
      // gauge direction, on the scaled gradient (the raw one cancels badly
      // near exceptional points)
      const auto g = nhmf_scaled_gradient(p, s.orb);
      CHECK(std::abs(g[0] * s.orb.a + g[1] * s.orb.b) <= 1e-10);
      CHECK(std::abs(g[2] * s.orb.c + g[3] * s.orb.d) <= 1e-10);
      REQUIRE(s.partner);
      const auto& q = pts[*s.partner];
      CHECK(orbital_distance(q.orb, s.orb.conj()) <= kPairingTol);
      if (s.cls == PointClass::Complex) {
        const auto j = bond_current(s.orb, p.t);
        CHECK(std::max(std::abs(j[0]), std::abs(j[1])) >= 1e-6);
        CHECK(std::abs(s.nh_energy.real() - q.nh_energy.real()) <= 1e-8 * std::max(1.0, std::abs(s.nh_energy)));
        CHECK(std::abs(s.nh_energy.imag() + q.nh_energy.imag()) <= 1e-8 * std::max(1.0, std::abs(s.nh_energy)));
      } else {
        CHECK(*s.partner == i);
      }
      if (i > 0) CHECK(s.nh_energy.real() >= pts[i - 1].nh_energy.real() - 1e-9);
    }
  }
}

TEST_CASE("real-class counts") {
  auto count_real = [](double U) {
    const auto pts = find_nhmf_stationary(ModelParams::reference(U));
    return std::count_if(pts.begin(), pts.end(),
                         [](const auto& s) { return s.cls == PointClass::RealRepresentable; });
  };
  CHECK(count_real(0.5) == 4);
  CHECK(count_real(4.0) == 8);
}

TEST_CASE("deterministic output") {
  const auto p = ModelParams::reference(0.7);
  const auto x = find_nhmf_stationary(p), y = find_nhmf_stationary(p);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].nh_energy == y[i].nh_energy);
    CHECK(x[i].orb.a == y[i].orb.a);
    CHECK(x[i].orb.d == y[i].orb.d);
  }
}

TEST_CASE("case study point at U = 0.5") {
  const auto p = ModelParams::reference(0.5);
  const auto s = refine_newton(p, kCaseStudyOrb);
  CHECK(std::abs(s.nh_energy - cplx(-3.993, -0.970)) < 0.05);
  CHECK(std::abs(s.h_energy_at_point + 0.233) < 0.05);
  CHECK(std::abs(s.occ_energies[0] - cplx(0.001, 0.003)) < 5e-3);
  CHECK(std::abs(s.occ_energies[1] - cplx(0.014, 0.058)) < 5e-3);

  // a converged point is a fixed point
  const auto again = refine_newton(p, s.orb);
  CHECK(orbital_distance(again.orb, s.orb) <= 1e-12);
  CHECK(std::abs(again.nh_energy - s.nh_energy) <= 1e-12 * std::abs(s.nh_energy));

  // gauge-singular seed
  CHECK_THROWS_AS(refine_newton(p, {I, 1.0, I, 1.0}), ConvergenceError);
}

TEST_CASE("small-U limit of the first excited branch") {
  const auto p = ModelParams::reference(1e-4);
  const auto pts = find_nhmf_stationary(p);
  const double exact = exact_spectrum(p).eigenvalues()[1].real();
  const auto* s = first_excited(pts, exact);
  REQUIRE(s);
  Mat2 ep;
  ep << I, -1.0, -1.0, -I;
  CHECK((s->fock.up - ep).cwiseAbs().maxCoeff() < 1e-3);
  const auto& q = pts[*s->partner];
  CHECK((q.fock.up - ep.conjugate()).cwiseAbs().maxCoeff() < 1e-3);
  CHECK(std::abs(s->occ_energies[0]) < 1e-3);
  CHECK(std::abs(s->occ_energies[1]) < 1e-3);
}

TEST_CASE("HMF stationary points") {
  SUBCASE("counts") {
    CHECK(find_hmf_stationary(ModelParams::reference(0.5)).size() == 4);
    CHECK(find_hmf_stationary(ModelParams::reference(4.0)).size() == 8);
  }
  SUBCASE("U = 0 energies are the one-particle sums") {
    const auto p = ModelParams::reference(0.0);
    const auto pts = find_hmf_stationary(p);
    REQUIRE(pts.size() == 4);
    const auto ref = oracle::kronecker_sum_spectrum(p);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(pts[k].nh_energy - ref[k]) < 1e-10);
  }
  SUBCASE("HMF points are NHMF points") {
    for (double U : {0.5, 4.0}) {
      const auto p = ModelParams::reference(U);
      for (const auto& s : find_hmf_stationary(p)) {
        CHECK(stationarity_residual(p, s.orb) <= 1e-10);
        for (auto g : nhmf_gradient(p, s.orb)) CHECK(std::abs(g) <= 1e-10);
      }
    }
  }
  SUBCASE("ground-state orbital energies at U = 0.5") {
    const auto p = ModelParams::reference(0.5);
    const auto pts = find_hmf_stationary(p);
    const auto f = h_fock(p, pts.front().orb);
    const auto e = eig_small(f.up);
    CHECK(std::abs(e[0].value - (-0.785)) < 1e-2);
    CHECK(std::abs(e[1].value - 1.285) < 1e-2);
  }
  SUBCASE("complex on-site energies rejected") {
    auto p = ModelParams::reference(0.5);
    p.h_up_a += cplx(0.0, 0.1);
    CHECK_THROWS_AS(find_hmf_stationary(p), InputError);
  }
}

TEST_CASE("HMF bifurcation") {
  const auto p = ModelParams::reference(0.0);
  const double u = locate_hmf_bifurcation(p, 2.0, 3.5);
  CHECK(std::abs(u - 2.8) <= 0.1);
  const double u2 = locate_hmf_bifurcation(p, 2.0, 3.5, 1e-3, 720);
  CHECK(std::abs(u - u2) <= 1e-3);
  CHECK_THROWS_AS(locate_hmf_bifurcation(p, 5.0, 6.0), BracketError);
}

TEST_CASE("conjugate branches over U") {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(0.5 + 0.01 * k);
  SweepOptions opt;
  const auto fam = sweep_branches(ModelParams::reference(0.0), grid, opt);
  REQUIRE(fam.size() == 8);
  for (const auto& b : fam) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      REQUIRE(b.points[i]);
      if (i > 0) CHECK(orbital_distance(b.points[i]->orb, b.points[i - 1]->orb) <= 0.1);
    }
  }
  // partner branches: same Re E, opposite Im E at every grid point
  int pairs = 0;
  for (std::size_t x = 0; x < fam.size(); ++x)
    for (std::size_t y = x + 1; y < fam.size(); ++y) {
      const auto& px = *fam[x].points[0];
      const auto& py = *fam[y].points[0];
      if (px.cls != PointClass::Complex || orbital_distance(px.orb, py.orb.conj()) > kPairingTol) continue;
      ++pairs;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx ex = fam[x].points[i]->nh_energy, ey = fam[y].points[i]->nh_energy;
        CHECK(std::abs(ex.real() - ey.real()) <= 1e-8);
        CHECK(std::abs(ex.imag() + ey.imag()) <= 1e-8);
      }
    }
  CHECK(pairs == 2);
}

TEST_CASE("HMF ground branch follows the exact ground state") {
  // The single-determinant ground state is variational: it lies above the
  // exact ground state and stays within 0.2 of it on [0, 10].
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(0.25 * k);
  SweepOptions opt;
  opt.functional = Functional::Hermitian;
  const auto fam = sweep_branches(ModelParams::reference(0.0), grid, opt);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double lowest = 1e300;
    for (const auto& b : fam)
      if (b.points[i]) lowest = std::min(lowest, b.points[i]->h_energy_at_point);
    const double exact = exact_spectrum(ModelParams::reference(grid[i])).eigenvalues()[0].real();
    CHECK(lowest >= exact - 1e-12);
    worst = std::max(worst, lowest - exact);
  }
  CHECK(worst <= 0.2);
}

TEST_CASE("first excited branch approaches the exact state at large U") {
  std::vector<double> grid;
  for (int k = 0; k <= 80; ++k) grid.push_back(2.0 + 0.1 * k);
  SweepOptions opt;
  opt.search.seed_values = {-1.0, 0.0, 1.0};
  opt.search.singular_offsets.clear();
  const auto fam = sweep_branches(ModelParams::reference(0.0), grid, opt);
  REQUIRE(fam.size() >= 8);

  std::vector<double> exact;
  for (double u : grid) exact.push_back(exact_spectrum(ModelParams::reference(u)).eigenvalues()[1].real());

  // among branches that start complex, the one ending closest to the exact
  // first excited eigenvalue
  const BranchFamily* pick = nullptr;
  double best = 1e300;
  for (const auto& b : fam) {
    if (!b.points.front() || b.points.front()->cls != PointClass::Complex) continue;
    if (b.points.front()->nh_energy.real() > 1.0 || !b.points.back()) continue;
    const double gap = std::abs(b.points.back()->h_energy_at_point - exact.back());
    if (gap < best) best = gap, pick = &b;
  }
  REQUIRE(pick);
  std::vector<double> gaps;
  for (std::size_t i = 20; i < grid.size(); i += 10) {
    REQUIRE(pick->points[i]);
    gaps.push_back(std::abs(pick->points[i]->h_energy_at_point - exact[i]));
  }
  for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i] < gaps[i - 1]);
  CHECK(gaps.back() < 0.08);
}
