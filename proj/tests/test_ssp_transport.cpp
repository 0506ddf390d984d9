#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nhmf/errors.hpp"
#include "nhmf/ssp_transport.hpp"
#include "oracles.hpp"

using namespace nhmf;

namespace {

SSPConfig default_config() {
  SSPConfig c;
  c.e_grid = SSPConfig::grid(-2.0, 2.0, 0.005);
  return c;
}

void check_curve_invariants(const TransmissionCurve& c) {
  CAPTURE(c.state_label);
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& s = c.points[i];
    if (!s.branch_flag) continue;
    CHECK(s.T >= -1e-12);
    CHECK(s.T <= 1.0 + 1e-12);
    CHECK(s.T == doctest::Approx(1.0 - std::norm(s.r)).epsilon(1e-12));
    if (i > 0 && c.points[i - 1].branch_flag) CHECK(std::abs(s.T - c.points[i - 1].T) <= 0.2);
  }
}

bool any_peak_within(const TransmissionCurve& c, double centre, double tol) {
  const auto peaks = curve_peaks(c);
  return std::any_of(peaks.begin(), peaks.end(), [&](double e) { return std::abs(e - centre) <= tol; });
}

}  // namespace

TEST_CASE("reflection parametrisation") {
  CHECK(std::abs(gamma_of_r(1.0, 0.0) - 1.0) < 1e-15);
  CHECK(std::abs(gamma_of_r(0.1, 0.0) - 0.1) < 1e-15);
  CHECK(std::abs(gamma_of_r(1.0, I) - I) < 1e-15);
  CHECK_THROWS_AS(gamma_of_r(0.3, 1.0), PoleError);
  for (cplx r : {cplx(0.3, -0.2), cplx(-0.9, 0.1), cplx(0.0, 0.99)})
    CHECK(std::abs(r_of_gamma(0.7, gamma_of_r(0.7, r)) - r) < 1e-14);

  CHECK(transmission_from_r(0.0) == 1.0);
  CHECK(transmission_from_r(std::polar(1.0, 0.4)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(transmission_from_r(0.6) == doctest::Approx(0.64));
}

TEST_CASE("one-particle scattering matrix") {
  const Mat2 m = ssp_one_particle_matrix(0.0, 0.0, 1.0, 1.0, 0.0);
  CHECK(std::abs(m(0, 0) - I) < 1e-15);
  CHECK(std::abs(m(1, 1) + I) < 1e-15);
  CHECK(std::abs(m(0, 1) + 1.0) < 1e-15);
  CHECK(std::abs(m(1, 0) + 1.0) < 1e-15);
  CHECK(std::abs(m.determinant()) < 1e-15);  // E = 0 transmits perfectly

  const Mat2 bare = ssp_one_particle_matrix(0.3, -0.2, 0.8, 1e-12, 0.5);
  CHECK(std::abs(bare(0, 0) - 0.3) < 1e-11);
  CHECK(std::abs(bare(1, 1) + 0.2) < 1e-11);
  CHECK_THROWS_AS(ssp_one_particle_matrix(0.0, 0.0, 1.0, 1.0, 1.0), PoleError);
}

TEST_CASE("uncorrelated reflections factorise per down-spin level") {
  const auto p = ModelParams::reference(0.0);
  for (double E = -2.5; E <= 2.5; E += 0.137) {
    CAPTURE(E);
    const auto roots = exact_reflection_roots(p, 0.1, E);
    REQUIRE(roots.size() == 2);
    for (double eps_dn : {-1.0, 1.0}) {
      const cplx want = oracle::one_particle_reflection(p.h_up_a, p.h_up_b, p.t, 0.1, E - eps_dn);
      double best = 1e300;
      for (cplx r : roots) best = std::min(best, std::abs(r - want));
      CHECK(best <= 1e-9);
    }
  }
}

TEST_CASE("reflection roots satisfy the determinant condition") {
  for (double U : {0.0, 0.2, 1.0, 4.0}) {
    const auto p = ModelParams::reference(U);
    for (double E = -3.0; E <= 3.0; E += 0.31) {
      CAPTURE(U);
      CAPTURE(E);
      for (cplx r : exact_reflection_roots(p, 0.1, E)) {
        const Mat4 h = build_exact_hamiltonian(dressed_params(p, 0.1, gamma_of_r(0.1, r)));
        CHECK(std::abs((h - E * Mat4::Identity()).determinant()) <= 1e-9);
      }
    }
  }
}

TEST_CASE("a broken bond reflects everything") {
  auto p = ModelParams::reference(0.2);
  p.t = 1e-9;
  for (double E : {-0.7, 0.1, 0.9}) {
    const auto roots = exact_reflection_roots(p, 0.1, E);
    REQUIRE(!roots.empty());
    double best = 1e300;
    for (cplx r : roots) best = std::min(best, std::abs(std::abs(r) - 1.0));
    CHECK(best <= 1e-6);
  }
}

TEST_CASE("configuration validation") {
  SSPConfig c = default_config();
  c.beta = 0.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = default_config();
  std::swap(c.e_grid[3], c.e_grid[4]);
  CHECK_THROWS_AS(c.validate(), InputError);
  CHECK_THROWS_AS(SSPConfig::grid(1.0, 0.0, 0.1), InputError);
  CHECK(SSPConfig::grid(-2.0, 2.0, 0.005).size() == 801);
}

TEST_CASE("exact curves at weak coupling") {
  const auto p = ModelParams::reference(0.2);
  const SSPConfig cfg = default_config();

  const auto ground = exact_transmission_curve(p, cfg, 0);
  check_curve_invariants(ground);
  CHECK(curve_peaks(ground).size() == 2);

  const auto excited = exact_transmission_curve(p, cfg, 1);
  check_curve_invariants(excited);
  const auto peaks = curve_peaks(excited);
  REQUIRE(peaks.size() == 1);
  CHECK(std::abs(peaks[0]) <= 0.2);

  SSPConfig fixed = cfg;
  fixed.shift_mode = ShiftMode::Fixed;
  fixed.shift_value = ground.shift;
  const auto again = exact_transmission_curve(p, fixed, 0);
  for (std::size_t i = 0; i < again.points.size(); ++i)
    CHECK(std::abs(again.points[i].r - ground.points[i].r) < 1e-13);
}

TEST_CASE("mean-field curves at weak coupling") {
  const auto p = ModelParams::reference(0.2);
  const SSPConfig cfg = default_config();
  const auto curves = mf_transmission_curves(p, cfg);
  REQUIRE(curves.size() == 4);
  for (const auto& c : curves) {
    check_curve_invariants(c);
    CHECK(c.points.size() == cfg.e_grid.size());
  }
  for (int k : {0, 1}) {
    CAPTURE(curves[k].state_label);
    CHECK(any_peak_within(curves[k], -1.0, 0.15));
    CHECK(any_peak_within(curves[k], 1.0, 0.15));
    CHECK_FALSE(any_peak_within(curves[k], 0.0, 0.5));
  }
  for (int k : {2, 3}) {
    CAPTURE(curves[k].state_label);
    CHECK(any_peak_within(curves[k], 0.0, 0.15));
  }
}

TEST_CASE("real-only branches never open the zero-energy channel") {
  const auto p = ModelParams::reference(0.2);
  const SSPConfig cfg = default_config();
  int real_count = 0;
  for (const auto& s : find_nhmf_stationary(p)) {
    if (s.cls != PointClass::RealRepresentable) continue;
    ++real_count;
    const auto c = mf_transmission_curve(p, cfg, s, "real");
    CAPTURE(s.nh_energy);
    CHECK_FALSE(any_peak_within(c, 0.0, 0.5));
  }
  CHECK(real_count == 4);
}

TEST_CASE("vanishing lead coupling recovers the isolated point") {
  const auto p = ModelParams::reference(0.2);
  const auto pts = find_nhmf_stationary(p);
  for (const auto& s : pts) {
    const double E = s.occ_energies[0].real();
    if (s.cls != PointClass::RealRepresentable) continue;
    const double beta = 1e-9;
    const MfState seed{s.orb, mf_seed_gamma(p, beta, E, s.orb)};
    const auto [pt, sol] = mf_reflection(p, beta, E, seed);
    CHECK(orbital_distance(pt.orb, s.orb) <= 1e-6);
    CHECK(std::isfinite(sol.T));
  }
}

TEST_CASE("mean-field reflection solves the coupled system") {
  const auto p = ModelParams::reference(0.2);
  const auto pts = find_nhmf_stationary(p);
  const auto ground = matching_nhmf_point(p, 0, pts);
  for (double E : {-1.2, -0.4, 0.3, 1.1}) {
    CAPTURE(E);
    const auto [pt, sol] = mf_reflection(p, 0.1, E, {ground.orb, mf_seed_gamma(p, 0.1, E, ground.orb)});
    const ModelParams pd = dressed_params(p, 0.1, gamma_of_r(0.1, sol.r));
    CHECK(stationarity_residual(pd, pt.orb) <= 1e-10);
    const Mat2 f = pt.fock.up;
    CHECK(std::abs((f - E * Mat2::Identity()).determinant()) <= 1e-9);
  }
  CHECK_THROWS_AS(mf_reflection(p, 0.0, 0.0, {ground.orb, 0.1}), InputError);
}

TEST_CASE("state matching") {
  const auto p = ModelParams::reference(0.2);
  const auto pts = find_nhmf_stationary(p);
  CHECK(matching_nhmf_point(p, 0, pts).cls == PointClass::RealRepresentable);
  const auto ex = matching_nhmf_point(p, 1, pts);
  CHECK(ex.cls == PointClass::Complex);
  CHECK(ex.nh_energy.imag() < 0.0);
  CHECK_THROWS_AS(matching_nhmf_point(p, 4, pts), InputError);
  CHECK_THROWS_AS(matching_nhmf_point(p, 1, {}), CensusError);
}
