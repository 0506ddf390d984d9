#include <cmath>

#include "doctest.h"
#include "nhmf/errors.hpp"
#include "nhmf/hubbard_exact.hpp"
#include "oracles.hpp"

using namespace nhmf;

TEST_CASE("hamiltonian layout") {
  const Mat4 h = build_exact_hamiltonian(ModelParams::reference(0.0));
  CHECK(h(0, 0) == cplx(0.25));
  CHECK(h(1, 1) == cplx(-0.25));
  CHECK(h(2, 2) == cplx(0.25));
  CHECK(h(3, 3) == cplx(-0.25));
  CHECK(h(0, 1) == cplx(0.0));
  CHECK(h(2, 3) == cplx(0.0));
  CHECK(h(0, 2) == cplx(-1.0));
  CHECK(h(0, 3) == cplx(1.0));
  CHECK(h(1, 2) == cplx(-1.0));
  CHECK(h(1, 3) == cplx(1.0));
  CHECK(is_complex_symmetric<4>(h));

  const Mat4 s = build_exact_hamiltonian(ModelParams::symmetric(3.0));
  CHECK(s.diagonal() == Vec4(3.0, 3.0, 0.0, 0.0));
}

TEST_CASE("parameter validation") {
  ModelParams p;
  p.t = 0.0;
  CHECK_THROWS_AS(build_exact_hamiltonian(p), InputError);
  p = ModelParams::reference(-1.0);
  CHECK_THROWS_AS(build_exact_hamiltonian(p), InputError);
  p = ModelParams::reference(1.0);
  CHECK(p.is_isolated());
  p.h_up_a += cplx(0.0, 0.1);
  CHECK(!p.is_isolated());
}

TEST_CASE("U = 0 spectrum equals one-particle sums") {
  const auto p = ModelParams::reference(0.0);
  const auto spec = exact_spectrum(p).eigenvalues();
  const auto ref = oracle::kronecker_sum_spectrum(p);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(spec[k] - ref[k]) < 1e-9);
  const double e = std::sqrt(17.0) / 4.0;
  CHECK(spec[0].real() == doctest::Approx(-e - 1.0).epsilon(1e-12));
  CHECK(spec[1].real() == doctest::Approx(1.0 - e).epsilon(1e-12));
  CHECK(std::abs(spec[1].real() + 0.030776) < 1e-6);
  CHECK(std::abs(spec[2].real() - 0.030776) < 1e-6);
  CHECK(std::abs(spec[3].real() - 2.030776) < 1e-6);
}

TEST_CASE("symmetric dimer closed form") {
  for (double U : {0.0, 1.0, 4.0, 7.5}) {
    const auto spec = exact_spectrum(ModelParams::symmetric(U)).eigenvalues();
    const auto ref = oracle::symmetric_dimer_spectrum(U, 1.0);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(spec[k] - ref[k]) < 1e-9);
  }
}

TEST_CASE("first excited eigenvalue at U = 0.5") {
  const auto spec = exact_spectrum(ModelParams::reference(0.5)).eigenvalues();
  CHECK(std::abs(spec[1].real() - 0.006) < 1e-3);
}

TEST_CASE("strong coupling limit") {
  const auto spec = exact_spectrum(ModelParams::reference(100.0)).eigenvalues();
  const double pert = -0.25 - 1.0 / 100.5 - 1.0 / 100.0;
  CHECK(spec[0].real() >= -0.28);
  CHECK(spec[0].real() <= -0.26);
  CHECK(std::abs(spec[0].real() - pert) < 1e-3);
  CHECK(std::abs(spec[1].real() - 0.25) < 0.03);
}

TEST_CASE("sweep invariants") {
  std::vector<double> grid;
  for (int k = 0; k <= 1000; ++k) grid.push_back(0.01 * k);
  const auto p = ModelParams::reference(0.0);
  const auto sweep = exact_sweep(p, grid);
  REQUIRE(sweep.size() == grid.size());
  for (const auto& s : sweep) {
    cplx sum = 0.0;
    for (const auto& e : s.eigenpairs) {
      sum += e.value;
      CHECK(std::abs(e.value.imag()) <= 1e-9);
      CHECK(e.vector.imag().cwiseAbs().maxCoeff() <= 1e-8);
    }
    const auto d = exact_diagonal(s.params);
    CHECK(std::abs(sum - (d[0] + d[1] + d[2] + d[3])) < 1e-9);
    CHECK(s.params.t == p.t);
    CHECK(s.params.h_up_a == p.h_up_a);
  }
  const auto branches = match_branches(sweep);
  for (std::size_t i = 1; i < branches.size(); ++i)
    for (int k = 0; k < 4; ++k) CHECK(std::abs(branches[i][k] - branches[i - 1][k]) <= 0.1);

  // top two eigenvalues grow like U
  const auto& last = sweep.back().eigenvalues();
  const auto& prev = sweep[sweep.size() - 101].eigenvalues();
  for (int k = 2; k < 4; ++k) CHECK(std::abs((last[k] - prev[k]).real() - 1.0) < 0.05);

  CHECK_THROWS_AS(exact_sweep(p, {}), InputError);
  CHECK_THROWS_AS(exact_sweep(p, {1.0, 0.5}), InputError);
}
