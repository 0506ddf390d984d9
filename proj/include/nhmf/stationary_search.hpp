#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nhmf/meanfield.hpp"

namespace nhmf {

/// Gauge chart: which coefficient of each spin is pinned to 1.
enum class Chart { BD, AD, BC, AC };

const char* chart_name(Chart c);

enum class PointClass { RealRepresentable, Complex };

const char* class_name(PointClass c);

struct StationaryPoint {
  OrbitalPair orb;  // gauge-fixed: the larger coefficient of each spin is 1
  cplx nh_energy;
  double h_energy_at_point = 0.0;
  double gamma = 0.0;
  FockPair fock;  // NH flavor
  std::array<cplx, 2> occ_energies;
  double grad_residual = 0.0;
  double self_consistency = 0.0;  // projective distance to nearest Fock eigenvector
  Chart chart = Chart::BD;
  PointClass cls = PointClass::RealRepresentable;
  std::optional<std::size_t> partner;  // index within the owning set
};

struct SearchConfig {
  double newton_tol = 1e-12;
  int max_iter = 100;
  int max_halvings = 20;
  std::vector<double> seed_values{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  double dedupe_tol = 1e-8;
  std::uint64_t rng_seed = 20240521;
  int random_starts = 0;  // extra uniformly drawn seeds per chart
  // Relative offsets of extra seeds clustered around z = +-i, where the
  // c-norm vanishes; complex branches approach these as U -> 0.
  std::vector<double> singular_offsets{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
};

inline constexpr double kGradResidualBound = 1e-10;
inline constexpr double kSelfConsistencyBound = 1e-8;
inline constexpr double kRealClassTol = 1e-8;
inline constexpr double kPairingTol = 1e-6;

/// Per-spin projective distance, max over the two spins.
double orbital_distance(const OrbitalPair& x, const OrbitalPair& y);

/// Rescale each spin so its larger-modulus coefficient is exactly 1.
OrbitalPair gauge_fix(const OrbitalPair& orb, Chart* chart = nullptr);

/// Fill every derived field of a point from its orbitals (no refinement).
StationaryPoint make_point(const ModelParams& p, const OrbitalPair& orb);

/// True when the point satisfies the residual and self-consistency bounds.
bool is_accepted(const StationaryPoint& s);

/// Damped Newton on the chart-reduced scaled gradient. Charts are switched
/// per spin when the pinned coordinate loses dominance. Throws
/// ConvergenceError carrying the last residual.
StationaryPoint refine_newton(const ModelParams& p, const OrbitalPair& seed,
                              const SearchConfig& cfg = {});

/// Multi-start over all four charts, merged, deduplicated, classified and in
/// canonical order.
std::vector<StationaryPoint> find_nhmf_stationary(const ModelParams& p,
                                                  const SearchConfig& cfg = {});

/// Real-orbital stationary points of the Hermitian functional from a
/// grid x grid angle scan plus Newton. Requires real on-site energies.
std::vector<StationaryPoint> find_hmf_stationary(const ModelParams& p, int grid = 360);

/// Populates cls and partner. Throws PairingError for an unpaired complex
/// point.
void classify_points(std::vector<StationaryPoint>& points);

/// Canonical ordering: ascending Re E, then Im E.
void sort_points(std::vector<StationaryPoint>& points);

enum class Functional { Hermitian, NonHermitian };

struct BranchFamily {
  std::string label;
  std::vector<double> u_values;
  std::vector<std::optional<StationaryPoint>> points;
};

struct SweepOptions {
  Functional functional = Functional::NonHermitian;
  SearchConfig search;       // used for the fresh multi-start at every U
  int hmf_grid = 360;
  double max_jump = 0.1;     // projective continuity bound between grid points
};

/// Continuation (previous point as Newton seed) plus a fresh search at every
/// grid value; new points that continue nothing open new branches.
std::vector<BranchFamily> sweep_branches(const ModelParams& p, const std::vector<double>& u_grid,
                                         const SweepOptions& opt = {});

/// Bisection on the number of distinct HMF stationary points to width tol.
/// Throws BracketError when both ends give the same count.
double locate_hmf_bifurcation(const ModelParams& p, double u_lo, double u_hi, double tol = 1e-3,
                              int grid = 360);

}  // namespace nhmf
