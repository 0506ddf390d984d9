#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhmf/stationary_search.hpp"

namespace nhmf {

enum class ShiftMode { Auto, Fixed };
enum class RootPick { PhysicalContinuity, Index };

struct SSPConfig {
  double beta = 0.1;
  std::vector<double> e_grid;  // plotted abscissa
  ShiftMode shift_mode = ShiftMode::Auto;
  double shift_value = 0.0;    // used when shift_mode == Fixed
  RootPick root_pick = RootPick::PhysicalContinuity;
  int root_index = 0;          // used when root_pick == Index

  void validate() const;
  static std::vector<double> grid(double e_min, double e_max, double e_step);
};

struct ReflectionSolution {
  double energy = 0.0;  // plotted abscissa
  cplx r;
  double T = 0.0;
  bool branch_flag = false;  // |r| <= 1 + 1e-9 held
};

struct TransmissionCurve {
  std::string state_label;
  double shift = 0.0;
  std::vector<ReflectionSolution> points;
};

/// beta (1 + r) / (1 - r); PoleError at r = 1.
cplx gamma_of_r(double beta, cplx r);
/// Inverse map (g - beta) / (g + beta).
cplx r_of_gamma(double beta, cplx g);

Mat2 ssp_one_particle_matrix(cplx h_a, cplx h_b, double t, double beta, cplx r);

double transmission_from_r(cplx r);

/// Isolated parameters with the up-spin channel dressed: h_up_a + i*g_a,
/// h_up_b - i*beta.
ModelParams dressed_params(const ModelParams& p, double beta, cplx gamma_a);

/// Roots r != 1 of det(H(r) - E) (1 - r)^2 = 0, polished to |det| <= 1e-9.
/// DegenerateError when the cleared polynomial vanishes identically.
std::vector<cplx> exact_reflection_roots(const ModelParams& p, double beta, double E);

/// Exact eigenstate index k (0 = ground) followed along the e grid. The
/// quadratic's two roots are tracked by continuity; the track anchored to
/// state k is the one that is most transmissive at the grid point closest to
/// the eigenvalue. Auto shift: Re of the down-spin occupied orbital energy of
/// the matching isolated NHMF point.
TransmissionCurve exact_transmission_curve(const ModelParams& p, const SSPConfig& cfg, int state);

/// NHMF point matched to exact eigenstate k: 0 -> lowest real-representable
/// point, 1 -> first excited complex branch (Im E < 0), otherwise the real
/// point with Hermitian energy closest to the eigenvalue.
StationaryPoint matching_nhmf_point(const ModelParams& p, int state,
                                    const std::vector<StationaryPoint>& isolated);

struct MfState {
  OrbitalPair orb;
  cplx gamma_a;
};

/// gamma_a that puts E on the up-spin Fock spectrum for a frozen orbital.
cplx mf_seed_gamma(const ModelParams& p, double beta, double E, const OrbitalPair& orb);

/// Newton on (up free coordinate, down free coordinate, gamma_a): the two
/// chart-reduced stationarity conditions with the dressed up-spin channel
/// plus det(F_up - E) = 0. ConvergenceError on failure.
std::pair<StationaryPoint, ReflectionSolution> mf_reflection(const ModelParams& p, double beta,
                                                             double E, const MfState& seed);

/// Curves for the standard pair (ground + real point sharing its up orbital
/// character) and the complex pair (first excited + conjugate partner).
std::vector<TransmissionCurve> mf_transmission_curves(const ModelParams& p, const SSPConfig& cfg,
                                                      const SearchConfig& search = {});

/// E-grid continuation of mf_reflection from one isolated point.
TransmissionCurve mf_transmission_curve(const ModelParams& p, const SSPConfig& cfg,
                                        const StationaryPoint& isolated, std::string label);

/// Interior local maxima of T above a floor, as plotted abscissae.
std::vector<double> curve_peaks(const TransmissionCurve& c, double floor = 0.05);

}  // namespace nhmf
