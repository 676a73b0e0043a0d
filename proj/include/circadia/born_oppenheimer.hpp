#pragma once

#include <string>
#include <vector>

#include "circadia/potentials.hpp"
#include "circadia/spectra.hpp"
#include "circadia/sweep_table.hpp"

namespace circadia {

struct FastGround {
  double e0 = 0.0;          // hbar omega'_r
  Grid1D grid;              // grid actually used
  bool widened = false;
  double boundary_mass = 0.0;
};

/// Ground energy of the fast operator at frozen x. The probability in the
/// outer tenth of the grid on each side must stay below 1e-12; otherwise the
/// grid is widened once by 1.5 at fixed spacing, then GridTooNarrow is thrown.
FastGround bo_fast_ground_detail(double kappa, double xi, double lambdaJ, const PotentialModel& p,
                                 double x, Grid1D y = {12.0, 1201});
double bo_fast_ground(double kappa, double xi, double lambdaJ, const PotentialModel& p, double x,
                      Grid1D y = {12.0, 1201});

enum class BOVerdict { Decreasing, ConvergesNonzero, Vanishing, Inconclusive };
std::string to_string(BOVerdict v);

struct BOTable {
  std::vector<double> kappas;
  std::vector<double> x;
  /// e0(x; kappa) - e0(0; kappa), hbar omega'_r units, [kappa][x].
  std::vector<std::vector<double>> raw;
  /// raw / kappa^2: the same difference in hbar omega_C units.
  std::vector<std::vector<double>> normalized;
  std::vector<double> sup_raw;
  std::vector<double> sup_normalized;
  /// Least-squares a in  normalized ~ a x^2 + b x^3 + c x^4, per kappa.
  std::vector<double> fit_quadratic;
  BOVerdict verdict = BOVerdict::Inconclusive;
  std::string detail;

  /// Long format: kappa, x, raw, normalized.
  SweepTable table() const;
  nlohmann::json summary() const;
};

/// kappas strictly decreasing with at least three entries. The verdict is
///   vanishing          every entry is zero;
///   converges-nonzero  the fitted curvature is nonzero and successive fits
///                      agree within 10%;
///   decreasing         sup_x |raw| strictly decreasing along the ladder;
///   inconclusive       otherwise.
BOTable bo_effective_potential(const std::vector<double>& kappas, const std::vector<double>& x, double xi,
                               double lambdaJ, const PotentialModel& p, Grid1D y = {12.0, 1201},
                               int jobs = 1);

}  // namespace circadia
