#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "circadia/classical_reduction.hpp"
#include "circadia/params.hpp"
#include "circadia/potentials.hpp"
#include "circadia/sweep_table.hpp"
#include "json.hpp"

namespace circadia {

enum class Boundary { Box, Periodic };
enum class FastBasis { Extended, Compact };

std::string to_string(Boundary b);
std::string to_string(FastBasis b);
FastBasis fast_basis_from_string(const std::string& s);

/// Symmetric grid about the origin (or about `center` for FastAtX).
/// Box grids hold `points` interior nodes with Dirichlet walls at +-half_width;
/// periodic grids hold `points` nodes on [-half_width, half_width).
struct Grid1D {
  double half_width = 10.0;
  int points = 1024;
};

/// kinetic * (-d^2/dq^2) + V(q), 4th-order finite differences.
struct Extended1D {
  Grid1D grid;
  Boundary boundary = Boundary::Box;
  double kinetic = 1.0;
  std::function<double(double)> potential;
  nlohmann::json potential_desc;
  std::string units = "E_C";
};

/// kinetic (n - ng)^2 - lambdaJ cos(phi) in the charge basis |n| <= n_max.
/// n_max = 0 selects ceil(3 sqrt(lambdaJ)) + 10.
struct Compact1D {
  double lambdaJ = 0.0;
  double ng = 0.0;
  int n_max = 0;
  double kinetic = 1.0;
};

/// kinetic (n - ng)^2 + V(phi) on an odd periodic phase grid (Fourier DVR).
struct PhaseGrid1D {
  int points = 129;
  double ng = 0.0;
  double kinetic = 1.0;
  std::function<double(double)> potential;
  nlohmann::json potential_desc;
};

/// Two-mode regularized circuit in the loop phase phi and junction phase
/// phi_c, E_C units:
///   kinetic n_c^2 / kappa^4 + kinetic n^2 + xi^2 (phi - phi_c)^2 / 2 + lambdaJ u(phi_c).
/// phi always lives on a box. phi_c lives on a box (Extended) or on the
/// circle [-pi, pi) (Compact, odd point count, ng = 0).
/// A zero point count asks for the automatic grid.
struct Regularized2D {
  double kappa = 0.5;
  double xi = 10.0;
  double lambdaJ = 5.0;
  PotentialModel potential = PotentialModel::cosine();
  FastBasis basis_y = FastBasis::Compact;
  Grid1D phi{0.0, 0};
  Grid1D phi_c{0.0, 0};
  double kinetic = 1.0;
};

/// Fast operator at frozen slow coordinate x, units of hbar omega'_r:
///   p_y^2 / 2 + (y - kappa x)^2 / 2 + kappa^2 (lambdaJ / xi) u(y / (kappa sqrt(xi))).
/// The grid is centred at y = kappa x.
struct FastAtX {
  double kappa = 0.5;
  double xi = 10.0;
  double lambdaJ = 5.0;
  PotentialModel potential = PotentialModel::cosine();
  double x = 0.0;
  Grid1D y{12.0, 1201};
};

using HamiltonianSpec = std::variant<Extended1D, Compact1D, PhaseGrid1D, Regularized2D, FastAtX>;

struct SpectrumResult {
  std::string variant;
  std::string units;
  std::vector<double> eigenvalues;
  std::vector<double> residual_norms;
  double spectral_scale = 0.0;
  std::string method;
  int iterations = 0;
  nlohmann::json spec;
  /// Eigenvectors on `grid` when requested (1D real variants only).
  Eigen::MatrixXd vectors;
  std::vector<double> grid;
};

int dimension(const HamiltonianSpec& spec);
nlohmann::json to_json(const HamiltonianSpec& spec);

/// k lowest eigenvalues; requires k <= dimension / 4. Every pair meets
/// ||Hv - Ev|| < 1e-8 * ||H||_inf or NonConvergence is thrown.
SpectrumResult lowest_eigenvalues(const HamiltonianSpec& spec, int k, bool keep_vectors = false);

nlohmann::json to_json(const SpectrumResult& r);
/// Columns: level, energy, residual. The Hamiltonian description rides along as a comment line.
std::string to_csv(const SpectrumResult& r);

/// Node coordinates of a grid.
std::vector<double> grid_nodes(const Grid1D& g, Boundary b, double center = 0.0);

/// Quantized classical reduction: kinetic_phi n^2 + V(q) on the effective
/// potential. In the ExtendedX basis the kinetic coefficient becomes xi * kinetic_phi.
Extended1D reduced_extended(const PotentialModel& p, const ReducedCircuit& rc, Basis basis,
                            Grid1D grid, double kinetic_phi, Boundary boundary = Boundary::Box);
PhaseGrid1D reduced_compact(const PotentialModel& p, const ReducedCircuit& rc, int points,
                            double kinetic_phi);

/// Fills zero-sized Regularized2D grids.
Regularized2D with_default_grids(Regularized2D spec);

struct SpacingStats {
  int count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};
SpacingStats spacing_stats(const std::vector<double>& levels);
/// Spacings of the levels falling inside [lo, hi].
SpacingStats spacing_stats(const std::vector<double>& levels, double lo, double hi);

/// Adiabatic ladder of the compact circuit with the junction phase frozen
/// in its flat charge ground state, in units of E'_C = E_C / kappa^4.
struct NaiveAdiabatic {
  double kappa = 0.0;
  double xi = 0.0;
  double ng = 0.0;
  /// sqrt(2) kappa^4 xi (k + 1/2)
  std::vector<double> formula;
  /// kappa^4 [kinetic n^2 + xi^2 (phi - <phi_c>)^2 / 2], relative to its minimum.
  std::vector<double> numerical;
  double mean_phi_c = 0.0;
  double max_relative_deviation = 0.0;
};

/// Refuses |ng - 1/2| <= kappa^2 with DegenerateFastGround.
NaiveAdiabatic naive_compact_adiabatic(double kappa, double xi, double ng, int k,
                                       double kinetic = 1.0, Grid1D grid = {0.0, 0});

/// Lowest-k levels of the regularized circuit along a kappa ladder for both
/// junction bases. One row per (kappa, basis); failing points carry their
/// error text and NaN levels.
SweepTable spectrum_vs_kappa(const Regularized2D& base, const std::vector<double>& kappas, int k,
                             int jobs = 1);

/// Transmon spectra with charging energy referred to C + C_J against C alone.
struct TransmonComparison {
  double lambdaJ = 0.0;
  double ng = 0.0;
  std::vector<double> ratios;  // C_J / C
  std::vector<std::vector<double>> levels_with_cj;
  std::vector<double> levels_without_cj;
  /// (gap_C - gap_{C+C_J}) / gap_C per ratio.
  std::vector<double> gap_relative_shift;
  std::vector<std::vector<double>> level_relative_shift;
};

/// Requires lambdaJ >= 10.
TransmonComparison transmon_limit_check(double lambdaJ, double ng, const std::vector<double>& ratios,
                                        double kinetic = 1.0, int levels = 5);

/// Lowest levels of kinetic * p^2 in a box [-half_width, half_width].
std::vector<double> free_particle_levels(double kinetic, Grid1D grid, int k);

}  // namespace circadia
