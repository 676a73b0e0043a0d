#pragma once

#include <optional>
#include <span>
#include <vector>

#include "circadia/params.hpp"
#include "circadia/potentials.hpp"
#include "json.hpp"

namespace circadia {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
};

/// Real roots phi_c of  phi = phi_c + beta u'(phi_c)  inside one window.
struct BranchSolution {
  double drive_phi = 0.0;
  Interval window;
  /// Root closest to the drive first (circular distance for periodic
  /// potentials), the rest ascending.
  std::vector<double> roots;
  bool invertible = true;
  /// min over the window of 1 + beta u''(phi_c).
  double jacobian_min = 1.0;
};

/// Grid bracketing (>= 4096 points) with fold refinement, then bisection.
/// Periodic potentials default to the window [2 pi k, 2 pi (k+1)) holding
/// the drive; windows shorter than 2 pi are rejected for them.
BranchSolution solve_consistency(const PotentialModel& p, double beta, double phi,
                                 std::optional<Interval> window = std::nullopt,
                                 int grid_points = 4096);

/// Unique root on the single-valued branch (requires beta < beta_crit).
double solve_single_branch(const PotentialModel& p, double beta, double phi);

/// sup{beta : 1 + beta u'' > 0 everywhere} = 1 / max(-u''); +inf when u'' >= 0.
double invertibility_threshold(const PotentialModel& p);

enum class Basis { ExtendedX, CompactPhi };

struct PotentialSample {
  double coordinate = 0.0;
  double V = 0.0;
  double dV = 0.0;
  double d2V = 0.0;
  int branch_count = 1;
};

struct PotentialMinimum {
  double location = 0.0;
  double curvature = 0.0;
};

/// Effective potential of the reduced circuit, E_C units. Coordinates are
/// x (flux in units of Phi_C) for ExtendedX and the phase phi for CompactPhi.
struct EffectivePotential {
  Basis basis = Basis::CompactPhi;
  ReducedCircuit circuit;
  std::vector<PotentialSample> samples;
  std::vector<PotentialMinimum> minima;
};

EffectivePotential effective_potential(const PotentialModel& p, const ReducedCircuit& rc,
                                       Basis basis, std::span<const double> grid);

/// Max |V_extended(sqrt(xi) phi) - V_compact(phi)| in E_C units over one window.
double crosscheck_bases(const PotentialModel& p, const ReducedCircuit& rc, int points = 512);

/// All branches for a list of drives (used for plotting beyond beta_crit).
std::vector<BranchSolution> enumerate_branches(const PotentialModel& p, double beta,
                                               std::span<const double> drives);

/// n points on [lo, hi]; the end point is dropped when `closed` is false.
std::vector<double> uniform_grid(double lo, double hi, int n, bool closed = true);

std::string to_string(Basis b);
nlohmann::json to_json(const BranchSolution& b);

}  // namespace circadia
