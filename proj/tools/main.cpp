#include <iostream>

#include "CLI11.hpp"
#include "circadia/errors.hpp"
#include "commands.hpp"

using namespace circadia;
using namespace circadia::cli;

namespace {

void add_common(CLI::App* sub, CommonOptions& o, bool needs_circuit = true) {
  auto* c = sub->add_option("--circuit", o.circuit, "circuit JSON (SI or reduced form)");
  if (needs_circuit) c->required();
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circadia: reduced and regularized models of a circuit with a small junction capacitance"};
  app.set_version_flag("--version", "circadia 1.0.0");
  app.require_subcommand(1);

  CommonOptions o;
  BoOptions bo;
  DynamicsOptions dyn;
  FosterOptions fos;

  auto* reduce = app.add_subcommand("reduce", "branches and effective potential of the reduced circuit");
  add_common(reduce, o);
  reduce->add_option("--grid", o.grid, "drive points (default 257)");

  auto* sweep = app.add_subcommand("bo-sweep", "Born-Oppenheimer potential along a kappa ladder");
  add_common(sweep, o);
  sweep->add_option("--kappa-ladder", o.kappa_ladder, "strictly decreasing, comma separated (default 0.6,0.45,0.3)");
  sweep->add_option("--grid", o.grid, "fast-grid points (default 1201)");
  sweep->add_option("--x-range", bo.x_range, "lo,hi,n of the slow coordinate")->capture_default_str();
  sweep->add_option("--y-half-width", bo.y_half_width, "fast-grid half width")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "spectra of the reduced, adiabatic and two-mode models");
  add_common(compare, o);
  compare->add_option("--basis", o.basis, "extended, compact or both (default both)");
  compare->add_option("--grid", o.grid, "points of the first extended box (default 2048)");
  compare->add_flag("--charge-half-factor", o.charge_half_factor, "use (1/2) n^2 in the compact kinetic term");

  auto* dynamics = app.add_subcommand("dynamics", "classical trajectory of the regularized circuit");
  add_common(dynamics, o);
  dynamics->add_option("--t-end", dyn.t_end, "final time in 1/omega'_r (default one slow period)");
  dynamics->add_option("--dt", dyn.dt, "time step")->capture_default_str();
  dynamics->add_option("--x0", dyn.x0, "initial slow coordinate")->capture_default_str();
  dynamics->add_option("--px0", dyn.px0, "initial slow momentum")->capture_default_str();
  dynamics->add_option("--scheme", dyn.scheme, "yoshida6 or stormer-verlet")->capture_default_str();
  dynamics->add_option("--energy-tolerance", dyn.energy_tolerance, "largest relative energy drift")
      ->capture_default_str();
  dynamics->add_flag("--step-halving", dyn.step_halving, "also run dt/2 and dt/4 and report the error ratio");

  auto* foster = app.add_subcommand("foster", "fit or evaluate a lossless Foster admittance");
  add_common(foster, o, false);
  foster->add_option("--samples", fos.samples, "CSV of omega, ImY[, ReY]");
  foster->add_option("--resonances", fos.resonances, "number of finite poles")->check(CLI::NonNegativeNumber);
  foster->add_option("--l-zero", fos.l_zero, "auto, yes or no")->capture_default_str();
  foster->add_option("--model", fos.model, "Foster model JSON to evaluate");
  foster->add_option("--omega", fos.omega, "lo,hi,n evaluation grid")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*reduce) return cmd_reduce(o);
    if (*sweep) return cmd_bo_sweep(o, bo);
    if (*compare) return cmd_compare(o);
    if (*dynamics) return cmd_dynamics(o, dyn);
    if (*foster) return cmd_foster(o, fos);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const RegimeError& e) {
    std::cerr << "regime: " << e.what() << "\n";
    return kRegime;
  } catch (const StepTooLarge& e) {
    std::cerr << "numerical: " << e.what() << " (try --dt " << e.suggested_dt() << ")\n";
    return kNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical: " << e.what() << "\n";
    return kNumerical;
  } catch (const StructuralMismatch& e) {
    std::cerr << "numerical: " << e.what() << "\n";
    return kNumerical;
  } catch (const ExtrapolationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
