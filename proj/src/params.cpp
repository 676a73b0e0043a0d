#include "circadia/params.hpp"

#include <cmath>
#include <numbers>

#include "circadia/errors.hpp"

namespace circadia {

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
}

}  // namespace

ReducedCircuit ReducedCircuit::from_ratios(double kappa, double xi, double lambdaJ, double ng) {
  require_finite(kappa, "kappa");
  require_finite(xi, "xi");
  require_finite(lambdaJ, "lambdaJ");
  require_finite(ng, "ng");
  if (kappa < 0.0) throw ValidationError("kappa", "must be >= 0");
  if (xi <= 0.0) throw ValidationError("xi", "must be > 0");
  if (lambdaJ < 0.0) throw ValidationError("lambdaJ", "must be >= 0");
  ReducedCircuit rc;
  rc.kappa = kappa;
  rc.xi = xi;
  rc.lambdaJ = lambdaJ;
  rc.beta = lambdaJ / (xi * xi);
  rc.ng = ng;
  rc.reduced = kappa == 0.0;
  return rc;
}

void validate(const SICircuit& si) {
  require_finite(si.capacitance_C, "C_F");
  require_finite(si.capacitance_Cp, "Cp_F");
  require_finite(si.inductance_L, "L_H");
  require_finite(si.josephson_energy_EJ, "EJ_J");
  require_finite(si.gate_charge_ng, "ng");
  if (si.capacitance_C <= 0.0) throw ValidationError("C_F", "must be > 0");
  if (si.capacitance_Cp < 0.0) throw ValidationError("Cp_F", "must be >= 0");
  if (si.inductance_L <= 0.0) throw ValidationError("L_H", "must be > 0");
  if (si.josephson_energy_EJ < 0.0) throw ValidationError("EJ_J", "must be >= 0");
  if (si.gate_charge_ng < 0.0 || si.gate_charge_ng >= 1.0)
    throw ValidationError("ng", "must lie in [0, 1)");
}

double beta_of(const SICircuit& si, const PhysicalConstants& k) {
  validate(si);
  const double q = 2.0 * std::numbers::pi / k.flux_quantum;
  return si.inductance_L * si.josephson_energy_EJ * q * q;
}

Reduction reduce(const SICircuit& si, const PhysicalConstants& k) {
  validate(si);
  const double C = si.capacitance_C;
  const double Cp = si.capacitance_Cp;
  const double L = si.inductance_L;

  DerivedScales s;
  s.omega_C = 1.0 / std::sqrt(L * C);
  s.Phi_C = std::pow(k.hbar * k.hbar * L / C, 0.25);
  s.E_C = 4.0 * k.e * k.e / C;
  s.epsilon_C = 1.0 / std::sqrt(k.hbar * s.omega_C);
  if (Cp > 0.0) {
    s.omega_r_prime = 1.0 / std::sqrt(L * Cp);
    s.Phi_ZPF = std::pow(k.hbar * k.hbar * L / Cp, 0.25);
    s.E_Cp = 4.0 * k.e * k.e / Cp;
  }

  ReducedCircuit rc;
  rc.kappa = std::pow(Cp / C, 0.25);
  rc.xi = k.hbar * s.omega_C / s.E_C;
  rc.lambdaJ = si.josephson_energy_EJ / s.E_C;
  rc.beta = beta_of(si, k);
  rc.ng = si.gate_charge_ng;
  rc.reduced = Cp == 0.0;
  return {rc, s};
}

SICircuit circuit_from_json(const nlohmann::json& j, const PhysicalConstants& k) {
  if (!j.is_object()) throw ValidationError("circuit", "expected a JSON object");
  auto number = [&](const char* key) -> double {
    if (!j.contains(key)) throw ValidationError(key, "missing");
    if (!j.at(key).is_number()) throw ValidationError(key, "must be a number");
    return j.at(key).get<double>();
  };
  SICircuit si;
  si.capacitance_C = number("C_F");
  si.capacitance_Cp = j.contains("Cp_F") ? number("Cp_F") : 0.0;
  si.inductance_L = number("L_H");
  const bool has_joule = j.contains("EJ_J");
  const bool has_ghz = j.contains("EJ_GHz");
  if (has_joule == has_ghz) throw ValidationError("EJ_J", "give exactly one of EJ_J or EJ_GHz");
  si.josephson_energy_EJ = has_joule ? number("EJ_J") : number("EJ_GHz") * 1e9 * k.h;
  si.gate_charge_ng = j.contains("ng") ? number("ng") : 0.0;
  validate(si);
  return si;
}

nlohmann::json to_json(const ReducedCircuit& rc) {
  return {{"kappa", rc.kappa}, {"xi", rc.xi},  {"lambdaJ", rc.lambdaJ},
          {"beta", rc.beta},   {"ng", rc.ng},  {"reduced", rc.reduced}};
}

nlohmann::json to_json(const DerivedScales& s) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"omega_C", s.omega_C}, {"omega_r_prime", opt(s.omega_r_prime)},
          {"Phi_C", s.Phi_C},     {"Phi_ZPF", opt(s.Phi_ZPF)},
          {"E_C", s.E_C},         {"E_Cp", opt(s.E_Cp)},
          {"epsilon_C", s.epsilon_C}};
}

}  // namespace circadia
