#pragma once

#include <optional>

#include "circadia/constants.hpp"
#include "json.hpp"

namespace circadia {

/// Circuit of a capacitor C in series with an inductor L and a Josephson
/// element E_J shunted by a parasitic capacitance C'. SI units.
struct SICircuit {
  double capacitance_C = 0.0;        // F
  double capacitance_Cp = 0.0;       // F, 0 marks the fully reduced circuit
  double inductance_L = 0.0;         // H
  double josephson_energy_EJ = 0.0;  // J
  double gate_charge_ng = 0.0;       // [0, 1)
};

/// Adimensional parameter set consumed by every solver.
///
///   kappa   = (C'/C)^(1/4)
///   xi      = hbar omega_C / E_C
///   lambdaJ = E_J / E_C
///   beta    = lambdaJ / xi^2  (the screening parameter)
struct ReducedCircuit {
  double kappa = 0.0;
  double xi = 1.0;
  double lambdaJ = 0.0;
  double beta = 0.0;
  double ng = 0.0;
  bool reduced = false;  // C' = 0

  /// Builds a circuit directly from ratios; beta is derived.
  static ReducedCircuit from_ratios(double kappa, double xi, double lambdaJ, double ng = 0.0);
};

/// Dimensionful scales. Entries tied to C' are empty when C' = 0.
struct DerivedScales {
  double omega_C = 0.0;                     // rad/s, 1/sqrt(LC)
  std::optional<double> omega_r_prime;      // rad/s, 1/sqrt(LC')
  double Phi_C = 0.0;                       // Wb, (hbar^2 L/C)^(1/4)
  std::optional<double> Phi_ZPF;            // Wb, (hbar^2 L/C')^(1/4)
  double E_C = 0.0;                         // J, 4e^2/C
  std::optional<double> E_Cp;               // J, 4e^2/C'
  double epsilon_C = 0.0;                   // 1/sqrt(J), 1/sqrt(hbar omega_C)
};

struct Reduction {
  ReducedCircuit circuit;
  DerivedScales scales;
};

/// Throws ValidationError naming the first offending field.
void validate(const SICircuit& si);

Reduction reduce(const SICircuit& si, const PhysicalConstants& k = constants());

/// beta = L E_J (2 pi / Phi_Q)^2.
double beta_of(const SICircuit& si, const PhysicalConstants& k = constants());

/// Parses `C_F`, `Cp_F`, `L_H`, `EJ_J` or `EJ_GHz` (converted with h), `ng`.
SICircuit circuit_from_json(const nlohmann::json& j, const PhysicalConstants& k = constants());

nlohmann::json to_json(const ReducedCircuit& rc);
nlohmann::json to_json(const DerivedScales& s);

}  // namespace circadia
