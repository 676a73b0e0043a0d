#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>

#include "circadia/errors.hpp"
#include "circadia/params.hpp"
#include "doctest.h"

using namespace circadia;

namespace {

// Independent evaluation of the screening parameter: 2 pi / Phi_Q = 2e / hbar.
double beta_direct(double L, double EJ) {
  const double h = 6.62607015e-34, e = 1.602176634e-19;
  const double q = 4.0 * std::numbers::pi * e / h;
  return L * EJ * q * q;
}

SICircuit sample_circuit() {
  SICircuit si;
  si.capacitance_C = 1e-12;
  si.capacitance_Cp = 5e-14;
  si.inductance_L = 2e-9;
  si.josephson_energy_EJ = 1e-23;
  return si;
}

}  // namespace

TEST_CASE("equal capacitances give kappa = 1") {
  SICircuit si = sample_circuit();
  si.capacitance_Cp = si.capacitance_C;
  CHECK(reduce(si).circuit.kappa == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("vanishing parasitic capacitance is the flagged reduced circuit") {
  SICircuit si = sample_circuit();
  si.capacitance_Cp = 0.0;
  const Reduction r = reduce(si);
  CHECK(r.circuit.kappa == 0.0);
  CHECK(r.circuit.reduced);
  CHECK_FALSE(r.scales.omega_r_prime.has_value());
  CHECK(to_json(r.scales)["omega_r_prime"].is_null());
}

TEST_CASE("critical screening") {
  SICircuit si = sample_circuit();
  const double q = 2.0 * std::numbers::pi / constants().flux_quantum;
  si.josephson_energy_EJ = 1.0 / (si.inductance_L * q * q);
  CHECK(std::abs(beta_of(si) - 1.0) < 1e-12);
}

TEST_CASE("beta agrees between the direct formula and lambdaJ / xi^2") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logu(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    SICircuit si;
    si.capacitance_C = 1e-12 * std::pow(10.0, logu(rng));
    si.capacitance_Cp = si.capacitance_C * std::pow(10.0, logu(rng) - 1.0);
    si.inductance_L = 1e-9 * std::pow(10.0, logu(rng));
    si.josephson_energy_EJ = 1e-23 * std::pow(10.0, logu(rng));
    const ReducedCircuit rc = reduce(si).circuit;
    const double via_ratio = rc.lambdaJ / (rc.xi * rc.xi);
    CHECK(std::abs(via_ratio - rc.beta) <= 1e-12 * rc.beta);
    CHECK(std::abs(beta_direct(si.inductance_L, si.josephson_energy_EJ) - rc.beta) <= 1e-9 * rc.beta);
  }
}

TEST_CASE("beta_of basics") {
  SICircuit si = sample_circuit();
  si.josephson_energy_EJ = 0.0;
  CHECK(beta_of(si) == 0.0);
  si = sample_circuit();
  const double b = beta_of(si);
  si.inductance_L *= 2.0;
  CHECK(beta_of(si) == doctest::Approx(2.0 * b).epsilon(1e-14));
}

TEST_CASE("transmon-like regime with a small inductance is deeply subcritical") {
  const nlohmann::json j{{"C_F", 80e-15}, {"Cp_F", 1e-15}, {"L_H", 0.05e-9}, {"EJ_GHz", 15.0}};
  const Reduction r = reduce(circuit_from_json(j));
  CHECK(r.circuit.beta < 0.05);
  CHECK(r.circuit.lambdaJ / (r.circuit.xi * r.circuit.xi) == doctest::Approx(r.circuit.beta).epsilon(1e-12));
  const double ej = 15e9 * 6.62607015e-34;
  CHECK(beta_direct(0.05e-9, ej) == doctest::Approx(r.circuit.beta).epsilon(1e-9));
}

TEST_CASE("scale consistency and charging-energy identity") {
  SICircuit si = sample_circuit();
  const Reduction a = reduce(si);
  si.capacitance_C *= 3.7;
  si.capacitance_Cp *= 3.7;
  CHECK(reduce(si).circuit.kappa == doctest::Approx(a.circuit.kappa).epsilon(1e-14));
  const double k4 = std::pow(a.circuit.kappa, 4);
  CHECK(std::abs(a.scales.E_C - k4 * *a.scales.E_Cp) <= 1e-12 * a.scales.E_C);
}

TEST_CASE("invalid inputs name their field") {
  auto field_of = [](SICircuit si) {
    try {
      reduce(si);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return std::string("none");
  };
  SICircuit si = sample_circuit();
  si.capacitance_C = -1.0;
  CHECK(field_of(si) == "C_F");
  si = sample_circuit();
  si.inductance_L = std::nan("");
  CHECK(field_of(si) == "L_H");
  si = sample_circuit();
  si.josephson_energy_EJ = -1e-24;
  CHECK(field_of(si) == "EJ_J");
  CHECK_THROWS_AS(circuit_from_json({{"C_F", 1e-12}, {"L_H", 1e-9}}), ValidationError);
  CHECK_THROWS_AS(ReducedCircuit::from_ratios(0.5, -1.0, 1.0), ValidationError);
}

TEST_CASE("from_ratios derives beta") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.5, 10.0, 5.0);
  CHECK(rc.beta == doctest::Approx(0.05));
  CHECK_FALSE(rc.reduced);
}

TEST_CASE("constants table loads from a JSON path") {
  const std::string path = "constants_override.json";
  std::ofstream(path) << R"({"hbar": 2.0, "flux_quantum": 3.0})";
  const PhysicalConstants k = load_constants(path);
  CHECK(k.hbar == 2.0);
  CHECK(k.flux_quantum == 3.0);
  CHECK(k.e == default_constants().e);
  std::ofstream(path) << R"({"hbar": -1})";
  CHECK_THROWS_AS(load_constants(path), ValidationError);
  std::remove(path.c_str());
}
