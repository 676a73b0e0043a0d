#include <cmath>
#include <numbers>

#include "circadia/errors.hpp"
#include "circadia/spectra.hpp"
#include "doctest.h"

using namespace circadia;

namespace {

constexpr double kPi = std::numbers::pi;

PhaseGrid1D literal_transmon_phase(double lambdaJ, double ng, int points = 161) {
  PhaseGrid1D s;
  s.points = points;
  s.ng = ng;
  s.potential = [lambdaJ](double phi) { return -lambdaJ * std::cos(phi); };
  return s;
}

void check_contract(const SpectrumResult& r) {
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    CHECK(r.residual_norms[i] < 1e-8 * r.spectral_scale);
    if (i > 0) CHECK(r.eigenvalues[i] >= r.eigenvalues[i - 1]);
  }
}

}  // namespace

TEST_CASE("harmonic well in a large box") {
  Extended1D e;
  e.grid = {12.0, 2400};
  e.kinetic = 0.5;
  e.potential = [](double x) { return 0.5 * x * x; };
  const SpectrumResult r = lowest_eigenvalues(e, 5);
  for (int k = 0; k < 5; ++k) CHECK(r.eigenvalues[k] == doctest::Approx(k + 0.5).epsilon(1e-4));
  check_contract(r);
}

TEST_CASE("free charge ladder") {
  Compact1D c;
  c.lambdaJ = 0.0;
  const SpectrumResult r = lowest_eigenvalues(c, 5);
  const double expected[] = {0, 1, 1, 4, 4};
  for (int k = 0; k < 5; ++k) CHECK(r.eigenvalues[k] == doctest::Approx(expected[k]).epsilon(1e-12));
  c.kinetic = 0.5;
  CHECK(lowest_eigenvalues(c, 5).eigenvalues[3] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("charge basis and phase grid agree for the literal operator") {
  for (double lambdaJ : {1.0, 10.0, 50.0})
    for (double ng : {0.0, 0.25}) {
      Compact1D c;
      c.lambdaJ = lambdaJ;
      c.ng = ng;
      const SpectrumResult a = lowest_eigenvalues(c, 5);
      const SpectrumResult b = lowest_eigenvalues(literal_transmon_phase(lambdaJ, ng), 5);
      for (int k = 0; k < 5; ++k)
        CHECK(std::abs(a.eigenvalues[k] - b.eigenvalues[k]) <= 1e-6 * std::abs(a.eigenvalues[k]) + 1e-12);
      check_contract(a);
      check_contract(b);
    }
}

TEST_CASE("gate-charge periodicity and reflection") {
  for (double ng : {0.1, 0.3, 0.45}) {
    Compact1D c;
    c.lambdaJ = 5.0;
    c.ng = ng;
    const auto base = lowest_eigenvalues(c, 4).eigenvalues;
    c.ng = ng + 1.0;
    const auto shifted = lowest_eigenvalues(c, 4).eigenvalues;
    c.ng = -ng;
    const auto mirrored = lowest_eigenvalues(c, 4).eigenvalues;
    for (int k = 0; k < 4; ++k) {
      CHECK(shifted[k] == doctest::Approx(base[k]).epsilon(1e-10));
      CHECK(mirrored[k] == doctest::Approx(base[k]).epsilon(1e-10));
    }
  }
}

TEST_CASE("resolution doubling on the reduced extended Hamiltonian") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.0, 1.0, 0.5);
  const PotentialModel c = PotentialModel::cosine();
  const auto coarse = lowest_eigenvalues(reduced_extended(c, rc, Basis::CompactPhi, {6 * kPi, 1023}, 1.0), 6);
  const auto fine = lowest_eigenvalues(reduced_extended(c, rc, Basis::CompactPhi, {6 * kPi, 2047}, 1.0), 6);
  for (int k = 0; k < 6; ++k)
    CHECK(std::abs(coarse.eigenvalues[k] - fine.eigenvalues[k]) < 1e-6 * std::abs(fine.eigenvalues[k]));
}

TEST_CASE("the two bases of the reduced potential give the same spectrum") {
  // x = sqrt(xi) phi with kinetic xi * kin_phi
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.0, 4.0, 3.0);
  const PotentialModel c = PotentialModel::cosine();
  const auto a = lowest_eigenvalues(reduced_extended(c, rc, Basis::CompactPhi, {4 * kPi, 1535}, 1.0), 5);
  const auto b = lowest_eigenvalues(reduced_extended(c, rc, Basis::ExtendedX, {8 * kPi, 1535}, 1.0), 5);
  for (int k = 0; k < 5; ++k) CHECK(a.eigenvalues[k] == doctest::Approx(b.eigenvalues[k]).epsilon(1e-9));
}

TEST_CASE("requests beyond a quarter of the dimension are refused") {
  Extended1D e;
  e.grid = {5.0, 128};
  e.potential = [](double x) { return x * x; };
  CHECK_THROWS_AS(lowest_eigenvalues(e, 33), ValidationError);
  CHECK_NOTHROW(lowest_eigenvalues(e, 32));
}

TEST_CASE("multivalued circuits cannot be quantized through the reduction") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.0, 1.0, 2.0);
  CHECK_THROWS_AS(reduced_extended(PotentialModel::cosine(), rc, Basis::CompactPhi, {10.0, 512}, 1.0),
                  MultivaluedRegime);
}

TEST_CASE("naive compact adiabatic ladder") {
  const NaiveAdiabatic n = naive_compact_adiabatic(0.1, 10.0, 0.0, 4);
  CHECK(n.formula[0] == doctest::Approx(7.0711e-4).epsilon(1e-4));
  CHECK(n.formula[0] == doctest::Approx(std::sqrt(2.0) * 1e-4 * 10.0 * 0.5).epsilon(1e-14));
  CHECK(n.formula[1] / n.formula[0] == doctest::Approx(3.0).epsilon(1e-14));
  for (int k = 0; k < 4; ++k) CHECK(std::abs(n.numerical[k] - n.formula[k]) <= 0.01 * n.formula[k]);
  CHECK(std::abs(n.mean_phi_c) < 1e-12);
}

TEST_CASE("naive adiabatic ladder refuses the gate-charge degeneracy window") {
  CHECK_THROWS_AS(naive_compact_adiabatic(0.1, 10.0, 0.5, 3), DegenerateFastGround);
  CHECK_THROWS_AS(naive_compact_adiabatic(0.1, 10.0, 0.495, 3), DegenerateFastGround);
  CHECK_NOTHROW(naive_compact_adiabatic(0.1, 10.0, 0.48, 3));
}

TEST_CASE("two-mode circuit without junction: oscillator plus boxed centre of mass") {
  // kappa = 1, xi = 1, kinetic 1/2: relative mode of frequency sqrt(2), centre of
  // mass of mass 2 in a box whose effective half width is L - delta.
  auto ground = [](double L, int k) {
    Regularized2D s;
    s.kappa = 1.0;
    s.xi = 1.0;
    s.lambdaJ = 0.0;
    s.basis_y = FastBasis::Extended;
    s.kinetic = 0.5;
    const int n = int(std::lround(2 * L / 0.2)) - 1;
    s.phi = {L, n};
    s.phi_c = {L, n};
    return lowest_eigenvalues(s, k).eigenvalues;
  };
  const auto e8 = ground(8.0, 1);
  const auto e16 = ground(16.0, 2);
  // E(L) = E_inf + (pi^2 / 16) / (L - delta)^2, two sizes fix E_inf and delta
  const double c = kPi * kPi / 16.0;
  double delta = 0.0, e_inf = 0.0;
  for (int it = 0; it < 200; ++it) {
    e_inf = e16[0] - c / std::pow(16.0 - delta, 2);
    delta = 8.0 - std::sqrt(c / (e8[0] - e_inf));
  }
  CHECK(std::abs(e_inf - std::sqrt(2.0) / 2) < 1e-4);
  CHECK(delta > 0.0);
  CHECK(delta < 1.5);
  // first centre-of-mass excitation, 3 c / (L - delta)^2
  CHECK(e16[1] - e16[0] == doctest::Approx(3 * c / std::pow(16.0 - delta, 2)).epsilon(1e-2));
}

TEST_CASE("compact two-mode gap against the classical and adiabatic predictions") {
  // xi = 30, lambdaJ = 450 (beta = 0.5): harmonic classical gap sqrt(2 V''(0)) with
  // V''(0) = lambdaJ / (1 + beta); adiabatic gap sqrt(2) xi.
  const double classical = std::sqrt(2.0 * 450.0 / 1.5);
  const double adiabatic = std::sqrt(2.0) * 30.0;
  auto gap = [](double kappa) {
    Regularized2D s;
    s.kappa = kappa;
    s.xi = 30.0;
    s.lambdaJ = 450.0;
    s.basis_y = FastBasis::Compact;
    const auto e = lowest_eigenvalues(s, 3).eigenvalues;
    return e[1] - e[0];
  };
  const double g_mid = gap(0.45);
  const double g_small = gap(0.05);
  MESSAGE("gap(0.45) = " << g_mid << ", gap(0.05) = " << g_small);
  CHECK(std::abs(g_mid - classical) < 0.05 * classical);
  // the limits do not commute: the smallest kappa follows the adiabatic ladder
  CHECK(std::abs(g_small - adiabatic) < 0.02 * adiabatic);
}

TEST_CASE("kappa sweep covers both junction bases") {
  Regularized2D base;
  base.xi = 1.0;
  base.lambdaJ = 0.5;
  base.kinetic = 0.5;
  const SweepTable t = spectrum_vs_kappa(base, {0.8, 0.6}, 3);
  REQUIRE(t.rows() == 4);
  const auto gaps = t.column("gap");
  const int st = t.column_index("status");
  for (std::size_t i = 0; i < t.rows(); ++i) {
    CHECK(std::get<std::string>(t.at(i, st)) == "ok");
    CHECK(gaps[i] > 0.0);
  }
  CHECK(t.to_csv().find("gap[E_C]") != std::string::npos);
}

TEST_CASE("kappa sweep annotates failing points and continues") {
  Regularized2D base;
  base.xi = 1.0;
  base.lambdaJ = 0.5;
  const SweepTable t = spectrum_vs_kappa(base, {0.8, 0.0}, 2);
  REQUIRE(t.rows() == 4);
  const int st = t.column_index("status");
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::get<std::string>(t.at(i, st)) == "ok");
  for (std::size_t i = 2; i < 4; ++i) {
    CHECK(std::get<std::string>(t.at(i, st)).rfind("error", 0) == 0);
    CHECK(std::isnan(t.column("gap")[i]));
  }
}

TEST_CASE("transmon capacitance conventions") {
  const TransmonComparison zero = transmon_limit_check(50.0, 0.0, {0.0});
  CHECK(zero.gap_relative_shift[0] == 0.0);
  for (std::size_t k = 0; k < zero.levels_without_cj.size(); ++k)
    CHECK(zero.levels_with_cj[0][k] == zero.levels_without_cj[k]);
  const TransmonComparison t = transmon_limit_check(50.0, 0.0, {0.01});
  CHECK(std::abs(t.gap_relative_shift[0] - 0.005) < 0.2 * 0.005);
  CHECK_THROWS_AS(transmon_limit_check(5.0, 0.0, {0.01}), ValidationError);
}

TEST_CASE("free particle box levels collapse as the box grows") {
  const auto small = free_particle_levels(1.0, {10.0, 1000}, 4);
  const auto large = free_particle_levels(1.0, {20.0, 2000}, 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(small[k] / large[k] == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(small[k] == doctest::Approx(std::pow(kPi * (k + 1) / 20.0, 2)).epsilon(1e-5));
  }
}

TEST_CASE("spacing statistics") {
  const SpacingStats s = spacing_stats({0.0, 1.0, 3.0, 6.0}, 0.5, 10.0);
  CHECK(s.count == 2);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.min == doctest::Approx(2.0));
}

TEST_CASE("exports carry the Hamiltonian description") {
  Compact1D c;
  c.lambdaJ = 3.0;
  const SpectrumResult r = lowest_eigenvalues(c, 3);
  const std::string csv = to_csv(r);
  CHECK(csv.rfind("# {", 0) == 0);
  CHECK(csv.find("\"variant\":\"compact_1d\"") != std::string::npos);
  CHECK(csv.find("energy[E_C]") != std::string::npos);
  const nlohmann::json j = to_json(r);
  CHECK(j["spec"]["variant"] == "compact_1d");
  CHECK(j["eigenvalues"].size() == 3);
}
