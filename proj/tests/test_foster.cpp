#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <random>

#include "circadia/errors.hpp"
#include "circadia/foster.hpp"
#include "doctest.h"

using namespace circadia;

namespace {

// Y(s) = c s + 1 / (l0 s) + sum_k (s / L_k) / (s^2 + Omega_k^2) at s = i w, as a rational function.
std::complex<double> admittance_oracle(const FosterModel& m, double w) {
  const std::complex<double> s(0.0, w);
  std::complex<double> y = m.c_inf * s;
  if (m.l_zero) y += 1.0 / (*m.l_zero * s);
  for (const auto& r : m.resonances) y += (s * r.inv_L) / (s * s + r.omega * r.omega);
  return y;
}

FosterModel one_resonance() {
  FosterModel m;
  m.c_inf = 1.0;
  m.resonances = {{2.0, 3.0}};  // L = 0.5, Omega = 3
  return m;
}

std::vector<FosterSample> sample(const FosterModel& m, double lo, double hi, int n, double skip = 0.0) {
  std::vector<FosterSample> out;
  for (int i = 0; i < n; ++i) {
    const double w = lo + (hi - lo) * i / (n - 1);
    bool near = false;
    for (const auto& r : m.resonances) near = near || std::abs(w - r.omega) < skip;
    if (!near) out.push_back({w, susceptance(m, w), 0.0});
  }
  return out;
}

}  // namespace

TEST_CASE("a lone capacitor is linear in omega") {
  FosterModel m;
  m.c_inf = 2.5;
  for (double w : {0.1, 1.0, 7.0}) CHECK(susceptance(m, w) == doctest::Approx(2.5 * w).epsilon(1e-15));
  CHECK(susceptance_slope(m, 3.0) == doctest::Approx(2.5));
}

TEST_CASE("low-frequency slope adds the resonance inductances") {
  const FosterModel m = one_resonance();
  CHECK(susceptance_slope(m, 1e-6) == doctest::Approx(1.0 + 2.0 / 9.0).epsilon(1e-10));
}

TEST_CASE("composite model matches an independent rational evaluation") {
  FosterModel m;
  m.c_inf = 0.7;
  m.l_zero = 1.3;
  m.resonances = {{0.5, 1.2}, {1.7, 2.9}, {0.3, 5.5}};
  std::vector<double> ws;
  for (int i = 0; i < 50; ++i) ws.push_back(0.05 + 0.137 * i);
  const auto y = eval_admittance(m, ws);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const std::complex<double> ref = admittance_oracle(m, ws[i]);
    CHECK(y[i].real() == 0.0);
    CHECK(std::abs(y[i].imag() - ref.imag()) <= 1e-12 * std::max(1.0, std::abs(ref.imag())));
  }
}

TEST_CASE("fit recovers a single resonance") {
  const FosterModel truth = one_resonance();
  const std::vector<FosterSample> s = sample(truth, 0.1, 10.0, 260, 0.3);
  REQUIRE(s.size() >= 200);
  const FosterFit f = fit_foster(s, 1);
  CHECK(std::abs(f.model.c_inf - 1.0) < 1e-6);
  REQUIRE(f.model.resonances.size() == 1);
  CHECK(std::abs(1.0 / f.model.resonances[0].inv_L - 0.5) < 1e-6);
  CHECK(std::abs(f.model.resonances[0].omega - 3.0) < 1e-6);
  CHECK_FALSE(f.report.l_zero_detected);
  CHECK(f.report.standard_errors.size() == f.report.values.size());
  CHECK(f.report.asymptotes.size() == 2);
}

TEST_CASE("capacitor only with no resonances") {
  FosterModel m;
  m.c_inf = 4.0;
  const FosterFit f = fit_foster(sample(m, 0.5, 5.0, 30), 0);
  CHECK(std::abs(f.model.c_inf - 4.0) < 1e-12);
  CHECK(f.model.resonances.empty());
}

TEST_CASE("too few requested resonances is a structural mismatch") {
  FosterModel m;
  m.c_inf = 1.0;
  m.resonances = {{1.0, 2.0}, {0.5, 5.0}};
  CHECK_THROWS_AS(fit_foster(sample(m, 0.1, 8.0, 400, 0.2), 1), StructuralMismatch);
}

TEST_CASE("susceptance slope is positive away from poles") {
  FosterModel m;
  m.c_inf = 0.2;
  m.l_zero = 0.8;
  m.resonances = {{1.0, 1.5}, {0.4, 4.0}};
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const double w = 0.01 + 9.99 * i / 9999.0;
    if (std::abs(w - 1.5) < 1e-3 || std::abs(w - 4.0) < 1e-3) continue;
    CHECK(susceptance_slope(m, w) > 0.0);
    ++checked;
  }
  CHECK(checked > 9900);
}

TEST_CASE("evaluation on a pole is refused") {
  const FosterModel m = one_resonance();
  CHECK_THROWS_AS(susceptance(m, 3.0), PoleProximity);
  CHECK_THROWS_AS(susceptance(m, -1.0), ValidationError);
}

TEST_CASE("lossy samples are rejected") {
  std::vector<FosterSample> s = sample(one_resonance(), 0.1, 10.0, 100, 0.3);
  s[10].re_y = 0.1;
  CHECK_THROWS_AS(fit_foster(s, 1), ValidationError);
}

TEST_CASE("a shunt inductor is detected from the low-frequency sign") {
  FosterModel m = one_resonance();
  m.l_zero = 2.0;
  const FosterFit f = fit_foster(sample(m, 0.1, 10.0, 260, 0.3), 1);
  CHECK(f.report.l_zero_detected);
  REQUIRE(f.model.l_zero.has_value());
  CHECK(std::abs(*f.model.l_zero - 2.0) < 1e-6);
}

TEST_CASE("model validation") {
  FosterModel m;
  m.c_inf = -1.0;
  CHECK_THROWS_AS(m.validate(), ValidationError);
  m.c_inf = 1.0;
  m.resonances = {{1.0, 3.0}, {1.0, 2.0}};
  CHECK_THROWS_AS(m.validate(), ValidationError);
  m.resonances = {{1.0, 2.0}};
  CHECK(FosterModel::from_json(m.to_json()).resonances[0].omega == 2.0);
}

TEST_CASE("evaluate, fit and evaluate again") {
  FosterModel truth;
  truth.c_inf = 0.5;
  truth.resonances = {{1.5, 2.0}, {0.8, 6.0}};
  const std::vector<FosterSample> s = sample(truth, 0.2, 10.0, 400, 0.2);
  const FosterFit f = fit_foster(s, 2);
  double sum = 0.0;
  for (const auto& p : s) sum += std::pow(susceptance(f.model, p.omega) - p.im_y, 2);
  CHECK(std::sqrt(sum / s.size()) < 1e-9);
}

TEST_CASE("sample file reading") {
  const std::string path = "foster_samples.csv";
  {
    std::ofstream f(path);
    f << "omega,ImY\n";
    for (const auto& p : sample(one_resonance(), 0.5, 2.0, 5)) f << p.omega << ',' << p.im_y << '\n';
  }
  CHECK(read_foster_csv(path).size() == 5);
  std::ofstream(path) << "omega,ImY\n";
  CHECK_THROWS_AS(read_foster_csv(path), ValidationError);
  std::remove(path.c_str());
}
