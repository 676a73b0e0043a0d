#include "circadia/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "circadia/errors.hpp"

namespace circadia {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool near_multiple_of_pi(double v) {
  const double r = std::remainder(v, std::numbers::pi);
  return std::abs(r) < 1e-12;
}

// Second derivatives of the natural cubic spline (Thomas algorithm).
std::vector<double> natural_spline_second(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> diag(n, 1.0), upper(n, 0.0), rhs(n, 0.0), lower(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    lower[i] = h0 / 6.0;
    diag[i] = (h0 + h1) / 3.0;
    upper[i] = h1 / 6.0;
    rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
  return m;
}

AsymptoticClass default_polynomial_tag(const std::vector<double>& c) {
  std::size_t top = 0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] != 0.0) top = k;
  if (top == 0) return AsymptoticClass::Sublinear1a;
  if (c[top] < 0.0) return AsymptoticClass::Unclassified;
  return top == 1 ? AsymptoticClass::QuasilinearL : AsymptoticClass::Superlinear2;
}

}  // namespace

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::Cosine: return "cosine";
    case PotentialKind::BiasedCosine: return "biased_cosine";
    case PotentialKind::PolynomialEven: return "polynomial_even";
    case PotentialKind::Custom: return "custom";
  }
  return "unknown";
}

std::string to_string(AsymptoticClass c) {
  switch (c) {
    case AsymptoticClass::Sublinear1a: return "sublinear-1a";
    case AsymptoticClass::Sublinear1b: return "sublinear-1b";
    case AsymptoticClass::Superlinear2: return "superlinear-2";
    case AsymptoticClass::QuasilinearL: return "quasilinear-L";
    case AsymptoticClass::Unclassified: return "unclassified";
  }
  return "unclassified";
}

AsymptoticClass asymptotic_class_from_string(const std::string& s) {
  for (auto c : {AsymptoticClass::Sublinear1a, AsymptoticClass::Sublinear1b,
                 AsymptoticClass::Superlinear2, AsymptoticClass::QuasilinearL,
                 AsymptoticClass::Unclassified})
    if (to_string(c) == s) return c;
  throw ValidationError("tag", "unknown asymptotic class '" + s + "'");
}

PotentialModel PotentialModel::cosine() {
  PotentialModel p;
  p.kind_ = PotentialKind::Cosine;
  p.tag_ = AsymptoticClass::Sublinear1a;
  return p;
}

PotentialModel PotentialModel::biased_cosine(double phi_ext) {
  if (!std::isfinite(phi_ext)) throw ValidationError("phi_ext", "must be finite");
  PotentialModel p;
  p.kind_ = PotentialKind::BiasedCosine;
  p.phi_ext_ = phi_ext;
  p.tag_ = near_multiple_of_pi(phi_ext) ? AsymptoticClass::Sublinear1a
                                        : AsymptoticClass::Sublinear1b;
  return p;
}

PotentialModel PotentialModel::polynomial_even(std::vector<double> coeffs) {
  if (coeffs.empty()) throw ValidationError("coeffs", "at least one coefficient required");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw ValidationError("coeffs", "must be finite");
  PotentialModel p;
  p.kind_ = PotentialKind::PolynomialEven;
  p.tag_ = default_polynomial_tag(coeffs);
  p.coeffs_ = std::move(coeffs);
  return p;
}

PotentialModel PotentialModel::custom(std::vector<double> phi, std::vector<double> u) {
  if (phi.size() != u.size()) throw ValidationError("custom", "phi and u lengths differ");
  if (phi.size() < 4) throw ValidationError("custom", "need at least 4 tabulated points");
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!std::isfinite(phi[i]) || !std::isfinite(u[i]))
      throw ValidationError("custom", "non-finite table entry");
    if (i > 0 && !(phi[i] > phi[i - 1]))
      throw ValidationError("custom", "phi must be strictly increasing");
  }
  PotentialModel p;
  p.kind_ = PotentialKind::Custom;
  p.tag_ = AsymptoticClass::Unclassified;
  p.second_ = natural_spline_second(phi, u);
  p.knots_ = std::move(phi);
  p.values_ = std::move(u);
  return p;
}

PotentialModel PotentialModel::custom_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("csv", "cannot open '" + path + "'");
  std::vector<double> phi, u;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b)) {
      if (first) {
        first = false;
        continue;
      }
      throw ValidationError("csv", "malformed row '" + line + "'");
    }
    first = false;
    phi.push_back(a);
    u.push_back(b);
  }
  return custom(std::move(phi), std::move(u));
}

PotentialModel PotentialModel::from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", std::string("cosine"));
  PotentialModel p = [&] {
    if (kind == "cosine") return cosine();
    if (kind == "biased_cosine") return biased_cosine(j.at("phi_ext").get<double>());
    if (kind == "polynomial_even")
      return polynomial_even(j.at("coeffs").get<std::vector<double>>());
    if (kind == "custom") {
      if (j.contains("csv")) return custom_from_csv(j.at("csv").get<std::string>());
      return custom(j.at("phi").get<std::vector<double>>(), j.at("u").get<std::vector<double>>());
    }
    throw ValidationError("potential.kind", "unknown kind '" + kind + "'");
  }();
  if (j.contains("tag")) p = p.with_tag(asymptotic_class_from_string(j.at("tag").get<std::string>()));
  return p;
}

bool PotentialModel::periodic() const noexcept {
  return kind_ == PotentialKind::Cosine || kind_ == PotentialKind::BiasedCosine;
}

std::optional<std::pair<double, double>> PotentialModel::support() const {
  if (kind_ != PotentialKind::Custom) return std::nullopt;
  return std::make_pair(knots_.front(), knots_.back());
}

double PotentialModel::eval(double phi, int order) const {
  if (order < 0 || order > 2) throw ValidationError("order", "must be 0, 1 or 2");
  switch (kind_) {
    case PotentialKind::Cosine:
    case PotentialKind::BiasedCosine: {
      const double a = phi - phi_ext_;
      if (order == 0) return -std::cos(a);
      if (order == 1) return std::sin(a);
      return std::cos(a);
    }
    case PotentialKind::PolynomialEven: {
      // Horner in phi^2
      const double s = phi * phi;
      double r = 0.0;
      const std::size_t n = coeffs_.size();
      if (order == 0) {
        for (std::size_t k = n; k-- > 0;) r = r * s + coeffs_[k];
        return r;
      }
      if (order == 1) {
        for (std::size_t k = n; k-- > 1;) r = r * s + 2.0 * double(k) * coeffs_[k];
        return r * phi;
      }
      for (std::size_t k = n; k-- > 1;)
        r = r * s + 2.0 * double(k) * (2.0 * double(k) - 1.0) * coeffs_[k];
      return r;
    }
    case PotentialKind::Custom: return eval_custom(phi, order);
  }
  return 0.0;
}

double PotentialModel::eval_custom(double phi, int order) const {
  const double lo = knots_.front();
  const double hi = knots_.back();
  const double slack = 1e-12 * std::max(1.0, hi - lo);
  if (!(phi >= lo - slack && phi <= hi + slack))
    throw ExtrapolationError("custom potential evaluated at " + std::to_string(phi) +
                             " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  phi = std::clamp(phi, lo, hi);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), phi);
  std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin(), 1),
                                        knots_.size() - 1) - 1;
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - phi) / h;
  const double b = (phi - knots_[i]) / h;
  const double m0 = second_[i], m1 = second_[i + 1];
  const double y0 = values_[i], y1 = values_[i + 1];
  if (order == 0)
    return a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
  if (order == 1)
    return (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
  return a * m0 + b * m1;
}

bool PotentialModel::is_even() const {
  double lo = 0.05, hi = 50.0;
  if (auto s = support()) {
    hi = std::min(-s->first, s->second);
    if (!(hi > 0.0)) return false;
    lo = hi * 1e-3;
  }
  for (int i = 0; i < 257; ++i) {
    const double phi = lo + (hi - lo) * i / 256.0;
    const double a = value(phi), b = value(-phi);
    if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a))) return false;
  }
  return true;
}

PotentialModel PotentialModel::with_tag(AsymptoticClass tag) const {
  if (tag == AsymptoticClass::Sublinear1a && !is_even())
    throw ValidationError("tag", "sublinear-1a requires u(phi) = u(-phi)");
  PotentialModel p = *this;
  p.tag_ = tag;
  p.user_tag_ = true;
  return p;
}

nlohmann::json PotentialModel::to_json() const {
  nlohmann::json j{{"kind", to_string(kind_)}, {"tag", to_string(tag_)}};
  if (kind_ == PotentialKind::BiasedCosine) j["phi_ext"] = phi_ext_;
  if (kind_ == PotentialKind::PolynomialEven) j["coeffs"] = coeffs_;
  if (kind_ == PotentialKind::Custom) {
    j["phi"] = knots_;
    j["u"] = values_;
  }
  return j;
}

ClassificationReport classify_asymptotics(const PotentialModel& p, double gamma_probe,
                                          double phi_max) {
  if (!(phi_max >= 1e3)) throw ValidationError("phi_max", "must be >= 1e3");
  if (!(gamma_probe > 0.0) || !std::isfinite(gamma_probe))
    throw ValidationError("gamma_probe", "must be finite and positive");

  ClassificationReport r;
  r.effective = p.tag();
  if (p.kind() == PotentialKind::Custom) {
    r.diagnostic = "compact-domain: classification inapplicable";
    return r;
  }

  constexpr int windows = 8;
  constexpr int per_window = 512;
  auto window_maxima = [&](auto&& f, double gamma) {
    std::vector<double> m(windows, 0.0);
    const double lo = phi_max / 10.0;
    for (int w = 0; w < windows; ++w) {
      for (int s = 0; s < per_window; ++s) {
        const double t = (w + double(s) / (per_window - 1)) / windows;
        const double phi = lo * std::pow(10.0, t);
        const double v = std::max(std::abs(f(phi)), std::abs(f(-phi))) / std::pow(phi, gamma);
        m[w] = std::max(m[w], v);
      }
    }
    return m;
  };
  enum class Trend { Decays, Grows, Flat, Irregular };
  auto trend_of = [](const std::vector<double>& m) {
    const auto [mn, mx] = std::minmax_element(m.begin(), m.end());
    if (*mx == 0.0) return Trend::Decays;
    if (*mx / *mn - 1.0 < 1e-3) return Trend::Flat;
    bool dec = true, inc = true;
    for (std::size_t i = 1; i < m.size(); ++i) {
      dec = dec && m[i] < m[i - 1];
      inc = inc && m[i] > m[i - 1];
    }
    return dec ? Trend::Decays : inc ? Trend::Grows : Trend::Irregular;
  };

  auto u = [&](double phi) { return p.value(phi); };
  r.window_maxima = window_maxima(u, gamma_probe);
  const Trend trend = trend_of(r.window_maxima);
  const bool even = p.is_even();
  const double g = gamma_probe;

  switch (trend) {
    case Trend::Decays:
      if (even && g < 2.0) {
        r.estimated = AsymptoticClass::Sublinear1a;
      } else if (!even && g < 1.0) {
        r.estimated = AsymptoticClass::Sublinear1b;
      } else {
        r.diagnostic = "decays at gamma=" + std::to_string(g) + " but gamma too large to certify a class";
      }
      break;
    case Trend::Grows:
      if (g >= 2.0) {
        r.estimated = AsymptoticClass::Superlinear2;
      } else {
        r.diagnostic = "grows faster than |phi|^gamma with gamma < 2";
      }
      break;
    case Trend::Flat:
      if (std::abs(g - 2.0) < 1e-12) {
        const double c = r.window_maxima.back();
        auto rest = [&](double phi) { return p.value(phi) - c * phi * phi; };
        const Trend t1 = trend_of(window_maxima(rest, 1.0));
        if (t1 == Trend::Decays || t1 == Trend::Flat) {
          r.estimated = AsymptoticClass::QuasilinearL;
          r.diagnostic = "1/(2 L) ~ " + std::to_string(c);
        } else {
          r.diagnostic = "quadratic envelope with non-sublinear remainder";
        }
      } else {
        r.diagnostic = "|u|/|phi|^gamma saturates; probe gamma=2 for quasilinear behavior";
      }
      break;
    case Trend::Irregular:
      r.diagnostic = "window maxima not monotone over the last decade";
      break;
  }

  if (!p.tag_is_user_supplied()) {
    r.effective = r.estimated;
  } else if (r.estimated != AsymptoticClass::Unclassified && r.estimated != p.tag()) {
    r.mismatch = true;
    if (!r.diagnostic.empty()) r.diagnostic += "; ";
    r.diagnostic += "warning: user tag " + to_string(p.tag()) + " differs from estimate " +
                    to_string(r.estimated);
  }
  return r;
}

}  // namespace circadia
