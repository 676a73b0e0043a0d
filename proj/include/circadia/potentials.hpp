#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace circadia {

enum class PotentialKind { Cosine, BiasedCosine, PolynomialEven, Custom };

/// Asymptotic classes of a nonlinear inductive potential on the real line.
enum class AsymptoticClass { Sublinear1a, Sublinear1b, Superlinear2, QuasilinearL, Unclassified };

std::string to_string(PotentialKind k);
std::string to_string(AsymptoticClass c);
AsymptoticClass asymptotic_class_from_string(const std::string& s);

/// Dimensionless nonlinear potential u(phi) with exact first and second
/// derivatives. Immutable once built.
class PotentialModel {
 public:
  /// u = -cos(phi)
  static PotentialModel cosine();
  /// u = -cos(phi - phi_ext)
  static PotentialModel biased_cosine(double phi_ext);
  /// u = sum_k coeffs[k] phi^(2k)
  static PotentialModel polynomial_even(std::vector<double> coeffs);
  /// Natural cubic spline through (phi, u); phi strictly increasing.
  static PotentialModel custom(std::vector<double> phi, std::vector<double> u);
  /// Two-column CSV (phi, u). A non-numeric first line is treated as a header.
  static PotentialModel custom_from_csv(const std::string& path);
  static PotentialModel from_json(const nlohmann::json& j);

  /// order 0, 1 or 2. Custom kinds throw ExtrapolationError outside the table.
  double eval(double phi, int order) const;
  double value(double phi) const { return eval(phi, 0); }
  double slope(double phi) const { return eval(phi, 1); }
  double curvature(double phi) const { return eval(phi, 2); }

  PotentialKind kind() const noexcept { return kind_; }
  bool periodic() const noexcept;
  /// True when |u'| is bounded on the whole line.
  bool bounded_slope() const noexcept { return periodic(); }
  double phi_ext() const noexcept { return phi_ext_; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  /// Tabulated support of a Custom potential.
  std::optional<std::pair<double, double>> support() const;

  AsymptoticClass tag() const noexcept { return tag_; }
  bool tag_is_user_supplied() const noexcept { return user_tag_; }
  /// Returns a copy carrying a user-supplied tag. Sublinear1a requires an even
  /// potential (checked by sampling); a violation throws ValidationError.
  PotentialModel with_tag(AsymptoticClass tag) const;

  /// u(phi) == u(-phi) on a sample of points.
  bool is_even() const;

  nlohmann::json to_json() const;

 private:
  PotentialModel() = default;
  double eval_custom(double phi, int order) const;

  PotentialKind kind_ = PotentialKind::Cosine;
  AsymptoticClass tag_ = AsymptoticClass::Unclassified;
  bool user_tag_ = false;
  double phi_ext_ = 0.0;
  std::vector<double> coeffs_;
  // spline knots, values and second derivatives
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> second_;
};

struct ClassificationReport {
  AsymptoticClass estimated = AsymptoticClass::Unclassified;
  /// The model's own tag, which takes precedence when user supplied.
  AsymptoticClass effective = AsymptoticClass::Unclassified;
  bool mismatch = false;
  std::string diagnostic;
  /// Maxima of |u|/|phi|^gamma over consecutive windows of the last decade.
  std::vector<double> window_maxima;
};

/// Sampling estimate of the asymptotic class. Requires phi_max >= 1e3.
ClassificationReport classify_asymptotics(const PotentialModel& p, double gamma_probe,
                                          double phi_max);

}  // namespace circadia
