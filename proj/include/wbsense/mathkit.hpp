#pragma once

// Special functions used by the closed-form detection probabilities.
//
// Accuracy targets (all in double precision):
//   erfc               relative error <= 1e-12 on |x| <= 10 (delegates to libm)
//   erfc_inv           |erfc(erfc_inv(y)) - y| <= 1e-10
//   regularized gamma  relative error ~1e-14 (series / Lentz continued fraction)
//   chi2_quantile      |chi2_sf(result) - p| <= 1e-9
//   marcum_q           absolute error <= 1e-8 (Poisson mixture, tail < 1e-12)

#include <stdexcept>
#include <string>

namespace wbsense::mathkit {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A probability in [0, 1]. Construction outside the range throws DomainError.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value);

  [[nodiscard]] constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }  // NOLINT(google-explicit-constructor)

  /// Clamps into [0, 1]; used for results that may overshoot by rounding.
  static Probability clamped(double value);

 private:
  double value_ = 0.0;
};

/// Complementary error function, 1 - erf(x).
double erfc(double x);

/// Inverse of erfc on (0, 2). Negative for y > 1.
double erfc_inv(double y);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gamma_q(double a, double x);

/// Pr(X > x) for X central chi-square with `dof` degrees of freedom.
Probability chi2_sf(double x, double dof);

/// The x with chi2_sf(x, dof) = p_tail, found by safeguarded bisection.
double chi2_quantile(Probability p_tail, double dof);

/// Generalized Marcum Q-function Q_M(a, b) for real order M > 0.
///
/// Equal to Pr(Y > b^2) for Y noncentral chi-square with 2M degrees of
/// freedom and noncentrality a^2. Evaluated as the Poisson(a^2/2) mixture
/// of central chi-square survival terms, summed outward from the Poisson
/// mode until the neglected weight falls below 1e-12.
Probability marcum_q(double order, double a, double b);

}  // namespace wbsense::mathkit
