#include "wbsense/mathkit.hpp"

#include <cmath>
#include <limits>

namespace wbsense::mathkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 100000;

// Series for P(a, x), valid and fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma: shape must be > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma: argument must be >= 0");
}

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("probability out of [0, 1]: " + std::to_string(value));
  }
}

Probability Probability::clamped(double value) {
  if (std::isnan(value)) throw DomainError("probability is NaN");
  return Probability(value < 0.0 ? 0.0 : (value > 1.0 ? 1.0 : value));
}

double erfc(double x) { return std::erfc(x); }

double erfc_inv(double y) {
  if (!(y > 0.0 && y < 2.0)) throw DomainError("erfc_inv: argument must lie in (0, 2)");
  if (y == 1.0) return 0.0;
  // 2 - y is exact here, and erfc(-x) = 2 - erfc(x) keeps the resolution of small tails.
  if (y > 1.0) return -erfc_inv(2.0 - y);
  // erfc(27) underflows to ~5e-319, so this brackets every representable y.
  double lo = -27.0;
  double hi = 27.0;
  for (int i = 0; i < 200 && hi - lo > 4.0 * kEps * std::fmax(1.0, std::fabs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid) > y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  // One Newton step, kept only if it stays inside the final bracket.
  const double slope = -2.0 / std::sqrt(M_PI) * std::exp(-x * x);
  if (slope != 0.0) {
    const double polished = x - (std::erfc(x) - y) / slope;
    if (polished >= lo && polished <= hi) x = polished;
  }
  return x;
}

double gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

Probability chi2_sf(double x, double dof) {
  if (!(x >= 0.0)) throw DomainError("chi2_sf: x must be >= 0");
  if (!(dof > 0.0)) throw DomainError("chi2_sf: dof must be > 0");
  return Probability::clamped(gamma_q(0.5 * dof, 0.5 * x));
}

double chi2_quantile(Probability p_tail, double dof) {
  const double p = p_tail.value();
  if (!(p > 0.0 && p < 1.0)) throw DomainError("chi2_quantile: tail probability must lie in (0, 1)");
  if (!(dof > 0.0)) throw DomainError("chi2_quantile: dof must be > 0");
  double lo = 0.0;
  double hi = std::fmax(1.0, dof);
  while (chi2_sf(hi, dof).value() > p) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw DomainError("chi2_quantile: bracket overflow");
  }
  for (int i = 0; i < 400 && hi - lo > 2.0 * kEps * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_sf(mid, dof).value() > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Probability marcum_q(double order, double a, double b) {
  if (!(order > 0.0)) throw DomainError("marcum_q: order must be > 0");
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("marcum_q: a and b must be >= 0");
  if (b == 0.0) return Probability(1.0);
  const double x = 0.5 * b * b;
  const double lambda = 0.5 * a * a;
  if (lambda == 0.0) return Probability::clamped(gamma_q(order, x));

  constexpr double kTailTolerance = 1e-12;
  const double mode = std::floor(lambda);
  const double w_mode = std::exp(-lambda + mode * std::log(lambda) - std::lgamma(mode + 1.0));

  double sum = w_mode * gamma_q(order + mode, x);

  // Upward from the mode. Past the mode the Poisson ratio lambda/(k+1) < 1,
  // so the remaining mass is bounded by a geometric series.
  double w = w_mode;
  for (double k = mode; k < mode + 1e7; k += 1.0) {
    w *= lambda / (k + 1.0);
    if (w == 0.0) break;
    const double q = gamma_q(order + k + 1.0, x);
    sum += w * q;
    const double ratio = lambda / (k + 2.0);
    if (w * ratio / (1.0 - ratio) < kTailTolerance) break;
  }

  // Downward toward k = 0.
  w = w_mode;
  for (double k = mode; k >= 1.0; k -= 1.0) {
    w *= k / lambda;
    sum += w * gamma_q(order + k - 1.0, x);
    const double ratio = (k - 1.0) / lambda;
    if (ratio < 1.0 && w * ratio / (1.0 - ratio) < kTailTolerance) break;
  }
  return Probability::clamped(sum);
}

}  // namespace wbsense::mathkit
