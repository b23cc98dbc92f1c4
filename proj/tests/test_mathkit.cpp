#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <vector>

#include "wbsense/mathkit.hpp"

using namespace wbsense::mathkit;

// Boost.Math serves as the independent oracle throughout.

TEST_CASE("probability range is enforced") {
  CHECK_NOTHROW(Probability(0.0));
  CHECK_NOTHROW(Probability(1.0));
  CHECK_THROWS_AS(Probability(-1e-12), DomainError);
  CHECK_THROWS_AS(Probability(1.0 + 1e-12), DomainError);
  CHECK_THROWS_AS(Probability(std::nan("")), DomainError);
  CHECK(Probability::clamped(1.0 + 1e-15).value() == 1.0);
  CHECK(Probability::clamped(-3.0).value() == 0.0);
}

TEST_CASE("erfc_inv matches boost and round-trips") {
  const std::vector<double> ys = {1e-300, 1e-100, 1e-20, 1e-8, 0.002, 0.2, 0.5, 0.999, 1.0,
                                  1.3,    1.8,    1.998, 1.99999, 2.0 - 1e-12};
  for (double y : ys) {
    CAPTURE(y);
    const double x = erfc_inv(y);
    const double oracle = boost::math::erfc_inv(y);
    CHECK(x == doctest::Approx(oracle).epsilon(1e-12).scale(1.0));
    CHECK(std::fabs(std::erfc(x) - y) <= 1e-10 * std::fmax(y, 1e-300) + 1e-300);
  }
  CHECK(erfc_inv(1.0) == 0.0);
  CHECK(erfc_inv(0.2) == doctest::Approx(0.9061938024368232).epsilon(1e-13));
  CHECK_THROWS_AS(erfc_inv(0.0), DomainError);
  CHECK_THROWS_AS(erfc_inv(2.0), DomainError);
  CHECK_THROWS_AS(erfc_inv(-0.5), DomainError);
}

TEST_CASE("erfc delegates to libm") {
  for (double x = -10.0; x <= 10.0; x += 0.37) CHECK(wbsense::mathkit::erfc(x) == doctest::Approx(boost::math::erfc(x)).epsilon(1e-12));
}

TEST_CASE("regularized incomplete gamma matches boost") {
  const std::vector<double> shapes = {0.5, 1.0, 2.5, 27.0, 500.0, 19500.0};
  for (double a : shapes) {
    for (double f : {0.01, 0.3, 0.9, 1.0, 1.1, 2.0, 5.0}) {
      const double x = a * f;
      CAPTURE(a);
      CAPTURE(x);
      const double q = boost::math::gamma_q(a, x);
      const double p = boost::math::gamma_p(a, x);
      CHECK(gamma_q(a, x) == doctest::Approx(q).epsilon(1e-10));
      CHECK(gamma_p(a, x) == doctest::Approx(p).epsilon(1e-10));
      CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(gamma_q(3.0, 0.0) == 1.0);
  CHECK(gamma_p(3.0, 0.0) == 0.0);
  CHECK_THROWS_AS(gamma_q(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(gamma_q(1.0, -1.0), DomainError);
}

TEST_CASE("chi-square survival and quantile") {
  for (double dof : {1.0, 2.0, 54.0, 159.0, 1000.0}) {
    const boost::math::chi_squared dist(dof);
    for (double x : {0.1, dof * 0.5, dof, dof * 1.7, dof * 3.0}) {
      CHECK(chi2_sf(x, dof).value() == doctest::Approx(boost::math::cdf(boost::math::complement(dist, x))).epsilon(1e-9));
    }
    for (double p : {0.5, 0.1, 0.001, 1e-8}) {
      CAPTURE(dof);
      CAPTURE(p);
      const double q = chi2_quantile(Probability(p), dof);
      CHECK(q == doctest::Approx(boost::math::quantile(boost::math::complement(dist, p))).epsilon(1e-9));
      CHECK(std::fabs(chi2_sf(q, dof).value() - p) <= 1e-9);
    }
  }
  // lambda_e at the published frame count.
  CHECK(chi2_quantile(Probability(0.001), 54.0) == doctest::Approx(91.8718468816601).epsilon(1e-9));
  CHECK_THROWS_AS(chi2_quantile(Probability(0.0), 3.0), DomainError);
  CHECK_THROWS_AS(chi2_quantile(Probability(1.0), 3.0), DomainError);
  CHECK_THROWS_AS(chi2_sf(-1.0, 3.0), DomainError);
}

TEST_CASE("marcum Q equals the noncentral chi-square survival") {
  struct Point {
    double order, a, b;
  };
  const std::vector<Point> points = {{0.5, 0.0, 1.0},  {1.0, 1.0, 1.0},   {1.0, 3.0, 2.0},     {2.5, 5.0, 6.5},
                                     {27.0, 7.2, 9.5}, {27.0, 10.0, 7.0}, {27.0, 20.0, 25.0},  {79.5, 30.0, 33.0},
                                     {79.5, 5.0, 13.5}, {3.0, 0.1, 40.0}, {0.5, 12.0, 11.0}};
  for (const auto& pt : points) {
    CAPTURE(pt.order);
    CAPTURE(pt.a);
    CAPTURE(pt.b);
    const double dof = 2.0 * pt.order;
    const double x = pt.b * pt.b;
    double oracle = 0.0;
    if (pt.a == 0.0) {
      oracle = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
    } else {
      oracle = boost::math::cdf(boost::math::complement(boost::math::non_central_chi_squared(dof, pt.a * pt.a), x));
    }
    CHECK(std::fabs(marcum_q(pt.order, pt.a, pt.b).value() - oracle) <= 1e-8);
  }
  CHECK(marcum_q(3.0, 2.0, 0.0).value() == 1.0);
  CHECK_THROWS_AS(marcum_q(0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(marcum_q(1.0, -1.0, 1.0), DomainError);
}

TEST_CASE("marcum Q is increasing in a and decreasing in b") {
  double prev = -1.0;
  for (double a = 0.0; a <= 15.0; a += 0.5) {
    const double q = marcum_q(27.0, a, 9.0).value();
    CHECK(q >= prev - 1e-12);
    prev = q;
  }
  prev = 2.0;
  for (double b = 0.5; b <= 20.0; b += 0.5) {
    const double q = marcum_q(27.0, 6.0, b).value();
    CHECK(q <= prev + 1e-12);
    prev = q;
  }
}
