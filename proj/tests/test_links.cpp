#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathnnt/links.hpp"

using namespace pathnnt;

TEST_CASE("inverse links at zero") {
  CHECK(inv_link(LinkFamily::kLogit, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(inv_link(LinkFamily::kProbit, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("logit inverse at ln 3") {
  // expit(x) = 3/4  <=>  x = ln 3
  CHECK(inv_link(LinkFamily::kLogit, std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("probit matches reference normal CDF values") {
  // reference values to 15 digits
  CHECK(normal_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-12));
  CHECK(normal_cdf(-2.5) == doctest::Approx(0.006209665325776132).epsilon(1e-12));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("derivatives") {
  CHECK(inv_link_deriv(LinkFamily::kLogit, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(inv_link_deriv(LinkFamily::kProbit, 0.0) ==
        doctest::Approx(0.3989423).epsilon(1e-6));

  for (double x : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
    const double h = 1e-6;
    for (auto family : {LinkFamily::kLogit, LinkFamily::kProbit}) {
      const double fd = (inv_link(family, x + h) - inv_link(family, x - h)) / (2.0 * h);
      CHECK(inv_link_deriv(family, x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("symmetry, monotonicity and positivity on a grid") {
  for (auto family : {LinkFamily::kLogit, LinkFamily::kProbit}) {
    double previous = -1.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = -10.0 + i * 0.05;
      const double v = inv_link(family, x);
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      CHECK(std::abs(v + inv_link(family, -x) - 1.0) < 1e-12);
      CHECK(v > previous);
      previous = v;
      CHECK(inv_link_deriv(family, x) > 0.0);
    }
  }
}

TEST_CASE("clamping keeps probabilities usable in the extreme tails") {
  CHECK(inv_link(LinkFamily::kLogit, 1e4) == 1.0 - 1e-12);
  CHECK(inv_link(LinkFamily::kLogit, -1e4) == 1e-12);
  CHECK(inv_link(LinkFamily::kProbit, -50.0) == 1e-12);
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959964).epsilon(1e-6));
  // round trip against the CDF across the body and tails
  for (double p : {1e-10, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}
