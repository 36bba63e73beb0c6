#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hawkes/kernel.hpp"
#include "support/oracles.hpp"

using hawkes::exp_kernel;
using hawkes::kernel;
using hawkes::tabulated_kernel;

namespace {

// dense tabulation of a*exp(-b*t) on [0, horizon]
tabulated_kernel tabulate_exp(double a, double b, double horizon, double step) {
  tabulated_kernel tk;
  for (double t = 0.0; t <= horizon + 0.5 * step; t += step) {
    tk.t.push_back(t);
    tk.phi.push_back(a * std::exp(-b * t));
  }
  return tk;
}

}  // namespace

TEST_CASE("total mass of the exponential kernel is a/b", "[kernel]") {
  CHECK(hawkes::total_mass(kernel{exp_kernel{2.0, 1.0}}) == 2.0);
  CHECK(hawkes::total_mass(kernel{exp_kernel{0.5, 1.0}}) == 0.5);
  CHECK(hawkes::total_mass(kernel{exp_kernel{3.0, 2.0}}) == 1.5);
}

TEST_CASE("total mass of a tabulated kernel matches quadrature", "[kernel]") {
  kernel k{tabulate_exp(2.0, 1.0, 40.0, 1e-3)};
  CHECK_THAT(hawkes::total_mass(k), Catch::Matchers::WithinAbs(2.0, 1e-4));
}

TEST_CASE("mean delay", "[kernel]") {
  CHECK(hawkes::mean_delay(kernel{exp_kernel{2.0, 1.0}}) == 1.0);
  CHECK(hawkes::mean_delay(kernel{exp_kernel{3.0, 2.0}}) == 0.5);
  kernel k{tabulate_exp(2.0, 1.0, 40.0, 1e-3)};
  CHECK_THAT(hawkes::mean_delay(k), Catch::Matchers::WithinAbs(1.0, 1e-3));
}

TEST_CASE("mean delay rejects a heavy tail the grid cannot resolve", "[kernel]") {
  tabulated_kernel tk;
  for (double t = 0.0; t <= 200.0 + 0.25; t += 0.5) {
    tk.t.push_back(t);
    tk.phi.push_back(1.0 / ((1.0 + t) * (1.0 + t)));
  }
  CHECK_THROWS_AS(hawkes::mean_delay(kernel{tk}), hawkes::domain_error);
}

TEST_CASE("growth exponent of the exponential kernel is p*a-b", "[kernel]") {
  kernel k{exp_kernel{2.0, 1.0}};
  CHECK_THAT(hawkes::growth_exponent(k, 0.85), Catch::Matchers::WithinAbs(0.7, 1e-12));
  CHECK_THAT(hawkes::growth_exponent(k, 0.51), Catch::Matchers::WithinAbs(0.02, 1e-12));
  CHECK_THROWS_AS(hawkes::growth_exponent(k, 0.35), hawkes::domain_error);
  CHECK_THROWS_AS(hawkes::growth_exponent(k, 0.5), hawkes::domain_error);
}

TEST_CASE("growth exponent satisfies its defining root equation", "[kernel]") {
  for (double a : {1.0, 2.0, 4.0}) {
    for (double b : {0.5, 1.0}) {
      for (double p : {0.55, 0.7, 0.95}) {
        if (p * a / b <= 1.0) continue;
        kernel k{exp_kernel{a, b}};
        double alpha = hawkes::growth_exponent(k, p);
        // p * Laplace(phi)(alpha) = 1 for the exponential kernel
        double laplace = a / (alpha + b);
        CHECK_THAT(p * laplace, Catch::Matchers::WithinAbs(1.0, 1e-10));
      }
    }
  }
}

TEST_CASE("growth exponent of a tabulated kernel matches the closed form", "[kernel]") {
  kernel k{tabulate_exp(2.0, 1.0, 40.0, 1e-3)};
  CHECK_THAT(hawkes::growth_exponent(k, 0.85), Catch::Matchers::WithinAbs(0.7, 1e-4));
}

TEST_CASE("convolution powers of the exponential kernel", "[kernel]") {
  kernel k{exp_kernel{2.0, 1.0}};
  CHECK(hawkes::convolution_power(k, 1, 0.0) == 2.0);
  // phi*2(t) = a^2 t e^{-bt}
  CHECK_THAT(hawkes::convolution_power(k, 2, 1.0),
             Catch::Matchers::WithinRel(4.0 * std::exp(-1.0), 1e-12));
  CHECK(hawkes::convolution_power(k, 2, 0.0) == 0.0);
  CHECK_THROWS_AS(hawkes::convolution_power(k, 0, 1.0), hawkes::domain_error);
  CHECK_THROWS_AS(hawkes::convolution_power(k, 1, -1.0), hawkes::domain_error);
}

TEST_CASE("convolution powers satisfy the semigroup identity", "[kernel]") {
  kernel k{exp_kernel{2.0, 1.0}};
  for (int n : {1, 2}) {
    for (int m : {1, 2, 3}) {
      for (double t : {0.5, 1.0, 2.0, 5.0}) {
        double direct = hawkes::convolution_power(k, n + m, t);
        double conv = oracles::integrate(
            [&](double s) {
              return hawkes::convolution_power(k, m, t - s) * hawkes::convolution_power(k, n, s);
            },
            0.0, t, 1e-12);
        CHECK_THAT(conv, Catch::Matchers::WithinAbs(direct, 1e-8));
      }
    }
  }
}

TEST_CASE("convolution powers integrate to mass^n", "[kernel]") {
  kernel k{exp_kernel{2.0, 1.0}};
  for (int n : {1, 2, 3, 5}) {
    double mass = oracles::integrate(
        [&](double s) { return hawkes::convolution_power(k, n, s); }, 0.0, 60.0, 1e-12);
    CHECK_THAT(mass, Catch::Matchers::WithinRel(std::pow(2.0, n), 1e-8));
  }
}

TEST_CASE("first-moment deficit of convolution powers stays in its band", "[kernel]") {
  // eps_n(t) = Lambda^n t - int_0^t (t-u) phi*n(u) du lies in [0, n Lambda^n kappa]
  kernel k{exp_kernel{2.0, 1.0}};
  double lambda = 2.0, kappa = 1.0;
  for (int n : {1, 2, 3, 5}) {
    for (double t : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
      double integral = oracles::integrate(
          [&](double u) { return (t - u) * hawkes::convolution_power(k, n, u); }, 0.0, t, 1e-11);
      double eps = std::pow(lambda, n) * t - integral;
      CHECK(eps >= -1e-7);
      CHECK(eps <= n * std::pow(lambda, n) * kappa + 1e-7);
    }
  }
}

TEST_CASE("weighted series of convolution powers", "[kernel]") {
  kernel k{exp_kernel{2.0, 1.0}};
  CHECK_THAT(hawkes::weighted_series(k, 0.35, 0.0), Catch::Matchers::WithinRel(0.7, 1e-12));
  CHECK_THAT(hawkes::weighted_series(k, 0.5, 3.0), Catch::Matchers::WithinRel(1.0, 1e-12));
  CHECK(hawkes::weighted_series(k, 0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(hawkes::weighted_series(k, -0.1, 1.0), hawkes::domain_error);
  CHECK_THROWS_AS(hawkes::weighted_series(k, 0.5, -1.0), hawkes::domain_error);

  // supercritical weight: sum_k rho^n phi*n(t) = rho a e^{(rho a - b) t}
  double got = hawkes::weighted_series(k, 0.85, 2.0);
  CHECK_THAT(got, Catch::Matchers::WithinRel(1.7 * std::exp(1.4), 1e-12));

  // term-by-term oracle
  double sum = 0.0;
  for (int n = 1; n < 200; ++n) {
    double term = std::pow(0.85, n) * hawkes::convolution_power(k, n, 2.0);
    sum += term;
    if (n > 1 && term < 1e-16 * sum) break;
  }
  CHECK_THAT(got, Catch::Matchers::WithinRel(sum, 1e-10));
}

TEST_CASE("weighted series for a tabulated kernel matches the closed form", "[kernel]") {
  kernel k{tabulate_exp(2.0, 1.0, 30.0, 2e-3)};
  CHECK_THAT(hawkes::weighted_series(k, 0.35, 1.0),
             Catch::Matchers::WithinRel(0.7 * std::exp(-0.3), 1e-3));
}

TEST_CASE("kernel moments bundle", "[kernel]") {
  auto m = hawkes::compute_moments(kernel{exp_kernel{2.0, 1.0}}, 0.85);
  CHECK(m.total_mass == 2.0);
  CHECK(m.mean_delay == 1.0);
  REQUIRE(m.growth_exponent.has_value());
  CHECK_THAT(*m.growth_exponent, Catch::Matchers::WithinAbs(0.7, 1e-12));
  auto sub = hawkes::compute_moments(kernel{exp_kernel{2.0, 1.0}}, 0.35);
  CHECK_FALSE(sub.growth_exponent.has_value());
}

TEST_CASE("kernel validation rejects malformed inputs", "[kernel]") {
  CHECK_THROWS_AS(hawkes::validate(exp_kernel{-1.0, 1.0}), hawkes::domain_error);
  CHECK_THROWS_AS(hawkes::validate(exp_kernel{1.0, 0.0}), hawkes::domain_error);
  tabulated_kernel bad_grid;
  bad_grid.t = {0.0, 1.0, 1.0};
  bad_grid.phi = {1.0, 0.5, 0.25};
  CHECK_THROWS_AS(hawkes::validate(bad_grid), hawkes::domain_error);
  tabulated_kernel bad_value;
  bad_value.t = {0.0, 1.0, 2.0};
  bad_value.phi = {1.0, -0.5, 0.25};
  CHECK_THROWS_AS(hawkes::validate(bad_value), hawkes::domain_error);
  tabulated_kernel offset;
  offset.t = {1.0, 2.0};
  offset.phi = {1.0, 0.5};
  CHECK_THROWS_AS(hawkes::validate(offset), hawkes::domain_error);
}
