#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "wikiprof/special_functions.hpp"

using namespace wikiprof;
using doctest::Approx;

TEST_CASE("incomplete beta closed forms") {
  CHECK(incomplete_beta(1, 1, 0.3) == Approx(0.3).epsilon(1e-14));
  CHECK(incomplete_beta(2, 1, 0.3) == Approx(0.09).epsilon(1e-14));
  CHECK(incomplete_beta(0.5, 0.5, 0.5) == Approx(0.5).epsilon(1e-13));
  CHECK(incomplete_beta(3, 4, 0.0) == 0.0);
  CHECK(incomplete_beta(3, 4, 1.0) == 1.0);
  // I_x(a, 1) = x^a and I_x(1, b) = 1 - (1-x)^b.
  CHECK(incomplete_beta(4.5, 1, 0.7) == Approx(std::pow(0.7, 4.5)).epsilon(1e-13));
  CHECK(incomplete_beta(1, 3.5, 0.2) == Approx(1 - std::pow(0.8, 3.5)).epsilon(1e-13));
}

TEST_CASE("incomplete beta matches the power series") {
  for (double a : {0.5, 1.0, 2.5, 7.0, 20.0})
    for (double b : {0.5, 2.0, 5.5, 15.0})
      for (double x : {0.05, 0.2, 0.4, 0.6}) {
        const double want = oracle::series_incomplete_beta(a, b, x);
        CHECK(std::fabs(incomplete_beta(a, b, x) - want) <= 1e-10 * want);
      }
}

TEST_CASE("F tail values") {
  // F(1, 4) tail at 13.5 from the closed form for df1 = 1 via a t(4) variable.
  const double t = std::sqrt(13.5);
  const double closed = 1.0 - t * (6.0 + t * t) / std::pow(4.0 + t * t, 1.5);
  CHECK(f_upper_tail(13.5, 1, 4) == Approx(closed).epsilon(1e-12));
  CHECK(f_upper_tail(0.0, 3, 10) == 1.0);
  CHECK(f_upper_tail(std::numeric_limits<double>::infinity(), 3, 10) == 0.0);
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == Approx(0.975).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const auto& rule = gauss_legendre(64);
  double s0 = 0, s2 = 0, s126 = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s0 += rule.weights[i];
    s2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    s126 += rule.weights[i] * std::pow(rule.nodes[i], 126);
  }
  CHECK(s0 == Approx(2.0).epsilon(1e-14));
  CHECK(s2 == Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(s126 == Approx(2.0 / 127.0).epsilon(1e-12));
}

TEST_CASE("studentized range distribution") {
  // Two groups: Q = sqrt(2) |Z| in the infinite-df limit.
  const double z = 1.959963984540054;
  CHECK(studentized_range_cdf(z * std::sqrt(2.0), 2, std::numeric_limits<double>::infinity()) ==
        Approx(0.95).epsilon(1e-9));
  CHECK(std::fabs(studentized_range_quantile(0.95, 2, 1e6) - 2.7718) <= 1e-3);
  // Published table values (k, df, q_p).
  CHECK(std::fabs(studentized_range_quantile(0.95, 3, 10) - 3.877) <= 2e-3);
  CHECK(std::fabs(studentized_range_quantile(0.95, 4, 20) - 3.958) <= 2e-3);
  CHECK(std::fabs(studentized_range_quantile(0.95, 5, 60) - 3.977) <= 2e-3);
  CHECK(std::fabs(studentized_range_quantile(0.99, 4, 5) - 7.804) <= 2e-3);
  // Two groups with finite df: Q = sqrt(2) |t|, so P(Q <= q) = 1 - 2 * P(T > q / sqrt 2).
  const double q = 3.0, df = 7.0, tt = q / std::sqrt(2.0);
  const double t_tail = 0.5 * incomplete_beta(df / 2, 0.5, df / (df + tt * tt));
  CHECK(std::fabs(studentized_range_cdf(q, 2, df) - (1 - 2 * t_tail)) <= 1e-6);
  CHECK(studentized_range_cdf(0.0, 4, 10) == 0.0);
}
