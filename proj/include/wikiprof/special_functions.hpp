#pragma once

#include <cstddef>
#include <vector>

namespace wikiprof {

// Regularized incomplete beta I_x(a, b), evaluated with the modified Lentz
// continued fraction on whichever side of the mean converges fastest.
double incomplete_beta(double a, double b, double x);

// P(F > f) for F ~ F(df1, df2).
double f_upper_tail(double f, double df1, double df2);

double normal_cdf(double z);

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule; cached per n.
const QuadratureRule& gauss_legendre(std::size_t n);

// CDF of the studentized range Q(groups, df). `df` may be +infinity.
// Nested Gauss-Legendre quadrature, 64 nodes per panel on both axes.
double studentized_range_cdf(double q, std::size_t groups, double df);

// Inverse of studentized_range_cdf in q (bisection).
double studentized_range_quantile(double p, std::size_t groups, double df);

}  // namespace wikiprof
