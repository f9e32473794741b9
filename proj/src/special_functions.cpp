#include "wikiprof/special_functions.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace wikiprof {

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 100000;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_upper_tail(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw std::invalid_argument("f_upper_tail: bad df");
  if (std::isinf(f)) return 0.0;
  if (!(f > 0.0)) return 1.0;
  return incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

const QuadratureRule& gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::fabs(step) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

constexpr std::size_t kNodes = 64;

template <typename Fn>
double integrate(double lo, double hi, std::size_t panels, Fn&& fn) {
  const auto& rule = gauss_legendre(kNodes);
  const double width = (hi - lo) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + width * static_cast<double>(p);
    const double mid = a + width / 2.0;
    double s = 0.0;
    for (std::size_t i = 0; i < kNodes; ++i) s += rule.weights[i] * fn(mid + width / 2.0 * rule.nodes[i]);
    total += s * width / 2.0;
  }
  return total;
}

// P(range of `groups` iid standard normals < w).
double normal_range_cdf(double w, std::size_t groups) {
  if (!(w > 0.0)) return 0.0;
  const double k = static_cast<double>(groups);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double value = integrate(-8.5, 8.5, 12, [&](double z) {
    const double inner = normal_cdf(z) - normal_cdf(z - w);
    return inv_sqrt_2pi * std::exp(-0.5 * z * z) * std::pow(inner, k - 1.0);
  });
  return std::min(1.0, std::max(0.0, k * value));
}

}  // namespace

double studentized_range_cdf(double q, std::size_t groups, double df) {
  if (groups < 2) throw std::invalid_argument("studentized range needs at least 2 groups");
  if (!(df > 0.0)) throw std::invalid_argument("studentized range needs df > 0");
  if (!(q > 0.0)) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(df)) return normal_range_cdf(q, groups);

  // s = sqrt(chi2_df / df) has density proportional to s^(df-1) exp(-df s^2 / 2).
  const double log_norm = (df / 2.0) * std::log(df) - std::lgamma(df / 2.0) -
                          (df / 2.0 - 1.0) * std::log(2.0);
  const double spread = 12.0 / std::sqrt(2.0 * df);
  const double lo = std::max(0.0, 1.0 - spread);
  const double hi = 1.0 + spread + (df < 10.0 ? 4.0 : 0.0);
  const double value = integrate(lo, hi, 8, [&](double s) {
    if (s <= 0.0) return 0.0;
    const double log_density = log_norm + (df - 1.0) * std::log(s) - df * s * s / 2.0;
    return std::exp(log_density) * normal_range_cdf(q * s, groups);
  });
  return std::min(1.0, std::max(0.0, value));
}

double studentized_range_quantile(double p, std::size_t groups, double df) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile probability outside (0, 1)");
  double lo = 0.0, hi = 8.0;
  while (studentized_range_cdf(hi, groups, df) < p) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("studentized range quantile did not bracket");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (studentized_range_cdf(mid, groups, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wikiprof
