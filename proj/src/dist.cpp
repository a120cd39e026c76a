#include "repro/dist.hpp"

#include <cmath>
#include <limits>

#include "repro/types.hpp"

namespace repro {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    double m2 = 2.0 * m;
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
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  fail(ErrorCode::non_convergence, "incomplete beta continued fraction");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                     a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_cdf(int d1, int d2, double x) {
  if (d1 < 1 || d2 < 1) {
    fail(ErrorCode::invalid_argument, "F degrees of freedom must be >= 1");
  }
  if (x <= 0.0) return 0.0;
  double t = d1 * x / (d1 * x + d2);
  return incomplete_beta(0.5 * d1, 0.5 * d2, t);
}

double f_quantile(int d1, int d2, double level) {
  if (d1 < 1 || d2 < 1) {
    fail(ErrorCode::invalid_argument, "F degrees of freedom must be >= 1");
  }
  if (!(level > 0.0 && level < 1.0)) {
    fail(ErrorCode::invalid_level, "F quantile level must lie in (0, 1)");
  }
  double hi = 1.0;
  while (f_cdf(d1, d2, hi) < level) {
    hi *= 2.0;
    if (hi > 1e300) fail(ErrorCode::non_convergence, "F quantile bracket");
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f_cdf(d1, d2, mid) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

double log_choose(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

}  // namespace repro
