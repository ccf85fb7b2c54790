#include "awgnfb/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace awgnfb {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double gaussian_tail(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double eps = 1e-15;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(b) - std::lgamma(a) +
                        b * std::log1p(-x) + a * std::log(x)) *
                   beta_cf(b, a, 1.0 - x) / b;
}

namespace {

// Solve I_x(a, b) = target for x by bisection.
double inv_inc_beta(double a, double b, double target) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (reg_inc_beta(a, b, mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Interval clopper_pearson(std::size_t successes, std::size_t trials,
                         double confidence) {
  if (trials == 0) throw std::invalid_argument("clopper_pearson: no trials");
  if (successes > trials)
    throw std::invalid_argument("clopper_pearson: successes > trials");
  double alpha = 1.0 - confidence;
  double k = static_cast<double>(successes);
  double n = static_cast<double>(trials);
  Interval ci;
  // lower bound: P(X >= k | p) = alpha/2  ->  I_p(k, n-k+1) = alpha/2
  ci.lo = (successes == 0) ? 0.0 : inv_inc_beta(k, n - k + 1.0, alpha / 2.0);
  // upper bound: P(X <= k | p) = alpha/2  ->  I_p(k+1, n-k) = 1 - alpha/2
  ci.hi = (successes == trials)
              ? 1.0
              : inv_inc_beta(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return ci;
}

double two_proportion_pvalue(std::size_t k1, std::size_t n1, std::size_t k2,
                             std::size_t n2) {
  if (n1 == 0 || n2 == 0)
    throw std::invalid_argument("two_proportion_pvalue: empty sample");
  double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  double pooled =
      static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  double se = std::sqrt(pooled * (1.0 - pooled) *
                        (1.0 / static_cast<double>(n1) +
                         1.0 / static_cast<double>(n2)));
  if (se == 0.0) return 1.0;
  double z = std::fabs(p1 - p2) / se;
  return 2.0 * gaussian_tail(z);
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.141592653589793;
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev-angle initial guess.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) {
        // one more pass so pp matches the converged node
        p0 = 1.0;
        p1 = x;
        for (int j = 2; j <= n; ++j) {
          double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

QuadratureRule gauss_legendre(int n, double lo, double hi) {
  QuadratureRule base = gauss_legendre(n);
  double mid = 0.5 * (hi + lo);
  double half = 0.5 * (hi - lo);
  for (int i = 0; i < n; ++i) {
    base.nodes[i] = mid + half * base.nodes[i];
    base.weights[i] *= half;
  }
  return base;
}

QuadratureRule gauss_hermite_prob(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_prob: n < 1");
  // Physicists' Hermite nodes by Newton iteration, then rescaled to the
  // probabilists' convention (weight exp(-x^2/2)/sqrt(2 pi), weights sum 1).
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    double w = 2.0 / (pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  // physicists' -> probabilists': x -> sqrt(2) x, w -> w / sqrt(pi)
  const double inv_sqrt_pi = 0.5641895835477563;
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] *= kSqrt2;
    rule.weights[i] *= inv_sqrt_pi;
  }
  return rule;
}

void LogSumExp::add(double log_term) {
  if (count_ == 0) {
    max_ = log_term;
    sum_ = 1.0;
  } else if (log_term > max_) {
    sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
    max_ = log_term;
  } else {
    sum_ += std::exp(log_term - max_);
  }
  ++count_;
}

void LogSumExp::add_weighted(double weight, double log_term) {
  if (weight <= 0.0) {
    ++count_;
    return;
  }
  add(std::log(weight) + log_term);
}

double LogSumExp::value() const {
  if (count_ == 0 || sum_ <= 0.0)
    return -std::numeric_limits<double>::infinity();
  return max_ + std::log(sum_);
}

}  // namespace awgnfb
