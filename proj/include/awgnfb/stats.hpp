#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace awgnfb {

// Standard normal density and upper tail Q(z) = P(N(0,1) >= z).
double normal_pdf(double z);
double gaussian_tail(double z);
// Lower tail Phi(z) = 1 - Q(z).
double normal_cdf(double z);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (Lentz), |error| ~ 1e-14 for moderate a, b.
double reg_inc_beta(double a, double b, double x);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
// proportion with `successes` out of `trials` at the given confidence
// level (e.g. 0.95 or 0.99).
Interval clopper_pearson(std::size_t successes, std::size_t trials,
                         double confidence);

// Two-sided p-value of the pooled two-proportion z-test.
double two_proportion_pvalue(std::size_t k1, std::size_t n1, std::size_t k2,
                             std::size_t n2);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);
// Same rule mapped onto [lo, hi].
QuadratureRule gauss_legendre(int n, double lo, double hi);

// Gauss-Hermite rule in probabilists' convention:
//   E f(Z) ~ sum_i w_i f(x_i),  Z ~ N(0,1),  sum w_i = 1.
QuadratureRule gauss_hermite_prob(int n);

// Streaming log(sum(exp(a_i))) accumulator; safe for widely spread inputs.
class LogSumExp {
 public:
  void add(double log_term);
  // add log(weight) + log_term, weight > 0 given in linear scale
  void add_weighted(double weight, double log_term);
  double value() const;
  bool empty() const { return count_ == 0; }
  std::size_t count() const { return count_; }

 private:
  double max_ = 0.0;
  double sum_ = 0.0;  // sum of exp(a_i - max_)
  std::size_t count_ = 0;
};

}  // namespace awgnfb
