#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "awgnfb/channel.hpp"

using namespace awgnfb;

TEST_CASE("channel params derive the energy split") {
  ChannelParams p;
  p.A = 1.5;
  p.n = 16;
  p.beta = 0.5;
  p.M = 4;
  p.validate();
  CHECK(p.n1() == 8);
  CHECK(p.A1() == doctest::Approx(16.0));
  CHECK(p.A2() == doctest::Approx(8.0));
  CHECK(p.A1() + p.A2() == doctest::Approx(p.n * p.A).epsilon(1e-12));

  SUBCASE("violations throw") {
    ChannelParams bad = p;
    bad.A = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.n = 15;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.sigma = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.M = 8;  // n1 - 1 = 7
    CHECK_THROWS_AS(bad.validate(), std::length_error);
  }
}

TEST_CASE("zero noise stream is the additive identity") {
  NoiseStream z = NoiseStream::zeros();
  std::vector<double> x(10, 0.0);
  std::vector<double> y = forward(x, z);
  for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("forward rejects non-finite input") {
  NoiseStream ns(1, 0, NoiseStream::kForward);
  std::vector<double> x = {1.0, std::nan("")};
  CHECK_THROWS_AS(forward(x, ns), std::invalid_argument);
}

TEST_CASE("forward noise moments over 1e6 draws") {
  NoiseStream ns(12345, 0, NoiseStream::kForward);
  const std::size_t N = 1000000;
  std::vector<double> x(N, 0.5);
  std::vector<double> y = forward(x, ns);
  double mean = 0.0;
  for (std::size_t i = 0; i < N; ++i) mean += y[i] - x[i];
  mean /= N;
  double var = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double d = y[i] - x[i] - mean;
    var += d * d;
  }
  var /= N - 1;
  CHECK(std::fabs(mean) < 0.004);       // 3/sqrt(1e6) plus margin
  CHECK(std::fabs(var - 1.0) < 0.01);   // chi-square concentration
}

TEST_CASE("feedback channel") {
  SUBCASE("sigma = 0 returns y unchanged") {
    NoiseStream ns(3, 0, NoiseStream::kFeedback);
    std::vector<double> y = {1.0, -2.0, 0.25};
    std::vector<double> z = feedback(y, 0.0, ns);
    CHECK(z == y);
  }
  SUBCASE("sigma < 0 is a domain error") {
    NoiseStream ns(3, 0, NoiseStream::kFeedback);
    std::vector<double> y = {1.0};
    CHECK_THROWS_AS(feedback(y, -1.0, ns), std::invalid_argument);
  }
  SUBCASE("variance 4 at sigma = 2 over 1e6 draws") {
    NoiseStream ns(99, 1, NoiseStream::kFeedback);
    const std::size_t N = 1000000;
    std::vector<double> y(N, 0.0);
    std::vector<double> z = feedback(y, 2.0, ns);
    double var = 0.0;
    for (double v : z) var += v * v;
    var /= N;
    CHECK(std::fabs(var - 4.0) < 0.04);
  }
  SUBCASE("feedback noise independent of forward noise") {
    NoiseStream fwd(7, 2, NoiseStream::kForward);
    NoiseStream fb(7, 2, NoiseStream::kFeedback);
    const std::size_t N = 1000000;
    std::vector<double> x(N, 0.0);
    std::vector<double> y = forward(x, fwd);
    std::vector<double> z = feedback(y, 2.0, fb);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double xi = y[i];         // forward noise realization
      double eta = z[i] - y[i];  // feedback noise realization
      sxy += xi * eta;
      sxx += xi * xi;
      syy += eta * eta;
    }
    double corr = sxy / std::sqrt(sxx * syy);
    CHECK(std::fabs(corr) < 0.004);
  }
}

TEST_CASE("streams are reproducible and substream-independent") {
  NoiseStream a(42, 17, NoiseStream::kForward);
  NoiseStream b(42, 17, NoiseStream::kForward);
  for (int i = 0; i < 100; ++i) CHECK(a.gaussian() == b.gaussian());

  NoiseStream c(42, 18, NoiseStream::kForward);
  NoiseStream d(42, 17, NoiseStream::kFeedback);
  bool all_equal_trial = true, all_equal_sub = true;
  NoiseStream a2(42, 17, NoiseStream::kForward);
  for (int i = 0; i < 32; ++i) {
    double base = a2.gaussian();
    if (base != c.gaussian()) all_equal_trial = false;
    if (base != d.gaussian()) all_equal_sub = false;
  }
  CHECK_FALSE(all_equal_trial);
  CHECK_FALSE(all_equal_sub);
}

TEST_CASE("uniform_below covers the range without bias hot spots") {
  NoiseStream ns(5, 5, NoiseStream::kMessage);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 40000; ++i)
    ++counts[static_cast<int>(ns.uniform_below(4))];
  for (int c : counts) CHECK(std::fabs(c - 10000.0) < 500.0);
  CHECK_THROWS(ns.uniform_below(0));
}
