// Acceptance suite: every criterion prints one PASS/FAIL line and fails
// the binary on violation. Tolerances are pinned in code.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>
#include <vector>

#include "awgnfb/decoder.hpp"
#include "awgnfb/exponents.hpp"
#include "awgnfb/harness.hpp"
#include "awgnfb/protocol.hpp"
#include "awgnfb/stats.hpp"

using namespace awgnfb;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  }
};

void report(int criterion, const char* name, bool ok, const std::string& detail,
            double seconds) {
  std::printf("criterion %d (%s): %s — %s [%.1fs]\n", criterion, name,
              ok ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
}

ChannelParams desk_params(double sigma2, double A = 1.5) {
  ChannelParams p;
  p.A = A;
  p.n = 16;
  p.M = 4;
  p.beta = 0.5;
  p.tau2 = 0.15;
  p.tau3 = 0.05;
  p.sigma = std::sqrt(sigma2);
  return p;
}

double tail_oracle(double z) {
  const int steps = 4000;
  const double hi = z + 40.0;
  const double h = (hi - z) / steps;
  double acc = normal_pdf(z) + normal_pdf(hi);
  for (int i = 1; i < steps; ++i)
    acc += normal_pdf(z + i * h) * ((i % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("criterion 1: code geometry") {
  Timer timer;
  std::mt19937_64 gen(20250809);
  std::uniform_real_distribution<double> u(0.1, 40.0);
  int violations = 0;
  int checked = 0;
  for (int cfg = 0; cfg < 20; ++cfg) {
    int n1 = 8 + static_cast<int>(gen() % 12);
    int M = 4 + static_cast<int>(gen() % (n1 - 4));
    double A2 = u(gen);
    for (int k = 2; k <= 4; ++k) {
      std::vector<int> pool(M);
      for (int i = 0; i < M; ++i) pool[i] = i;
      std::shuffle(pool.begin(), pool.end(), gen);
      std::vector<int> sel(pool.begin(), pool.begin() + k);
      PhaseTwoCode code = build_phase2(sel, M, n1, A2);
      double dk = simplex_distance(k, A2);
      for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) {
          bool both = code.selected_position(i) >= 0 &&
                      code.selected_position(j) >= 0;
          double want = both ? dk : 2.0 * A2;
          double got = squared_distance(code.codeword(i), code.codeword(j));
          ++checked;
          if (std::fabs(got - want) > 1e-9 * want) ++violations;
        }
    }
  }
  bool ok = violations == 0;
  report(1, "code geometry", ok,
         std::to_string(checked) + " pairwise distances, " +
             std::to_string(violations) + " violations",
         timer.seconds());
  CHECK(ok);
  CHECK(timer.seconds() < 1.0);
}

TEST_CASE("criterion 2: exponent assembly") {
  Timer timer;
  int violations = 0;
  double worst = 0.0;
  for (int ia = 0; ia < 10; ++ia) {
    double A = 0.5 + 0.7 * ia;
    for (int is = 0; is < 10; ++is) {
      double s2 = is / 9.0;  // [0, 1]
      ExponentParams p{0.5, 0.15, 0.05, s2, A};
      ExponentReport r = overall(p);
      double target = A * (1.0 - s2) / 3.0;
      double err = std::fabs(r.per_n - target);
      worst = std::max(worst, err);
      if (err > 1e-12) ++violations;
    }
  }
  ExponentParams g{0.5, 0.15, 0.05, 0.0, 3.0};
  double ratio = overall(g).per_n / exponent_no_feedback(3.0);
  bool ratio_ok = std::fabs(ratio - 4.0 / 3.0) <= 1e-12;
  bool ok = violations == 0 && ratio_ok;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "100-point grid, worst |err| = %.3g, gain ratio %.15f",
                worst, ratio);
  report(2, "exponent assembly", ok, buf, timer.seconds());
  CHECK(ok);
  CHECK(timer.seconds() < 1.0);
}

TEST_CASE("criterion 3: infimum dominance") {
  Timer timer;
  const std::vector<double> betas = {0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<double> sigma2s = {0.001, 0.005, 0.01, 0.05,
                                       0.1,   0.25,  0.5,  1.0};
  int points = 0, s2_viol = 0, s3_viol = 0, k4_viol = 0;
  int gap_checks = 0, gap_viol = 0;
  double worst_k4 = 1e300;
  double t2lo = tau2_window_lo(), t2hi = tau2_window_hi();
  double t3lo = tau3_window_lo();
  for (double beta : betas) {
    for (int i2 = 0; i2 < 5; ++i2) {
      double tau2 = t2lo + (t2hi - t2lo) * i2 / 4.0;
      for (int i3 = 0; i3 < 5; ++i3) {
        double tau3 = t3lo + (1.0 - tau2 - t3lo) * i3 / 4.0;
        for (double s2 : sigma2s) {
          ++points;
          double inf_s2 =
              infimum_2d(OutsideBranch::group2, beta, tau2, s2).value;
          double inf_s3 =
              infimum_2d(OutsideBranch::group3, beta, tau3, s2).value;
          Infimum5dResult k4 = infimum_5d_k4(beta, tau2, tau3, s2);
          if (inf_s2 <
              closed_form_2d_bound(OutsideBranch::group2, beta, tau2, s2))
            ++s2_viol;
          if (inf_s3 <
              closed_form_2d_bound(OutsideBranch::group3, beta, tau3, s2))
            ++s3_viol;
          double margin = k4.value - closed_form_k4_bound(beta, tau2, s2);
          worst_k4 = std::min(worst_k4, margin);
          if (margin < 0.0) ++k4_viol;
          if (s2 <= 0.01) {
            ++gap_checks;
            double limit = k4_limit_sigma0(beta, tau2);
            if (std::fabs(k4.value - limit) / limit >= 0.01) ++gap_viol;
          }
        }
      }
    }
  }
  bool ok = s2_viol == 0 && s3_viol == 0 && k4_viol == 0 && gap_viol == 0 &&
            points == 1000;
  char buf[300];
  std::snprintf(
      buf, sizeof(buf),
      "%d grid points; violations: S2=%d S3=%d k4=%d (worst k4 margin "
      "%.3f); small-sigma gap checks %d, over 1%%: %d. The k4 closed form "
      "is known to overstate the true program minimum (see verify report)",
      points, s2_viol, s3_viol, k4_viol, worst_k4, gap_checks, gap_viol);
  report(3, "infimum dominance", ok, buf, timer.seconds());
  CHECK(ok);
  CHECK(timer.seconds() < 300.0);
}

TEST_CASE("criterion 4: baseline calibration") {
  Timer timer;
  RunConfig c;
  c.params = desk_params(0.0, 1.0);  // n*A = 16
  c.params.M = 2;
  c.scheme = Scheme::baseline_no_feedback;
  c.trials = 1000000;
  c.seed = 20250401;
  RunStats s = run_trials(c);
  double q = gaussian_tail(std::sqrt(8.0));
  Interval ci = clopper_pearson(s.errors, s.trials, 0.99);
  bool ok = ci.lo <= q && q <= ci.hi;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "p_hat = %.4g, 99%% CI [%.4g, %.4g], Q(sqrt 8) = %.4g",
                s.p_hat, ci.lo, ci.hi, q);
  report(4, "baseline calibration", ok, buf, timer.seconds());
  CHECK(ok);
  CHECK(timer.seconds() < 120.0);
}

TEST_CASE("criterion 5: decoder oracle equivalence") {
  Timer timer;
  ChannelParams p = desk_params(0.25);
  const std::uint64_t trials = 10000;
  MixtureConfig base;  // 4096 samples
  MixtureConfig twice;
  twice.num_samples = base.num_samples * 2;

  std::atomic<long> agree_base{0}, agree_twice{0};
  auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
    Codebook phase1 = build_orthogonal(p.M, p.n1(), p.A1());
    long ab = 0, at = 0;
    for (std::uint64_t trial = lo; trial < hi; ++trial) {
      TrialStreams ts(618, trial);
      int msg = static_cast<int>(ts.message.uniform_below(p.M));
      std::vector<double> y1 = forward(phase1.codewords[msg], ts.forward);
      std::vector<double> z = feedback(y1, p.sigma, ts.feedback);
      GroupSelection sel =
          select_group(rank(phase1, z), p.A1(), p.tau2, p.tau3);
      PhaseTwoCode phase2 = build_phase2(sel.members, p.M, p.n1(), p.A2());
      std::vector<double> y2 = forward(phase2.codeword(msg), ts.forward);
      int oracle = decode_exact(y1, y2, p);
      NoiseStream ns1(1001, trial, NoiseStream::kDecoder);
      if (decode(y1, y2, p, ns1, base) == oracle) ++ab;
      NoiseStream ns2(1002, trial, NoiseStream::kDecoder);
      if (decode(y1, y2, p, ns2, twice) == oracle) ++at;
    }
    agree_base += ab;
    agree_twice += at;
  };
  std::thread t1(worker, 0, trials / 2);
  worker(trials / 2, trials);
  t1.join();

  double rate_base = static_cast<double>(agree_base) / trials;
  double rate_twice = static_cast<double>(agree_twice) / trials;
  bool ok = rate_base >= 0.99 && rate_twice >= rate_base;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "agreement %.4f at 4096 samples, %.4f at 8192 samples",
                rate_base, rate_twice);
  report(5, "decoder oracle equivalence", ok, buf, timer.seconds());
  CHECK(ok);
  CHECK(timer.seconds() < 600.0);
}

TEST_CASE("criterion 6: feedback benefit") {
  Timer timer;
  RunConfig fb;
  fb.params = desk_params(0.01);  // n*A = 24
  fb.scheme = Scheme::feedback_one_switch;
  fb.trials = 1000000;
  fb.seed = 660001;
  RunStats sf = run_trials(fb);

  RunConfig bl = fb;
  bl.scheme = Scheme::baseline_no_feedback;
  bl.seed = 660002;
  RunStats sb = run_trials(bl);

  bool disjoint = sf.ci_high < sb.ci_low;
  bool ok = disjoint && sf.p_hat < sb.p_hat;
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "one-switch p_hat %.4g CI [%.4g, %.4g] vs baseline %.4g "
                "CI [%.4g, %.4g]",
                sf.p_hat, sf.ci_low, sf.ci_high, sb.p_hat, sb.ci_low,
                sb.ci_high);
  report(6, "feedback benefit", ok, buf, timer.seconds());
  CHECK(ok);
  CHECK(timer.seconds() < 1800.0);
}

TEST_CASE("criterion 7: degenerate reductions") {
  Timer timer;
  ChannelParams p = desk_params(0.0);
  Codebook phase1 = build_orthogonal(p.M, p.n1(), p.A1());
  const std::uint64_t trials = 10000;
  long rank_mismatch = 0, decode_mismatch = 0, soft_weights = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    TrialStreams ts(770077, trial);
    int msg = static_cast<int>(ts.message.uniform_below(p.M));
    std::vector<double> y1 = forward(phase1.codewords[msg], ts.forward);
    std::vector<double> z = feedback(y1, p.sigma, ts.feedback);
    if (rank(phase1, y1).order != rank(phase1, z).order) ++rank_mismatch;
    GroupSelection sel =
        select_group(rank(phase1, z), p.A1(), p.tau2, p.tau3);
    PhaseTwoCode phase2 = build_phase2(sel.members, p.M, p.n1(), p.A2());
    std::vector<double> y2 = forward(phase2.codeword(msg), ts.forward);
    NoiseStream ns(7007, trial, NoiseStream::kDecoder);
    if (decode(y1, y2, p, ns) != decode_exact(y1, y2, p)) ++decode_mismatch;
    if (trial % 100 == 0) {
      NoiseStream gw(7008, trial, NoiseStream::kDecoder);
      PosteriorReport rep = group_weights(y1, 1, p, gw);
      for (double v : rep.pk)
        if (v != 0.0 && v != 1.0) ++soft_weights;
    }
  }
  bool ok = rank_mismatch == 0 && decode_mismatch == 0 && soft_weights == 0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "%llu trials: %ld ranking mismatches, %ld decode "
                "mismatches, %ld non-degenerate weights",
                static_cast<unsigned long long>(trials), rank_mismatch,
                decode_mismatch, soft_weights);
  report(7, "degenerate reductions", ok, buf, timer.seconds());
  CHECK(ok);
}

TEST_CASE("criterion 8: invariant suites") {
  Timer timer;
  bool ok = true;
  std::string detail;

  // selection-rule partition and monotonicity
  {
    std::mt19937_64 gen(88001);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    int bad = 0;
    for (int rep = 0; rep < 5000; ++rep) {
      int m = 4 + static_cast<int>(gen() % 4);
      std::vector<double> d(m);
      for (auto& v : d) v = u(gen);
      std::sort(d.begin(), d.end());
      double A1 = 0.5 + u(gen), t2 = u(gen) / 10.0, t3 = u(gen) / 10.0;
      bool rule1 = d[2] - d[1] >= 2 * A1 * t2;
      bool rule2 = !rule1 && d[3] - d[2] >= 2 * A1 * t3;
      int k = selection_size(d.data(), m, A1, t2, t3);
      if (k != (rule1 ? 2 : rule2 ? 3 : 4)) ++bad;
      if (selection_size(d.data(), m, A1, t2 * 2 + 0.01, t3) < k) ++bad;
      if (!rule1 &&
          selection_size(d.data(), m, A1, t2, t3 * 2 + 0.01) < k)
        ++bad;
    }
    if (bad > 0) ok = false;
    detail += "selection rules " + std::string(bad ? "FAIL" : "ok");
  }

  // group weights sum to one with the empty class at index 1
  {
    ChannelParams p = desk_params(0.25);
    Codebook phase1 = build_orthogonal(p.M, p.n1(), p.A1());
    MixtureConfig cfg;
    cfg.num_samples = 512;
    int bad = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      TrialStreams ts(88002, trial);
      int msg = static_cast<int>(ts.message.uniform_below(p.M));
      std::vector<double> y1 = forward(phase1.codewords[msg], ts.forward);
      NoiseStream ns(88003, trial, NoiseStream::kDecoder);
      PosteriorReport rep = group_weights(y1, 2, p, ns, cfg);
      double sum = 0.0;
      for (double v : rep.pk) sum += v;
      if (std::fabs(sum - 1.0) > 1e-9 || rep.pk[1] != 0.0) ++bad;
    }
    if (bad > 0) ok = false;
    detail += ", weight partition " + std::string(bad ? "FAIL" : "ok");
  }

  // tail bound dominance on the dense grid
  {
    int bad = 0;
    for (int i = 0; i <= 1000; ++i) {
      double z = -5.0 + 0.01 * i;
      if (tail_bound(z) < tail_oracle(z) - 1e-12) ++bad;
    }
    if (bad > 0) ok = false;
    detail += ", tail dominance " + std::string(bad ? "FAIL" : "ok");
  }

  // energy audit on live transcripts
  {
    ChannelParams p = desk_params(0.25);
    MixtureConfig cfg;
    cfg.num_samples = 128;
    int bad = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
      TrialStreams ts(88004, trial);
      int msg = static_cast<int>(ts.message.uniform_below(p.M));
      Transcript t = run_session(
          msg, p, ts,
          [&](const std::vector<double>& y1, const std::vector<double>& y2,
              NoiseStream& ns) { return decode(y1, y2, p, ns, cfg); });
      double e = squared_norm(t.x);
      if (e > p.total_energy() + 1e-6 ||
          std::fabs(e - p.total_energy()) > 1e-9 * p.total_energy())
        ++bad;
    }
    if (bad > 0) ok = false;
    detail += ", energy audit " + std::string(bad ? "FAIL" : "ok");
  }

  report(8, "invariant suites", ok, detail, timer.seconds());
  CHECK(ok);
  CHECK(timer.seconds() < 60.0);
}
