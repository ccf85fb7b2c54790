#include "awgnfb/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "awgnfb/protocol.hpp"
#include "awgnfb/stats.hpp"

namespace awgnfb {

int argmax_smallest_index(const std::vector<double>& v) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(v.size()); ++j)
    if (v[j] > v[best]) best = j;
  return best;
}

namespace {

constexpr double kPruneTol = 1e-18;  // per-region probability cutoff

// One realized transmitter choice: ordered top-k messages.
struct SelectionOutcome {
  std::array<int, 4> members{};
  int k = 0;

  int position(int j) const {
    for (int p = 0; p < k; ++p)
      if (members[p] == j) return p;
    return -1;
  }
  int rest_rank(int j) const {
    int below = 0;
    for (int p = 0; p < k; ++p)
      if (members[p] < j) ++below;
    return j - below;
  }
  bool same(const SelectionOutcome& o) const {
    if (k != o.k) return false;
    for (int p = 0; p < k; ++p)
      if (members[p] != o.members[p]) return false;
    return true;
  }
};

struct Ctx {
  const ChannelParams& p;
  Codebook phase1;
  std::array<Codebook, 5> simplex;  // entries 2..4 populated (capped at M)
  double A1, A2, sqrtA2;
  int M, n1;

  explicit Ctx(const ChannelParams& params) : p(params) {
    params.validate();
    M = params.M;
    n1 = params.n1();
    A1 = params.A1();
    A2 = params.A2();
    sqrtA2 = std::sqrt(A2);
    phase1 = build_orthogonal(M, n1, A1);
    for (int k = 2; k <= 4 && k <= M; ++k) simplex[k] = build_simplex(k, A2);
  }

  // (y'', x''_j) under the given selection outcome.
  double phase2_inner(const SelectionOutcome& o,
                      const std::vector<double>& y2, int j) const {
    int pos = o.position(j);
    if (pos >= 0) {
      const auto& w = simplex[o.k].codewords[pos];
      double s = 0.0;
      for (std::size_t t = 0; t < w.size(); ++t) s += w[t] * y2[t];
      return s;
    }
    return sqrtA2 * y2[3 + o.rest_rank(j)];
  }

  // Transmitter selection applied to an observation, allocation-free.
  void select_from_obs(const std::vector<double>& obs, SelectionOutcome& out,
                       std::vector<double>& dist, std::vector<int>& idx,
                       std::vector<double>& sorted) const {
    dist.resize(M);
    idx.resize(M);
    sorted.resize(M);
    for (int j = 0; j < M; ++j) {
      dist[j] = squared_distance(obs, phase1.codewords[j]);
      idx[j] = j;
    }
    // insertion sort by (distance, index); identical order to rank()
    for (int i = 1; i < M; ++i) {
      int ji = idx[i];
      double di = dist[ji];
      int t = i - 1;
      while (t >= 0 && (dist[idx[t]] > di ||
                        (dist[idx[t]] == di && idx[t] > ji))) {
        idx[t + 1] = idx[t];
        --t;
      }
      idx[t + 1] = ji;
    }
    for (int r = 0; r < M; ++r) sorted[r] = dist[idx[r]];
    out.k = selection_size(sorted.data(), M, A1, p.tau2, p.tau3);
    for (int r = 0; r < out.k; ++r) out.members[r] = idx[r];
  }
};

void check_blocks(const Ctx& ctx, const std::vector<double>& y1,
                  const std::vector<double>& y2) {
  if (static_cast<int>(y1.size()) != ctx.n1 ||
      static_cast<int>(y2.size()) != ctx.n1)
    throw std::invalid_argument("decode: block length mismatch");
}

struct OutcomeTally {
  SelectionOutcome o;
  long count = 0;
};

// Draw z'|y' num_samples times and tally the distinct selection outcomes.
// sigma == 0 degenerates to a single deterministic outcome.
void tally_selections(const Ctx& ctx, const std::vector<double>& y1,
                      NoiseStream& sampler, int num_samples,
                      std::vector<OutcomeTally>& tallies) {
  tallies.clear();
  const double sigma = ctx.p.sigma;
  const int draws = (sigma == 0.0) ? 1 : num_samples;
  std::vector<double> z(ctx.n1), dist, sorted;
  std::vector<int> idx;
  SelectionOutcome o;
  for (int s = 0; s < draws; ++s) {
    if (sigma == 0.0) {
      z = y1;
    } else {
      for (int t = 0; t < ctx.n1; ++t)
        z[t] = y1[t] + sigma * sampler.gaussian();
    }
    ctx.select_from_obs(z, o, dist, idx, sorted);
    bool found = false;
    for (auto& t : tallies) {
      if (t.o.same(o)) {
        ++t.count;
        found = true;
        break;
      }
    }
    if (!found) tallies.push_back({o, 1});
  }
}

int classify_pair(const SelectionOutcome& o, int a, int b) {
  return (o.position(a) >= 0 && o.position(b) >= 0) ? o.k : 0;
}

void check_cfg(const MixtureConfig& cfg) {
  if (cfg.num_samples < 1)
    throw std::invalid_argument("decoder: num_samples must be >= 1");
  if (!cfg.log_domain)
    throw std::invalid_argument("decoder: statistics require the log domain");
}

// Shared sigma = 0 path: the selection is a deterministic function of y'.
PosteriorReport degenerate_report(const Ctx& ctx,
                                  const std::vector<double>& y1,
                                  const std::vector<double>& y2,
                                  int pair_index) {
  SelectionOutcome o;
  std::vector<double> dist, sorted;
  std::vector<int> idx;
  ctx.select_from_obs(y1, o, dist, idx, sorted);
  PosteriorReport rep;
  rep.log_posterior.resize(ctx.M);
  for (int j = 0; j < ctx.M; ++j)
    rep.log_posterior[j] = inner(ctx.phase1.codewords[j], y1) +
                           ctx.phase2_inner(o, y2, j) - 0.5 * ctx.A2;
  if (pair_index >= 0) {
    rep.pair_index = pair_index;
    rep.pk[classify_pair(o, 0, pair_index)] = 1.0;
  }
  return rep;
}

}  // namespace

double mixture_log_likelihood(const std::vector<double>& y_prime,
                              const std::vector<double>& y_double_prime,
                              int j, const ChannelParams& params,
                              NoiseStream& sampler, const MixtureConfig& cfg) {
  check_cfg(cfg);
  Ctx ctx(params);
  check_blocks(ctx, y_prime, y_double_prime);
  if (j < 0 || j >= ctx.M)
    throw std::invalid_argument("mixture_log_likelihood: bad message index");
  std::vector<OutcomeTally> tallies;
  tally_selections(ctx, y_prime, sampler, cfg.num_samples, tallies);
  long total = 0;
  LogSumExp lse;
  for (const auto& t : tallies) {
    total += t.count;
    lse.add(std::log(static_cast<double>(t.count)) +
            ctx.phase2_inner(t.o, y_double_prime, j) - 0.5 * ctx.A2);
  }
  return lse.value() - std::log(static_cast<double>(total));
}

PosteriorReport group_weights(const std::vector<double>& y_prime, int i,
                              const ChannelParams& params,
                              NoiseStream& sampler, const MixtureConfig& cfg) {
  check_cfg(cfg);
  Ctx ctx(params);
  if (static_cast<int>(y_prime.size()) != ctx.n1)
    throw std::invalid_argument("group_weights: block length mismatch");
  if (i <= 0 || i >= ctx.M)
    throw std::invalid_argument("group_weights: pair index must be in [1, M)");
  std::vector<OutcomeTally> tallies;
  tally_selections(ctx, y_prime, sampler, cfg.num_samples, tallies);
  long total = 0;
  for (const auto& t : tallies) total += t.count;
  PosteriorReport rep;
  rep.pair_index = i;
  for (const auto& t : tallies)
    rep.pk[classify_pair(t.o, 0, i)] +=
        static_cast<double>(t.count) / static_cast<double>(total);
  return rep;
}

PosteriorReport decode_report(const std::vector<double>& y_prime,
                              const std::vector<double>& y_double_prime,
                              const ChannelParams& params,
                              NoiseStream& sampler, const MixtureConfig& cfg,
                              int pair_index) {
  check_cfg(cfg);
  Ctx ctx(params);
  check_blocks(ctx, y_prime, y_double_prime);
  if (params.sigma == 0.0)
    return degenerate_report(ctx, y_prime, y_double_prime, pair_index);

  std::vector<OutcomeTally> tallies;
  tally_selections(ctx, y_prime, sampler, cfg.num_samples, tallies);
  long total = 0;
  for (const auto& t : tallies) total += t.count;
  const double log_total = std::log(static_cast<double>(total));

  PosteriorReport rep;
  rep.log_posterior.resize(ctx.M);
  for (int j = 0; j < ctx.M; ++j) {
    LogSumExp lse;
    for (const auto& t : tallies)
      lse.add(std::log(static_cast<double>(t.count)) +
              ctx.phase2_inner(t.o, y_double_prime, j) - 0.5 * ctx.A2);
    rep.log_posterior[j] =
        inner(ctx.phase1.codewords[j], y_prime) + lse.value() - log_total;
  }
  if (pair_index >= 0) {
    rep.pair_index = pair_index;
    for (const auto& t : tallies)
      rep.pk[classify_pair(t.o, 0, pair_index)] +=
          static_cast<double>(t.count) / static_cast<double>(total);
  }
  return rep;
}

int decode(const std::vector<double>& y_prime,
           const std::vector<double>& y_double_prime,
           const ChannelParams& params, NoiseStream& sampler,
           const MixtureConfig& cfg) {
  return argmax_smallest_index(
      decode_report(y_prime, y_double_prime, params, sampler, cfg)
          .log_posterior);
}

namespace {

// ---- deterministic oracle over the selection regions ----
//
// Conditionally on y', the projections u_j = (x'_j, z') are independent
// N(c_j, s^2) with c_j = (x'_j, y') and s = sigma*sqrt(A1); the selection
// outcome is a function of u alone. Every region is an (ordered tuple,
// group size) event whose probability factors into a chain of adjacent
// order/gap constraints, integrated by nested Gauss-Legendre with the
// top-rank constraint folded in analytically as a Gaussian tail.

struct Region {
  double prob = 0.0;
  SelectionOutcome o;
};

struct OracleGrid {
  std::vector<double> c;  // projection means
  double s = 0.0;         // projection std
  double T2 = 0.0;        // A1 * tau2
  double T3 = 0.0;        // A1 * tau3
  QuadratureRule gh;      // probabilists' Gauss-Hermite (full-line levels)
  QuadratureRule gl;      // Gauss-Legendre on [-1, 1] (gap-window levels)
};

double order_prob_bound(const OracleGrid& g, int hi, int lo, double gap) {
  // P(u_hi >= u_lo + gap), u independent gaussians
  return normal_cdf((g.c[hi] - g.c[lo] - gap) / (g.s * 1.4142135623730951));
}

// integral of f over the window [lo, lo + width] by the mapped rule
template <typename F>
double window_integrate(const QuadratureRule& gl, double lo, double width,
                        F f) {
  double mid = lo + 0.5 * width;
  double half = 0.5 * width;
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    acc += gl.weights[i] * f(mid + half * gl.nodes[i]);
  return acc * half;
}

// full-line integral of phi((w - mean)/s)/s * f(w) by Gauss-Hermite
template <typename F>
double line_integrate(const QuadratureRule& gh, double mean, double s, F f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i)
    acc += gh.weights[i] * f(mean + s * gh.nodes[i]);
  return acc;
}

void enumerate_regions(const Ctx& ctx, const OracleGrid& g,
                       std::vector<Region>& regions) {
  regions.clear();
  const int M = ctx.M;
  const double s = g.s;
  const auto& c = g.c;
  auto pdf = [s](double x, double mean) {
    return normal_pdf((x - mean) / s) / s;
  };
  auto tail = [s](double x, double mean) {
    return gaussian_tail((x - mean) / s);
  };
  auto cdf = [s](double x, double mean) {
    return normal_cdf((x - mean) / s);
  };

  // group size 2: ordered pair (a, b); every other message at least T2
  // below u_b (for M == 2 the pair is unconditional)
  for (int a = 0; a < M; ++a) {
    for (int b = 0; b < M; ++b) {
      if (b == a) continue;
      double bound = order_prob_bound(g, a, b, 0.0);
      for (int e = 0; e < M && bound >= kPruneTol; ++e)
        if (e != a && e != b)
          bound = std::min(bound, order_prob_bound(g, b, e, g.T2));
      if (bound < kPruneTol) continue;
      double prob = line_integrate(g.gh, c[b], s, [&](double wb) {
        double f = tail(wb, c[a]);
        for (int e = 0; e < M && f > 0.0; ++e)
          if (e != a && e != b) f *= cdf(wb - g.T2, c[e]);
        return f;
      });
      Region r;
      r.prob = prob;
      r.o.k = 2;
      r.o.members = {a, b, 0, 0};
      regions.push_back(r);
    }
  }
  if (M < 3) return;

  // group size 3: ordered triple (a, b, c2); gap2 < T2; for M >= 4 every
  // other message at least T3 below u_c
  for (int a = 0; a < M; ++a) {
    for (int b = 0; b < M; ++b) {
      if (b == a) continue;
      for (int c2 = 0; c2 < M; ++c2) {
        if (c2 == a || c2 == b) continue;
        double bound = std::min(order_prob_bound(g, a, b, 0.0),
                                order_prob_bound(g, b, c2, 0.0));
        for (int e = 0; e < M && bound >= kPruneTol; ++e)
          if (e != a && e != b && e != c2)
            bound = std::min(bound, order_prob_bound(g, c2, e, g.T3));
        if (bound < kPruneTol) continue;
        double prob = line_integrate(g.gh, c[c2], s, [&](double wc) {
          double f = 1.0;
          for (int e = 0; e < M && f > 0.0; ++e)
            if (e != a && e != b && e != c2) f *= cdf(wc - g.T3, c[e]);
          if (f == 0.0) return 0.0;
          double in = window_integrate(g.gl, wc, g.T2, [&](double wb) {
            return pdf(wb, c[b]) * tail(wb, c[a]);
          });
          return f * in;
        });
        Region r;
        r.prob = prob;
        r.o.k = 3;
        r.o.members = {a, b, c2, 0};
        regions.push_back(r);
      }
    }
  }
  if (M < 4) return;

  // group size 4: ordered tuple (a, b, c2, d); gap2 < T2, gap3 < T3,
  // every other message below u_d
  for (int a = 0; a < M; ++a) {
    for (int b = 0; b < M; ++b) {
      if (b == a) continue;
      for (int c2 = 0; c2 < M; ++c2) {
        if (c2 == a || c2 == b) continue;
        for (int d = 0; d < M; ++d) {
          if (d == a || d == b || d == c2) continue;
          double bound = std::min({order_prob_bound(g, a, b, 0.0),
                                   order_prob_bound(g, b, c2, 0.0),
                                   order_prob_bound(g, c2, d, 0.0)});
          for (int e = 0; e < M && bound >= kPruneTol; ++e)
            if (e != a && e != b && e != c2 && e != d)
              bound = std::min(bound, order_prob_bound(g, d, e, 0.0));
          if (bound < kPruneTol) continue;
          double prob = line_integrate(g.gh, c[d], s, [&](double wd) {
            double f = 1.0;
            for (int e = 0; e < M && f > 0.0; ++e)
              if (e != a && e != b && e != c2 && e != d)
                f *= cdf(wd, c[e]);
            if (f == 0.0) return 0.0;
            double mid = window_integrate(g.gl, wd, g.T3, [&](double wc) {
              double in = window_integrate(g.gl, wc, g.T2, [&](double wb) {
                return pdf(wb, c[b]) * tail(wb, c[a]);
              });
              return pdf(wc, c[c2]) * in;
            });
            return f * mid;
          });
          Region r;
          r.prob = prob;
          r.o.k = 4;
          r.o.members = {a, b, c2, d};
          regions.push_back(r);
        }
      }
    }
  }
}

PosteriorReport report_from_regions(const Ctx& ctx,
                                    const std::vector<double>& y1,
                                    const std::vector<double>& y2,
                                    const std::vector<Region>& regions,
                                    int pair_index) {
  double mass = 0.0;
  for (const auto& r : regions) mass += r.prob;
  const double log_mass = std::log(mass);
  PosteriorReport rep;
  rep.total_mass = mass;
  rep.log_posterior.resize(ctx.M);
  for (int j = 0; j < ctx.M; ++j) {
    LogSumExp lse;
    for (const auto& r : regions) {
      if (r.prob <= 0.0) continue;
      lse.add(std::log(r.prob) + ctx.phase2_inner(r.o, y2, j) - 0.5 * ctx.A2);
    }
    rep.log_posterior[j] =
        inner(ctx.phase1.codewords[j], y1) + lse.value() - log_mass;
  }
  if (pair_index >= 0) {
    rep.pair_index = pair_index;
    for (const auto& r : regions)
      rep.pk[classify_pair(r.o, 0, pair_index)] += r.prob / mass;
  }
  return rep;
}

}  // namespace

PosteriorReport decode_exact_report(const std::vector<double>& y_prime,
                                    const std::vector<double>& y_double_prime,
                                    const ChannelParams& params,
                                    const MixtureConfig& cfg, int pair_index) {
  check_cfg(cfg);
  if (cfg.oracle_quadrature_points < 2)
    throw std::invalid_argument("decode_exact: need >= 2 quadrature points");
  Ctx ctx(params);
  check_blocks(ctx, y_prime, y_double_prime);
  if (ctx.M > 6)
    throw std::invalid_argument("decode_exact: M > 6 is intractable");
  if (params.sigma == 0.0)
    return degenerate_report(ctx, y_prime, y_double_prime, pair_index);

  OracleGrid g;
  g.c.resize(ctx.M);
  for (int j = 0; j < ctx.M; ++j)
    g.c[j] = inner(ctx.phase1.codewords[j], y_prime);
  g.s = params.sigma * std::sqrt(ctx.A1);
  g.T2 = ctx.A1 * params.tau2;
  g.T3 = ctx.A1 * params.tau3;
  g.gh = gauss_hermite_prob(cfg.oracle_quadrature_points);
  g.gl = gauss_legendre(cfg.oracle_quadrature_points);

  std::vector<Region> regions;
  enumerate_regions(ctx, g, regions);
  return report_from_regions(ctx, y_prime, y_double_prime, regions,
                             pair_index);
}

int decode_exact(const std::vector<double>& y_prime,
                 const std::vector<double>& y_double_prime,
                 const ChannelParams& params, const MixtureConfig& cfg) {
  return argmax_smallest_index(
      decode_exact_report(y_prime, y_double_prime, params, cfg)
          .log_posterior);
}

PosteriorReport decode_exact_tensor_report(
    const std::vector<double>& y_prime,
    const std::vector<double>& y_double_prime, const ChannelParams& params,
    int points_per_axis) {
  Ctx ctx(params);
  check_blocks(ctx, y_prime, y_double_prime);
  if (ctx.M > 6)
    throw std::invalid_argument("decode_exact_tensor: M > 6 is intractable");
  if (params.sigma == 0.0)
    return degenerate_report(ctx, y_prime, y_double_prime, -1);

  const int M = ctx.M;
  std::vector<double> c(M);
  for (int j = 0; j < M; ++j)
    c[j] = inner(ctx.phase1.codewords[j], y_prime);
  const double s = params.sigma * std::sqrt(ctx.A1);
  QuadratureRule rule = gauss_hermite_prob(points_per_axis);

  std::vector<int> digit(M, 0);
  std::vector<double> dist(M), sorted(M);
  std::vector<int> idx(M);
  std::vector<LogSumExp> acc(M);
  SelectionOutcome o;
  double mass = 0.0;
  for (;;) {
    double w = 1.0;
    for (int j = 0; j < M; ++j) w *= rule.weights[digit[j]];
    // pseudo-distances: order-equivalent to the squared distances
    for (int j = 0; j < M; ++j) {
      dist[j] = -2.0 * (c[j] + s * rule.nodes[digit[j]]);
      idx[j] = j;
    }
    std::sort(idx.begin(), idx.end(), [&](int x, int y) {
      if (dist[x] != dist[y]) return dist[x] < dist[y];
      return x < y;
    });
    for (int r = 0; r < M; ++r) sorted[r] = dist[idx[r]];
    o.k = selection_size(sorted.data(), M, ctx.A1, params.tau2, params.tau3);
    for (int r = 0; r < o.k; ++r) o.members[r] = idx[r];

    mass += w;
    for (int j = 0; j < M; ++j)
      acc[j].add_weighted(
          w, ctx.phase2_inner(o, y_double_prime, j) - 0.5 * ctx.A2);

    int pos = 0;
    while (pos < M && ++digit[pos] == points_per_axis) digit[pos++] = 0;
    if (pos == M) break;
  }

  PosteriorReport rep;
  rep.total_mass = mass;
  rep.log_posterior.resize(M);
  for (int j = 0; j < M; ++j)
    rep.log_posterior[j] =
        inner(ctx.phase1.codewords[j], y_prime) + acc[j].value() -
        std::log(mass);
  return rep;
}

int decode_naive(const std::vector<double>& y_prime,
                 const std::vector<double>& y_double_prime,
                 const ChannelParams& params) {
  Ctx ctx(params);
  check_blocks(ctx, y_prime, y_double_prime);
  Ranking rx = rank(ctx.phase1, y_prime);
  GroupSelection sel = select_group(rx, ctx.A1, params.tau2, params.tau3);
  PhaseTwoCode phase2 = build_phase2(sel.members, ctx.M, ctx.n1, ctx.A2);
  std::vector<double> score(ctx.M);
  for (int j = 0; j < ctx.M; ++j) {
    std::vector<double> w = phase2.codeword(j);
    score[j] = -squared_distance(y_prime, ctx.phase1.codewords[j]) -
               squared_distance(y_double_prime, w);
  }
  return argmax_smallest_index(score);
}

}  // namespace awgnfb
