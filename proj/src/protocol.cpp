#include "awgnfb/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace awgnfb {

void rank_into(const Codebook& cb, const std::vector<double>& obs,
               Ranking& out) {
  const int m = cb.size();
  if (cb.dim() != static_cast<int>(obs.size()))
    throw std::invalid_argument("rank: observation dimension mismatch");
  out.order.resize(m);
  out.distances.resize(m);
  std::iota(out.order.begin(), out.order.end(), 0);
  for (int i = 0; i < m; ++i)
    out.distances[i] = squared_distance(obs, cb.codewords[i]);
  std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    if (out.distances[a] != out.distances[b])
      return out.distances[a] < out.distances[b];
    return a < b;
  });
  // reorder distances to match
  std::vector<double> sorted(m);
  for (int r = 0; r < m; ++r) sorted[r] = out.distances[out.order[r]];
  out.distances.swap(sorted);
}

Ranking rank(const Codebook& cb, const std::vector<double>& obs) {
  Ranking r;
  rank_into(cb, obs, r);
  return r;
}

int selection_size(const double* sorted_distances, int m, double A1,
                   double tau2, double tau3) {
  if (m < 2) throw std::invalid_argument("selection_size: need >= 2 messages");
  if (m == 2) return 2;
  if (sorted_distances[2] - sorted_distances[1] >= 2.0 * A1 * tau2) return 2;
  if (m == 3) return 3;
  if (sorted_distances[3] - sorted_distances[2] >= 2.0 * A1 * tau3) return 3;
  return 4;
}

GroupSelection select_group(const Ranking& ranking, double A1, double tau2,
                            double tau3) {
  const int m = static_cast<int>(ranking.order.size());
  int k = selection_size(ranking.distances.data(), m, A1, tau2, tau3);
  GroupSelection sel;
  sel.k = k;
  sel.members.assign(ranking.order.begin(), ranking.order.begin() + k);
  return sel;
}

Transcript run_session(int true_message, const ChannelParams& params,
                       TrialStreams& streams, const DecoderFn& decoder) {
  params.validate();
  if (true_message < 0 || true_message >= params.M)
    throw std::invalid_argument("run_session: message index out of range");

  const int n1 = params.n1();
  Codebook phase1 = build_orthogonal(params.M, n1, params.A1());

  Transcript t;
  t.true_message = true_message;

  // phase I
  const std::vector<double>& x1 = phase1.codewords[true_message];
  t.y_prime = forward(x1, streams.forward);
  t.z_prime = feedback(t.y_prime, params.sigma, streams.feedback);

  // transmitter-side selection from its own noisy view
  Ranking tx_rank = rank(phase1, t.z_prime);
  t.selection = select_group(tx_rank, params.A1(), params.tau2, params.tau3);

  // phase II
  PhaseTwoCode phase2 =
      build_phase2(t.selection->members, params.M, n1, params.A2());
  std::vector<double> x2 = phase2.codeword(true_message);
  t.y_double_prime = forward(x2, streams.forward);

  t.x.reserve(params.n);
  t.x.insert(t.x.end(), x1.begin(), x1.end());
  t.x.insert(t.x.end(), x2.begin(), x2.end());

  t.decision = decoder(t.y_prime, t.y_double_prime, streams.decoder);
  t.correct = (t.decision == true_message);
  return t;
}

Transcript run_baseline(int true_message, const ChannelParams& params,
                        TrialStreams& streams) {
  params.validate();
  if (params.M > params.n)
    throw std::length_error("run_baseline: M exceeds block length");
  if (true_message < 0 || true_message >= params.M)
    throw std::invalid_argument("run_baseline: message index out of range");

  Codebook code = build_orthogonal(params.M, params.n, params.total_energy());
  Transcript t;
  t.true_message = true_message;
  t.x = code.codewords[true_message];
  t.y_prime = forward(t.x, streams.forward);

  Ranking rx = rank(code, t.y_prime);
  t.decision = rx.order[0];
  t.correct = (t.decision == true_message);
  return t;
}

}  // namespace awgnfb
