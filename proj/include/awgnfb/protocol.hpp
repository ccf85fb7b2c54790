#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "awgnfb/channel.hpp"
#include "awgnfb/codebook.hpp"

namespace awgnfb {

// Messages sorted by squared distance from an observation; ties broken by
// ascending message index. order[r] is the message at rank r (0-based),
// distances[r] the matching sorted distance.
struct Ranking {
  std::vector<int> order;
  std::vector<double> distances;
};

Ranking rank(const Codebook& cb, const std::vector<double>& obs);

// In-place variant reusing the caller's buffers (hot decode loops).
void rank_into(const Codebook& cb, const std::vector<double>& obs,
               Ranking& out);

// The transmitter's chosen group: the k top-ranked messages, k in {2,3,4}
// (capped at M below four messages).
struct GroupSelection {
  int k = 0;
  std::vector<int> members;  // ranking order

  bool contains(int j) const {
    for (int m : members)
      if (m == j) return true;
    return false;
  }
};

// Threshold rules on the sorted distance gaps:
//   k=2  iff d(3) - d(2) >= 2*A1*tau2,
//   else k=3 iff d(4) - d(3) >= 2*A1*tau3,
//   else k=4.
// Rules referencing ranks beyond M are skipped and k is capped at M.
GroupSelection select_group(const Ranking& ranking, double A1, double tau2,
                            double tau3);

// Rule core shared by the transmitter and the decoder's model of it:
// group size from the sorted distances alone.
int selection_size(const double* sorted_distances, int m, double A1,
                   double tau2, double tau3);

// Everything one session produced.
struct Transcript {
  int true_message = 0;
  std::vector<double> x;        // transmitted block, length n
  std::vector<double> y_prime;  // receiver, phase I (full block for baseline)
  std::vector<double> z_prime;  // transmitter's noisy view of y_prime
  std::vector<double> y_double_prime;  // receiver, phase II
  std::optional<GroupSelection> selection;
  int decision = -1;
  bool correct = false;
};

// Receiver-side decision rule on (y', y''). The stream is the decoder's
// private sampling randomness.
using DecoderFn = std::function<int(const std::vector<double>& y_prime,
                                    const std::vector<double>& y_double_prime,
                                    NoiseStream& decoder_noise)>;

// One full two-phase session: phase-I orthogonal transmission at energy
// A1, feedback observation z', threshold group selection, composite
// phase-II transmission at energy A2, then decoding.
Transcript run_session(int true_message, const ChannelParams& params,
                       TrialStreams& streams, const DecoderFn& decoder);

// Single-phase comparison arm: orthogonal code with full energy n*A over
// the whole block and minimum-distance decoding. Requires M <= n.
Transcript run_baseline(int true_message, const ChannelParams& params,
                        TrialStreams& streams);

}  // namespace awgnfb
