#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace awgnfb {

// Full experiment configuration for the two-phase scheme.
//
// A is the per-symbol power budget (total block energy n*A), sigma the
// feedback-noise standard deviation, beta the phase-II/phase-I energy
// ratio A2/A1, tau2/tau3 the group-selection thresholds and M the number
// of messages. Derived quantities: n1 = n/2, A1 = n*A/(1+beta),
// A2 = beta*A1, so A1 + A2 = n*A.
struct ChannelParams {
  double A = 1.0;
  double sigma = 0.0;
  int n = 16;
  double beta = 0.5;
  double tau2 = 0.15;
  double tau3 = 0.05;
  int M = 4;

  int n1() const { return n / 2; }
  double total_energy() const { return static_cast<double>(n) * A; }
  double A1() const { return total_energy() / (1.0 + beta); }
  double A2() const { return beta * A1(); }
  double sigma2() const { return sigma * sigma; }

  // Throws std::invalid_argument / std::length_error on violated
  // invariants (A <= 0, odd n, sigma < 0, beta <= 0, tau < 0, M < 2,
  // M > n1 - 1).
  void validate() const;
};

// Deterministic per-trial Gaussian source. Identical
// (master_seed, trial_index, substream) triples reproduce identical
// sequences; distinct triples give statistically independent streams.
// Substreams keep forward noise, feedback noise, decoder sampling and
// message draws decoupled within one trial.
class NoiseStream {
 public:
  enum Substream : std::uint64_t {
    kForward = 1,
    kFeedback = 2,
    kDecoder = 3,
    kMessage = 4,
  };

  NoiseStream(std::uint64_t master_seed, std::uint64_t trial_index,
              std::uint64_t substream);

  // Test hook: a stream whose gaussians are all exactly zero.
  static NoiseStream zeros();

  double gaussian();
  void fill_gaussian(std::vector<double>& out, std::size_t count);
  std::uint64_t next_u64();
  double uniform01();  // in [0, 1)
  // Uniform integer in [0, bound), bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t trial_index() const { return trial_index_; }
  bool is_zero_stream() const { return zero_; }

 private:
  NoiseStream() : zero_(true) {}

  std::uint64_t master_seed_ = 0;
  std::uint64_t trial_index_ = 0;
  std::mt19937_64 engine_;
  bool zero_ = false;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// The three noise sources of one transmission session plus the message
// draw; each trial owns its bundle.
struct TrialStreams {
  NoiseStream forward;
  NoiseStream feedback;
  NoiseStream decoder;
  NoiseStream message;

  TrialStreams(std::uint64_t master_seed, std::uint64_t trial_index);
  static TrialStreams zeros();

 private:
  TrialStreams(NoiseStream f, NoiseStream b, NoiseStream d, NoiseStream m);
};

// y = x + xi, xi i.i.d. N(0,1). Rejects non-finite input.
std::vector<double> forward(const std::vector<double>& x, NoiseStream& noise);

// z = y + sigma * eta, eta i.i.d. N(0,1) independent of the forward
// draws. sigma < 0 is a domain error; sigma == 0 returns y unchanged.
std::vector<double> feedback(const std::vector<double>& y, double sigma,
                             NoiseStream& noise);

}  // namespace awgnfb
