#include "awgnfb/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace awgnfb {

void ChannelParams::validate() const {
  if (!(A > 0.0)) throw std::invalid_argument("params: A must be > 0");
  if (sigma < 0.0) throw std::invalid_argument("params: sigma must be >= 0");
  if (n < 8 || n % 2 != 0)
    throw std::invalid_argument("params: n must be even and >= 8");
  if (!(beta > 0.0)) throw std::invalid_argument("params: beta must be > 0");
  if (tau2 < 0.0 || tau3 < 0.0)
    throw std::invalid_argument("params: thresholds must be >= 0");
  if (M < 2) throw std::invalid_argument("params: need at least 2 messages");
  // M - 2 orthogonal codewords must fit into the n1 - 3 free phase-II slots.
  if (M > n1() - 1)
    throw std::length_error("params: M exceeds n/2 - 1 codeword capacity");
}

namespace {

// splitmix64 finalizer; used to mix (seed, trial, substream) into one word.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t trial_index,
                         std::uint64_t substream)
    : master_seed_(master_seed), trial_index_(trial_index) {
  std::uint64_t s = mix64(mix64(mix64(master_seed) ^ trial_index) ^ substream);
  engine_.seed(s);
}

NoiseStream NoiseStream::zeros() { return NoiseStream(); }

std::uint64_t NoiseStream::next_u64() { return engine_(); }

double NoiseStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t NoiseStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound == 0");
  // rejection sampling to avoid modulo bias
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

double NoiseStream::gaussian() {
  if (zero_) return 0.0;
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

void NoiseStream::fill_gaussian(std::vector<double>& out, std::size_t count) {
  out.resize(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = gaussian();
}

TrialStreams::TrialStreams(std::uint64_t master_seed,
                           std::uint64_t trial_index)
    : forward(master_seed, trial_index, NoiseStream::kForward),
      feedback(master_seed, trial_index, NoiseStream::kFeedback),
      decoder(master_seed, trial_index, NoiseStream::kDecoder),
      message(master_seed, trial_index, NoiseStream::kMessage) {}

TrialStreams::TrialStreams(NoiseStream f, NoiseStream b, NoiseStream d,
                           NoiseStream m)
    : forward(f), feedback(b), decoder(d), message(m) {}

TrialStreams TrialStreams::zeros() {
  return TrialStreams(NoiseStream::zeros(), NoiseStream::zeros(),
                      NoiseStream::zeros(), NoiseStream::zeros());
}

std::vector<double> forward(const std::vector<double>& x, NoiseStream& noise) {
  for (double v : x)
    if (!std::isfinite(v))
      throw std::invalid_argument("forward: non-finite input sample");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + noise.gaussian();
  return y;
}

std::vector<double> feedback(const std::vector<double>& y, double sigma,
                             NoiseStream& noise) {
  if (sigma < 0.0) throw std::invalid_argument("feedback: sigma < 0");
  if (sigma == 0.0) return y;
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    z[i] = y[i] + sigma * noise.gaussian();
  return z;
}

}  // namespace awgnfb
