#pragma once

#include <array>
#include <vector>

#include "awgnfb/channel.hpp"
#include "awgnfb/codebook.hpp"

namespace awgnfb {

struct MixtureConfig {
  int num_samples = 4096;  // z'-samples per decode
  bool log_domain = true;  // statistics are always carried in log domain
  int oracle_quadrature_points = 32;  // nodes per nested quadrature level
};

// Per-message posterior statistics and the group-class weights
// p_k = P(pair distance class = k | y') for a designated message pair
// (0, pair_index). Class 1 is empty by construction, so pk[1] == 0.
struct PosteriorReport {
  std::vector<double> log_posterior;  // log p(y''|y',th_j) + log p(y'|th_j),
                                      // common additive constants dropped
  std::array<double, 5> pk{};
  int pair_index = -1;
  double total_mass = 1.0;  // oracle diagnostic: integrated region mass
};

int argmax_smallest_index(const std::vector<double>& v);

// log E_{z'|y'} exp((y'', x''_j(z')) - A2/2), the phase-II mixture
// likelihood of message j. The expectation is over z' = y' + sigma*eta
// with fresh eta; estimated by num_samples draws (log-sum-exp), exact at
// sigma = 0.
double mixture_log_likelihood(const std::vector<double>& y_prime,
                              const std::vector<double>& y_double_prime,
                              int j, const ChannelParams& params,
                              NoiseStream& sampler,
                              const MixtureConfig& cfg = {});

// Sample-frequency estimates of the group-class weights for the pair
// (0, i): each z'-draw is pushed through the transmitter's selection rule
// and classified by the realized pair distance (delta_k vs delta_0).
PosteriorReport group_weights(const std::vector<double>& y_prime, int i,
                              const ChannelParams& params,
                              NoiseStream& sampler,
                              const MixtureConfig& cfg = {});

// Full posterior decoding: argmax_j [(x'_j, y') + mixture likelihood],
// ties to the smallest index. All hypotheses share the same z'-samples
// within one call. pair_index >= 0 additionally fills pk from the same
// sample sweep.
PosteriorReport decode_report(const std::vector<double>& y_prime,
                              const std::vector<double>& y_double_prime,
                              const ChannelParams& params,
                              NoiseStream& sampler,
                              const MixtureConfig& cfg = {},
                              int pair_index = -1);
int decode(const std::vector<double>& y_prime,
           const std::vector<double>& y_double_prime,
           const ChannelParams& params, NoiseStream& sampler,
           const MixtureConfig& cfg = {});

// Deterministic oracle for the same posterior (M <= 6). The selection
// event depends on z' only through the M projections (x'_j, z'), which
// are independent Gaussians given y'; the expectation is computed by
// enumerating every (ordered top group, group size) selection outcome
// and integrating its probability with nested Gauss-Legendre quadrature
// (oracle_quadrature_points nodes per level, analytic innermost tail).
PosteriorReport decode_exact_report(const std::vector<double>& y_prime,
                                    const std::vector<double>& y_double_prime,
                                    const ChannelParams& params,
                                    const MixtureConfig& cfg = {},
                                    int pair_index = -1);
int decode_exact(const std::vector<double>& y_prime,
                 const std::vector<double>& y_double_prime,
                 const ChannelParams& params, const MixtureConfig& cfg = {});

// Reference oracle engine: tensor-product Gauss-Hermite rule over the M
// projections, evaluating the selection rule at every node. Slowly
// convergent (the integrand is piecewise constant); kept as an
// independent cross-check of decode_exact_report.
PosteriorReport decode_exact_tensor_report(
    const std::vector<double>& y_prime,
    const std::vector<double>& y_double_prime, const ChannelParams& params,
    int points_per_axis);

// Comparison arm that pretends the feedback was noiseless: minimum
// distance on the concatenated code built from z' = y'.
int decode_naive(const std::vector<double>& y_prime,
                 const std::vector<double>& y_double_prime,
                 const ChannelParams& params);

}  // namespace awgnfb
