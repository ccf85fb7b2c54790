#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "awgnfb/channel.hpp"
#include "awgnfb/decoder.hpp"

namespace awgnfb {

enum class Scheme { feedback_one_switch, baseline_no_feedback, naive_feedback };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct RunConfig {
  ChannelParams params;
  Scheme scheme = Scheme::feedback_one_switch;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  MixtureConfig decoder;
  std::string output;  // CSV destination; empty = in-memory only
  int threads = 0;     // worker count, 0 = hardware concurrency
};

struct RunStats {
  RunConfig config;
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;   // 95% Clopper-Pearson
  double ci_high = 0.0;
  double exponent_hat = 0.0;  // -ln(p_hat)/n; +inf when errors == 0
  double k2_freq = 0.0, k3_freq = 0.0, k4_freq = 0.0;
  double coord_fail_freq = 0.0;  // true message outside the selected group
  std::vector<std::uint64_t> per_message_trials;
  std::vector<std::uint64_t> per_message_errors;
  double wall_seconds = 0.0;  // not persisted; excluded from determinism
};

// Test seam: how per-trial noise bundles are created.
using StreamFactory =
    std::function<TrialStreams(std::uint64_t seed, std::uint64_t trial)>;

// `trials` independent sessions with per-trial streams, uniformly random
// true messages, aggregated across a worker pool. Deterministic given the
// config (thread count does not affect any persisted field).
RunStats run_trials(const RunConfig& config);
RunStats run_trials(const RunConfig& config, const StreamFactory& factory);

// --- persistence ---

// Stable column order.
std::string csv_header();
std::string csv_row(const RunStats& s);
void write_csv(const std::string& path, const std::vector<RunStats>& rows);
std::vector<RunStats> read_csv(const std::string& path);

// Flat JSON with keys mirroring the config fields (scheme, n, M, A,
// sigma2, beta, tau2, tau3, seed, trials, decoder.samples,
// decoder.oracle_points, output, threads).
RunConfig parse_config_json(const std::string& text);
std::string config_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

// Grid file: {"base": {flat config}, "grid": {key: [values...]}};
// cells are the cartesian product in sorted key order.
std::vector<RunConfig> parse_grid_json(const std::string& text);
std::vector<RunConfig> load_grid(const std::string& path);

struct SweepOutcome {
  std::vector<RunStats> cells;
  std::vector<std::string> cell_errors;  // "" for clean cells
};

// Runs every cell (failures recorded, not fatal), writes one CSV row per
// clean cell plus a JSON manifest of the executed configs.
SweepOutcome sweep(const std::vector<RunConfig>& grid,
                   const std::string& csv_path,
                   const std::string& manifest_path);

void write_manifest(const std::string& path,
                    const std::vector<RunConfig>& grid,
                    const std::vector<std::string>& cell_errors,
                    const std::string& csv_path);
struct Manifest {
  std::vector<RunConfig> grid;
  std::vector<std::string> cell_errors;
  std::string csv_path;
};
Manifest read_manifest(const std::string& path);

// --- analysis ---

struct CompareReport {
  double p_value = 1.0;  // pooled two-proportion z-test
  bool ci_overlap = true;
  int better = -1;  // 0 (first arm) / 1 (second) when significant, else -1
  std::string verdict;
};

// Requires both arms to share (n, A, M).
CompareReport compare_arms(const RunStats& a, const RunStats& b);

struct FitCell {
  double n = 0.0;
  double p_hat = 0.0;
  std::uint64_t trials = 1;
};

struct SlopeFit {
  double slope = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // delta-method 95%
  std::vector<int> excluded;           // p_hat == 0 cells, flagged
  int dof = 0;
};

// Least-squares slope of -ln(p_hat) against n.
SlopeFit exponent_fit(const std::vector<FitCell>& cells);

}  // namespace awgnfb
