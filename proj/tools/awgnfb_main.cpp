// Command-line front end: Monte Carlo runs, sweeps, analytic exponent
// tables and the analytic-vs-numeric verification report.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "awgnfb/exponents.hpp"
#include "awgnfb/harness.hpp"

namespace {

using namespace awgnfb;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct ConfigFlags {
  std::optional<std::string> scheme;
  std::optional<int> n, M, samples, oracle_points, threads;
  std::optional<double> A, sigma2, beta, tau2, tau3;
  std::optional<std::uint64_t> seed, trials;
  std::optional<std::string> output;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--scheme", scheme,
                    "feedback_one_switch | baseline_no_feedback | "
                    "naive_feedback");
    cmd->add_option("--n", n, "block length (even)");
    cmd->add_option("--M", M, "number of messages");
    cmd->add_option("--A", A, "per-symbol power");
    cmd->add_option("--sigma2", sigma2, "feedback noise variance");
    cmd->add_option("--beta", beta, "phase energy ratio A2/A1");
    cmd->add_option("--tau2", tau2, "pair-selection threshold");
    cmd->add_option("--tau3", tau3, "triple-selection threshold");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--trials", trials, "Monte Carlo trials");
    cmd->add_option("--samples", samples, "decoder z' samples");
    cmd->add_option("--oracle-points", oracle_points,
                    "oracle quadrature points per level");
    cmd->add_option("--threads", threads, "worker threads (0 = auto)");
    cmd->add_option("--output", output, "CSV destination");
  }

  void apply(RunConfig& cfg) const {
    if (scheme) cfg.scheme = scheme_from_string(*scheme);
    if (n) cfg.params.n = *n;
    if (M) cfg.params.M = *M;
    if (A) cfg.params.A = *A;
    if (sigma2) {
      if (*sigma2 < 0) throw std::invalid_argument("sigma2 < 0");
      cfg.params.sigma = std::sqrt(*sigma2);
    }
    if (beta) cfg.params.beta = *beta;
    if (tau2) cfg.params.tau2 = *tau2;
    if (tau3) cfg.params.tau3 = *tau3;
    if (seed) cfg.seed = *seed;
    if (trials) cfg.trials = *trials;
    if (samples) cfg.decoder.num_samples = *samples;
    if (oracle_points) cfg.decoder.oracle_quadrature_points = *oracle_points;
    if (threads) cfg.threads = *threads;
    if (output) cfg.output = *output;
  }
};

void print_stats(const RunStats& s) {
  std::cout << csv_header() << '\n' << csv_row(s) << '\n';
  std::uint64_t max_err = 0;
  for (auto e : s.per_message_errors) max_err = std::max(max_err, e);
  std::cerr << "# errors=" << s.errors << "/" << s.trials
            << "  p_hat=" << s.p_hat << "  ci=[" << s.ci_low << ", "
            << s.ci_high << "]  max per-message errors=" << max_err
            << "  wall=" << s.wall_seconds << "s\n";
}

int cmd_simulate(const std::optional<std::string>& config_path,
                 const ConfigFlags& flags) {
  RunConfig cfg;
  if (config_path) cfg = load_config(*config_path);
  flags.apply(cfg);
  cfg.params.validate();
  RunStats s = run_trials(cfg);
  print_stats(s);
  if (!cfg.output.empty()) write_csv(cfg.output, {s});
  return kExitOk;
}

int cmd_sweep(const std::string& grid_path, const std::string& csv_path,
              std::string manifest_path) {
  std::vector<RunConfig> grid = load_grid(grid_path);
  if (manifest_path.empty()) manifest_path = csv_path + ".manifest.json";
  SweepOutcome out = sweep(grid, csv_path, manifest_path);
  std::cout << "cells=" << grid.size() << " ok=" << out.cells.size()
            << " csv=" << csv_path << " manifest=" << manifest_path << '\n';
  for (std::size_t i = 0; i < out.cell_errors.size(); ++i)
    if (!out.cell_errors[i].empty())
      std::cerr << "# cell " << i << " failed: " << out.cell_errors[i]
                << '\n';
  return kExitOk;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int cmd_exponents(double A, double beta, double tau2, double tau3,
                  double sigma2) {
  ExponentParams p{beta, tau2, tau3, sigma2, A};
  ExponentReport r = overall(p);
  std::cout << "no feedback        A/4        = "
            << fmt(exponent_no_feedback(A)) << '\n'
            << "noiseless feedback A/2        = "
            << fmt(exponent_noiseless_feedback(A)) << '\n';
  OneSwitchBound th = one_switch_exponent(A, sigma2);
  std::cout << "one-switch bound A(1-s2)/3    = " << fmt(th.value)
            << (th.vacuous ? "  (vacuous: sigma2 > 1)" : "") << '\n'
            << '\n'
            << "per-case coefficients (A1 units):\n"
            << "  pair in group (k=2)         = " << fmt(r.e_k2)
            << "   [finite-A prefactor sqrt(3) = " << fmt(r.prefactor_k2)
            << "]\n"
            << "  outside group (k=0)         = " << fmt(r.e_k0.combined)
            << "  branches: S2=" << fmt(r.e_k0.branch_s2)
            << " S3=" << fmt(r.e_k0.branch_s3)
            << " S4=" << fmt(r.e_k0.branch_s4) << '\n'
            << "  triple in group (k=3)       = " << fmt(r.e_k3.full)
            << "  floor (1+b)/3=" << fmt(r.e_k3.floor_val) << '\n'
            << "  quad in group (k=4)         = " << fmt(r.e_k4)
            << "  f4=" << fmt(f4(beta, tau2)) << '\n'
            << "  overall min                 = " << fmt(r.overall) << '\n'
            << "  assembly (1-s2)*min{...}    = " << fmt(r.assembly) << '\n'
            << "  per-symbol exponent         = " << fmt(r.per_n) << '\n'
            << "  union-bound slack ln 4      = " << fmt(r.union_slack_log)
            << '\n'
            << "windows: tau2=" << (r.flags.tau2_ok ? "ok" : "VIOLATED")
            << " tau3=" << (r.flags.tau3_ok ? "ok" : "VIOLATED")
            << " sigma2=" << (r.flags.sigma2_ok ? "ok" : "VIOLATED")
            << " beta=" << (r.flags.beta_ok ? "ok" : "VIOLATED") << '\n';
  return kExitOk;
}

int cmd_verify(double A, const std::vector<double>& betas,
               const std::vector<double>& tau2s,
               const std::vector<double>& tau3s,
               const std::vector<double>& sigma2s,
               const std::string& output) {
  std::ostringstream out;
  out << "beta,tau2,tau3,sigma2,A,e_k2,e_k0,e_s2,e_s3,e_s4,e_k3_full,"
         "e_k3_floor,e_k4,overall,assembly,per_n,inf_s2,bound_s2,gap_s2,"
         "inf_s3,bound_s3,gap_s3,inf_k4,inf_k4_direct,bound_k4,gap_k4,"
         "win_tau2,win_tau3,win_sigma2,win_beta\n";
  for (double beta : betas)
    for (double tau2 : tau2s)
      for (double tau3 : tau3s)
        for (double sigma2 : sigma2s) {
          ExponentParams p{beta, tau2, tau3, sigma2, A};
          ExponentReport r = overall(p);
          double inf_s2, bound_s2, inf_s3, bound_s3;
          double inf_k4, inf_k4_direct, bound_k4;
          if (sigma2 > 0.0) {
            inf_s2 = infimum_2d(OutsideBranch::group2, beta, tau2, sigma2)
                         .value;
            bound_s2 =
                closed_form_2d_bound(OutsideBranch::group2, beta, tau2,
                                     sigma2);
            inf_s3 = infimum_2d(OutsideBranch::group3, beta, tau3, sigma2)
                         .value;
            bound_s3 =
                closed_form_2d_bound(OutsideBranch::group3, beta, tau3,
                                     sigma2);
            Infimum5dResult k4 = infimum_5d_k4(beta, tau2, tau3, sigma2);
            inf_k4 = k4.value;
            inf_k4_direct = k4.direct_5d;
          } else {
            inf_s2 = infimum_2d(OutsideBranch::group2, beta, tau2, 0.0)
                         .value;
            bound_s2 = std::numeric_limits<double>::quiet_NaN();
            inf_s3 = infimum_2d(OutsideBranch::group3, beta, tau3, 0.0)
                         .value;
            bound_s3 = std::numeric_limits<double>::quiet_NaN();
            inf_k4 = k4_limit_sigma0(beta, tau2);
            inf_k4_direct = inf_k4;
          }
          bound_k4 = closed_form_k4_bound(beta, tau2, sigma2);
          out << fmt(beta) << ',' << fmt(tau2) << ',' << fmt(tau3) << ','
              << fmt(sigma2) << ',' << fmt(A) << ',' << fmt(r.e_k2) << ','
              << fmt(r.e_k0.combined) << ',' << fmt(r.e_k0.branch_s2) << ','
              << fmt(r.e_k0.branch_s3) << ',' << fmt(r.e_k0.branch_s4)
              << ',' << fmt(r.e_k3.full) << ',' << fmt(r.e_k3.floor_val)
              << ',' << fmt(r.e_k4) << ',' << fmt(r.overall) << ','
              << fmt(r.assembly) << ',' << fmt(r.per_n) << ','
              << fmt(inf_s2) << ',' << fmt(bound_s2) << ','
              << fmt(inf_s2 - bound_s2) << ',' << fmt(inf_s3) << ','
              << fmt(bound_s3) << ',' << fmt(inf_s3 - bound_s3) << ','
              << fmt(inf_k4) << ',' << fmt(inf_k4_direct) << ','
              << fmt(bound_k4) << ',' << fmt(inf_k4 - bound_k4) << ','
              << (r.flags.tau2_ok ? 1 : 0) << ','
              << (r.flags.tau3_ok ? 1 : 0) << ','
              << (r.flags.sigma2_ok ? 1 : 0) << ','
              << (r.flags.beta_ok ? 1 : 0) << '\n';
        }
  if (output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(output);
    if (!f) throw std::runtime_error("cannot write " + output);
    f << out.str();
  }
  return kExitOk;
}

int cmd_compare(const std::string& file_a, const std::string& file_b) {
  auto rows_a = read_csv(file_a);
  auto rows_b = read_csv(file_b);
  if (rows_a.empty() || rows_b.empty())
    throw std::invalid_argument("compare: empty results file");
  CompareReport rep = compare_arms(rows_a[0], rows_b[0]);
  std::cout << "arm A: " << to_string(rows_a[0].config.scheme)
            << " p_hat=" << rows_a[0].p_hat << " ci=[" << rows_a[0].ci_low
            << "," << rows_a[0].ci_high << "]\n"
            << "arm B: " << to_string(rows_b[0].config.scheme)
            << " p_hat=" << rows_b[0].p_hat << " ci=[" << rows_b[0].ci_low
            << "," << rows_b[0].ci_high << "]\n"
            << "two-proportion p-value = " << rep.p_value << '\n'
            << "95% CIs " << (rep.ci_overlap ? "overlap" : "disjoint")
            << '\n'
            << "verdict: " << rep.verdict << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-rate AWGN feedback coding: simulator and verifier"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run one Monte Carlo config");
  std::optional<std::string> config_path;
  sim->add_option("--config", config_path, "flat JSON config file");
  ConfigFlags sim_flags;
  sim_flags.add_to(sim);

  auto* sw = app.add_subcommand("sweep", "run a grid of configs");
  std::string grid_path, sweep_csv = "sweep.csv", manifest_path;
  sw->add_option("--grid", grid_path, "grid JSON file")->required();
  sw->add_option("--output", sweep_csv, "CSV destination");
  sw->add_option("--manifest", manifest_path, "manifest destination");

  auto* ex = app.add_subcommand("exponents", "closed-form exponent table");
  double A = 3.0, beta = 0.5, tau2 = 0.15, tau3 = 0.05, sigma2 = 0.0;
  ex->add_option("--A", A);
  ex->add_option("--beta", beta);
  ex->add_option("--tau2", tau2);
  ex->add_option("--tau3", tau3);
  ex->add_option("--sigma2", sigma2);

  auto* ver = app.add_subcommand(
      "verify", "analytic vs numeric exponent verification table");
  double vA = 3.0;
  std::vector<double> vbeta{0.5}, vtau2{0.15}, vtau3{0.05}, vsigma2{0.25};
  std::string verify_out;
  ver->add_option("--A", vA);
  ver->add_option("--beta", vbeta)->delimiter(',');
  ver->add_option("--tau2", vtau2)->delimiter(',');
  ver->add_option("--tau3", vtau3)->delimiter(',');
  ver->add_option("--sigma2", vsigma2)->delimiter(',');
  ver->add_option("--output", verify_out, "CSV destination (default stdout)");

  auto* cmp = app.add_subcommand("compare", "significance test of two runs");
  std::string file_a, file_b;
  cmp->add_option("a", file_a, "first results CSV")->required();
  cmp->add_option("b", file_b, "second results CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, sim_flags);
    if (sw->parsed()) return cmd_sweep(grid_path, sweep_csv, manifest_path);
    if (ex->parsed()) return cmd_exponents(A, beta, tau2, tau3, sigma2);
    if (ver->parsed())
      return cmd_verify(vA, vbeta, vtau2, vtau3, vsigma2, verify_out);
    if (cmp->parsed()) return cmd_compare(file_a, file_b);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::length_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
