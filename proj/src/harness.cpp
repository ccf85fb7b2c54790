#include "awgnfb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "awgnfb/protocol.hpp"
#include "awgnfb/stats.hpp"

namespace awgnfb {

using nlohmann::json;

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::feedback_one_switch: return "feedback_one_switch";
    case Scheme::baseline_no_feedback: return "baseline_no_feedback";
    case Scheme::naive_feedback: return "naive_feedback";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "feedback_one_switch") return Scheme::feedback_one_switch;
  if (s == "baseline_no_feedback") return Scheme::baseline_no_feedback;
  if (s == "naive_feedback") return Scheme::naive_feedback;
  throw std::invalid_argument("unknown scheme: " + s);
}

namespace {

struct Tally {
  std::uint64_t errors = 0;
  std::vector<std::uint64_t> msg_trials, msg_errors;
  std::uint64_t k_count[5] = {0, 0, 0, 0, 0};
  std::uint64_t coord_fail = 0;

  explicit Tally(int M) : msg_trials(M, 0), msg_errors(M, 0) {}

  void merge(const Tally& o) {
    errors += o.errors;
    coord_fail += o.coord_fail;
    for (int k = 0; k < 5; ++k) k_count[k] += o.k_count[k];
    for (std::size_t i = 0; i < msg_trials.size(); ++i) {
      msg_trials[i] += o.msg_trials[i];
      msg_errors[i] += o.msg_errors[i];
    }
  }
};

void run_range(const RunConfig& cfg, const StreamFactory& factory,
               std::uint64_t lo, std::uint64_t hi, Tally& tally) {
  const ChannelParams& p = cfg.params;
  for (std::uint64_t trial = lo; trial < hi; ++trial) {
    TrialStreams ts = factory(cfg.seed, trial);
    int msg = static_cast<int>(ts.message.uniform_below(p.M));
    Transcript t;
    switch (cfg.scheme) {
      case Scheme::baseline_no_feedback:
        t = run_baseline(msg, p, ts);
        break;
      case Scheme::feedback_one_switch:
        t = run_session(msg, p, ts,
                        [&](const std::vector<double>& y1,
                            const std::vector<double>& y2, NoiseStream& ns) {
                          return decode(y1, y2, p, ns, cfg.decoder);
                        });
        break;
      case Scheme::naive_feedback:
        t = run_session(msg, p, ts,
                        [&](const std::vector<double>& y1,
                            const std::vector<double>& y2, NoiseStream&) {
                          return decode_naive(y1, y2, p);
                        });
        break;
    }
    ++tally.msg_trials[msg];
    if (!t.correct) {
      ++tally.errors;
      ++tally.msg_errors[msg];
    }
    if (t.selection) {
      ++tally.k_count[t.selection->k];
      if (!t.selection->contains(msg)) ++tally.coord_fail;
    }
  }
}

TrialStreams default_streams(std::uint64_t seed, std::uint64_t trial) {
  return TrialStreams(seed, trial);
}

}  // namespace

RunStats run_trials(const RunConfig& config) {
  return run_trials(config, default_streams);
}

RunStats run_trials(const RunConfig& config, const StreamFactory& factory) {
  config.params.validate();
  if (config.trials < 1)
    throw std::invalid_argument("run_trials: trials must be >= 1");
  auto t0 = std::chrono::steady_clock::now();

  unsigned workers = config.threads > 0
                         ? static_cast<unsigned>(config.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, config.trials));

  std::vector<Tally> tallies(workers, Tally(config.params.M));
  std::vector<std::thread> pool;
  std::uint64_t chunk = config.trials / workers;
  std::uint64_t extra = config.trials % workers;
  std::uint64_t lo = 0;
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t hi = lo + chunk + (w < extra ? 1 : 0);
    pool.emplace_back(run_range, std::cref(config), std::cref(factory), lo,
                      hi, std::ref(tallies[w]));
    lo = hi;
  }
  for (auto& th : pool) th.join();
  Tally total(config.params.M);
  for (const auto& t : tallies) total.merge(t);

  RunStats s;
  s.config = config;
  s.trials = config.trials;
  s.errors = total.errors;
  double nt = static_cast<double>(s.trials);
  s.p_hat = static_cast<double>(s.errors) / nt;
  Interval ci = clopper_pearson(s.errors, s.trials, 0.95);
  s.ci_low = ci.lo;
  s.ci_high = ci.hi;
  s.exponent_hat = (s.errors == 0)
                       ? std::numeric_limits<double>::infinity()
                       : -std::log(s.p_hat) / config.params.n;
  std::uint64_t selected =
      total.k_count[2] + total.k_count[3] + total.k_count[4];
  if (selected > 0) {
    s.k2_freq = static_cast<double>(total.k_count[2]) / selected;
    s.k3_freq = static_cast<double>(total.k_count[3]) / selected;
    s.k4_freq = static_cast<double>(total.k_count[4]) / selected;
    s.coord_fail_freq = static_cast<double>(total.coord_fail) / selected;
  }
  s.per_message_trials = total.msg_trials;
  s.per_message_errors = total.msg_errors;
  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return s;
}

// --- persistence ---

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "scheme,n,M,A,sigma2,beta,tau2,tau3,seed,trials,errors,p_hat,"
         "ci_low,ci_high,exponent_hat,k2_freq,k3_freq,k4_freq,"
         "coord_fail_freq";
}

std::string csv_row(const RunStats& s) {
  const ChannelParams& p = s.config.params;
  std::ostringstream out;
  out << to_string(s.config.scheme) << ',' << p.n << ',' << p.M << ','
      << fmt_double(p.A) << ',' << fmt_double(p.sigma2()) << ','
      << fmt_double(p.beta) << ',' << fmt_double(p.tau2) << ','
      << fmt_double(p.tau3) << ',' << s.config.seed << ',' << s.trials << ','
      << s.errors << ',' << fmt_double(s.p_hat) << ','
      << fmt_double(s.ci_low) << ',' << fmt_double(s.ci_high) << ','
      << fmt_double(s.exponent_hat) << ',' << fmt_double(s.k2_freq) << ','
      << fmt_double(s.k3_freq) << ',' << fmt_double(s.k4_freq) << ','
      << fmt_double(s.coord_fail_freq);
  return out.str();
}

void write_csv(const std::string& path, const std::vector<RunStats>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << csv_header() << '\n';
  for (const auto& r : rows) out << csv_row(r) << '\n';
  if (!out) throw std::runtime_error("write failed on " + path);
}

std::vector<RunStats> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty CSV: " + path);
  if (line != csv_header())
    throw std::runtime_error("unexpected CSV header in " + path);
  std::vector<RunStats> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 19)
      throw std::runtime_error("malformed CSV row in " + path);
    RunStats s;
    s.config.scheme = scheme_from_string(f[0]);
    s.config.params.n = std::stoi(f[1]);
    s.config.params.M = std::stoi(f[2]);
    s.config.params.A = std::stod(f[3]);
    s.config.params.sigma = std::sqrt(std::stod(f[4]));
    s.config.params.beta = std::stod(f[5]);
    s.config.params.tau2 = std::stod(f[6]);
    s.config.params.tau3 = std::stod(f[7]);
    s.config.seed = std::stoull(f[8]);
    s.config.trials = std::stoull(f[9]);
    s.trials = s.config.trials;
    s.errors = std::stoull(f[10]);
    s.p_hat = std::stod(f[11]);
    s.ci_low = std::stod(f[12]);
    s.ci_high = std::stod(f[13]);
    s.exponent_hat = std::stod(f[14]);
    s.k2_freq = std::stod(f[15]);
    s.k3_freq = std::stod(f[16]);
    s.k4_freq = std::stod(f[17]);
    s.coord_fail_freq = std::stod(f[18]);
    rows.push_back(std::move(s));
  }
  return rows;
}

namespace {

json config_to_flat_json(const RunConfig& c) {
  json j;
  j["scheme"] = to_string(c.scheme);
  j["n"] = c.params.n;
  j["M"] = c.params.M;
  j["A"] = c.params.A;
  j["sigma2"] = c.params.sigma2();
  j["beta"] = c.params.beta;
  j["tau2"] = c.params.tau2;
  j["tau3"] = c.params.tau3;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["decoder.samples"] = c.decoder.num_samples;
  j["decoder.oracle_points"] = c.decoder.oracle_quadrature_points;
  j["output"] = c.output;
  j["threads"] = c.threads;
  return j;
}

RunConfig config_from_flat_json(const json& j) {
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  std::string scheme = to_string(c.scheme);
  get("scheme", scheme);
  c.scheme = scheme_from_string(scheme);
  get("n", c.params.n);
  get("M", c.params.M);
  get("A", c.params.A);
  double sigma2 = c.params.sigma2();
  get("sigma2", sigma2);
  if (sigma2 < 0.0) throw std::invalid_argument("config: sigma2 < 0");
  c.params.sigma = std::sqrt(sigma2);
  get("beta", c.params.beta);
  get("tau2", c.params.tau2);
  get("tau3", c.params.tau3);
  get("seed", c.seed);
  get("trials", c.trials);
  get("decoder.samples", c.decoder.num_samples);
  get("decoder.oracle_points", c.decoder.oracle_quadrature_points);
  get("output", c.output);
  get("threads", c.threads);
  return c;
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  return config_from_flat_json(json::parse(text));
}

std::string config_json(const RunConfig& config) {
  return config_to_flat_json(config).dump(2);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

std::vector<RunConfig> parse_grid_json(const std::string& text) {
  json j = json::parse(text);
  RunConfig base;
  if (j.contains("base")) base = config_from_flat_json(j.at("base"));
  std::vector<RunConfig> cells;
  if (!j.contains("grid") || j.at("grid").empty()) {
    cells.push_back(base);
    return cells;
  }
  const json& grid = j.at("grid");
  std::vector<std::string> keys;
  for (auto it = grid.begin(); it != grid.end(); ++it)
    keys.push_back(it.key());
  std::sort(keys.begin(), keys.end());
  std::vector<std::size_t> idx(keys.size(), 0);
  for (;;) {
    json flat = config_to_flat_json(base);
    for (std::size_t k = 0; k < keys.size(); ++k)
      flat[keys[k]] = grid.at(keys[k]).at(idx[k]);
    cells.push_back(config_from_flat_json(flat));
    std::size_t pos = 0;
    while (pos < keys.size() &&
           ++idx[pos] == grid.at(keys[pos]).size())
      idx[pos++] = 0;
    if (pos == keys.size()) break;
  }
  return cells;
}

std::vector<RunConfig> load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grid_json(ss.str());
}

SweepOutcome sweep(const std::vector<RunConfig>& grid,
                   const std::string& csv_path,
                   const std::string& manifest_path) {
  SweepOutcome out;
  out.cell_errors.resize(grid.size());
  std::vector<RunStats> clean;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      RunStats s = run_trials(grid[i]);
      out.cells.push_back(s);
      clean.push_back(s);
      out.cell_errors[i] = "";
    } catch (const std::exception& e) {
      out.cell_errors[i] = e.what();
    }
  }
  if (!csv_path.empty()) write_csv(csv_path, clean);
  if (!manifest_path.empty())
    write_manifest(manifest_path, grid, out.cell_errors, csv_path);
  return out;
}

void write_manifest(const std::string& path,
                    const std::vector<RunConfig>& grid,
                    const std::vector<std::string>& cell_errors,
                    const std::string& csv_path) {
  json j;
  j["csv"] = csv_path;
  j["cells"] = json::array();
  for (const auto& c : grid) j["cells"].push_back(config_to_flat_json(c));
  j["cell_errors"] = cell_errors;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j = json::parse(in);
  Manifest m;
  m.csv_path = j.at("csv").get<std::string>();
  for (const auto& cell : j.at("cells"))
    m.grid.push_back(config_from_flat_json(cell));
  m.cell_errors = j.at("cell_errors").get<std::vector<std::string>>();
  return m;
}

CompareReport compare_arms(const RunStats& a, const RunStats& b) {
  const ChannelParams& pa = a.config.params;
  const ChannelParams& pb = b.config.params;
  if (pa.n != pb.n || pa.M != pb.M || pa.A != pb.A)
    throw std::invalid_argument("compare_arms: arms disagree on (n, A, M)");
  CompareReport r;
  r.p_value = two_proportion_pvalue(a.errors, a.trials, b.errors, b.trials);
  r.ci_overlap = !(a.ci_high < b.ci_low || b.ci_high < a.ci_low);
  if (r.p_value < 0.05 && !r.ci_overlap) {
    r.better = (a.p_hat < b.p_hat) ? 0 : 1;
    r.verdict = (r.better == 0) ? "first arm significantly better"
                                : "second arm significantly better";
  } else {
    r.better = -1;
    r.verdict = "no significant difference";
  }
  return r;
}

SlopeFit exponent_fit(const std::vector<FitCell>& cells) {
  if (cells.size() < 3)
    throw std::invalid_argument("exponent_fit: need >= 3 block lengths");
  SlopeFit fit;
  std::vector<double> xs, ys, vars;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].p_hat <= 0.0) {
      fit.excluded.push_back(static_cast<int>(i));
      continue;
    }
    xs.push_back(cells[i].n);
    ys.push_back(-std::log(cells[i].p_hat));
    // delta method: Var(-ln p_hat) ~ (1-p) / (trials * p)
    vars.push_back((1.0 - cells[i].p_hat) /
                   (static_cast<double>(cells[i].trials) * cells[i].p_hat));
  }
  if (xs.size() < 2)
    throw std::invalid_argument("exponent_fit: fewer than 2 usable cells");
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= xs.size();
  ybar /= ys.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("exponent_fit: degenerate block lengths");
  fit.slope = sxy / sxx;
  double var_slope = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double c = (xs[i] - xbar) / sxx;
    var_slope += c * c * vars[i];
  }
  double half = 1.959963984540054 * std::sqrt(var_slope);
  fit.ci_low = fit.slope - half;
  fit.ci_high = fit.slope + half;
  fit.dof = static_cast<int>(xs.size()) - 2;
  return fit;
}

}  // namespace awgnfb
