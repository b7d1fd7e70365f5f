#include "prmmc/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "json.hpp"
#include "prmmc/csv.hpp"
#include "prmmc/diagnostics.hpp"
#include "prmmc/mcmc.hpp"
#include "prmmc/simulate.hpp"

namespace prmmc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kSaltMeasure = 0x6d656173ULL;  // matches the sampler's seeding
constexpr std::uint64_t kSaltObs = 0x6f6273ULL;
constexpr std::uint64_t kSaltChain = 0x63686eULL;
constexpr std::uint64_t kSaltBench = 0x62656e63ULL;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

void require_seed(const RunConfig& cfg) {
  if (!cfg.seed_set)
    throw ConfigError("seed required: set the 'seed' config key or pass --seed");
}

std::vector<double> observation_times(const RunConfig& cfg) {
  const auto n = static_cast<long>(std::floor(cfg.horizon / cfg.obs_interval + 1e-9));
  std::vector<double> t(n);
  for (long i = 0; i < n; ++i) t[i] = static_cast<double>(i + 1) * cfg.obs_interval;
  return t;
}

std::vector<PoissonMeasure> prior_measures(const ModelSpec& model, GridPtr grid,
                                           std::uint64_t seed) {
  std::vector<PoissonMeasure> nus;
  nus.reserve(model.event_count());
  for (int k = 0; k < model.event_count(); ++k)
    nus.emplace_back(grid, mix64(seed, kSaltMeasure, static_cast<std::uint64_t>(k)), k);
  return nus;
}

Trajectory run_simulator(const RunConfig& cfg, const ModelSpec& model,
                         std::vector<PoissonMeasure>& nus) {
  return cfg.approximate ? simulate_approx(model, cfg.params, nus)
                         : simulate_exact(model, cfg.params, nus);
}

std::int64_t sample_nb2(double mu, double psi, Rng& rng) {
  if (mu <= 0.0) return 0;
  std::gamma_distribution<double> gamma(psi, mu / psi);
  const double lambda = gamma(rng);
  if (lambda <= 0.0) return 0;
  std::poisson_distribution<long long> pois(lambda);
  return pois(rng);
}

std::int64_t sample_binom(std::int64_t n, double p, Rng& rng) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<long long> binom(n, p);
  return binom(rng);
}

/// Timing is intentionally omitted: outputs must be a pure function of
/// config, inputs, and seed.
void write_run_summary(const std::string& path, const ChainOutput& out,
                       std::uint64_t seed) {
  json j;
  j["seed"] = seed;
  j["adapt_iters"] = out.adapt_iters;
  j["n_iter"] = out.n_iter;
  j["stride"] = out.stride;
  j["retained"] = out.samples.size();
  j["accept_total"] = out.accept_total;
  j["accept_sampling"] = out.accept_sampling;
  j["accept_rate_total"] =
      out.total > 0 ? static_cast<double>(out.accept_total) / out.total : 0.0;
  j["accept_rate_sampling"] =
      out.n_iter > 0 ? static_cast<double>(out.accept_sampling) / out.n_iter : 0.0;
  j["sim_errors"] = out.sim_errors;
  j["adapt_reset"] = out.adapt_reset;
  j["density_caps"] = out.caps;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

int find_column(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return static_cast<int>(j);
  return -1;
}

/// mESS of a chain run: the (beta, free ICs, trajectory-at-datapoints)
/// embedding when those columns exist, the raw parameter columns otherwise.
EssReport output_mess(const ChainOutput& out, const ModelSpec& model,
                      const DiagnoseOpts& opts, double wall_seconds) {
  const auto n = out.samples.size();
  if (n < 4) throw ConfigError("chain too short for mESS (need >= 4 retained samples)");
  const int b = find_column(out.names, opts.beta);
  const int i0 = find_column(out.names, opts.free_ics[0]);
  const int i1 = find_column(out.names, opts.free_ics[1]);
  const int comp_s = model.comp_index("S");
  const int comp_i = model.comp_index("I");
  if (b >= 0 && i0 >= 0 && i1 >= 0 && !out.obs_times.empty() && comp_s >= 0 &&
      comp_i >= 0) {
    std::vector<double> beta(n);
    std::vector<std::array<double, 2>> ics(n);
    for (std::size_t r = 0; r < n; ++r) {
      beta[r] = out.samples[r][b];
      ics[r] = {out.samples[r][i0], out.samples[r][i1]};
    }
    return mess(embed_chain_for_mess(beta, ics, out.traj_at_obs, comp_s, comp_i),
                wall_seconds);
  }
  if (out.names.empty()) throw ConfigError("chain has no parameter columns for mESS");
  Eigen::MatrixXd m(n, out.names.size());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < out.names.size(); ++c) m(r, c) = out.samples[r][c];
  return mess(m, wall_seconds);
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
  require_seed(cfg);
  const ModelSpec model = make_model(cfg);
  const GridPtr grid = make_grid(cfg);
  ensure_dir(cfg.out_dir);
  echo_config(cfg, join(cfg.out_dir, "config_resolved.json"));

  auto nus = prior_measures(model, grid, cfg.seed);
  const Trajectory traj = run_simulator(cfg, model, nus);
  if (traj.clamped)
    std::cerr << "note: approximate batches were clamped at a compartment boundary\n";

  const std::vector<double> times = observation_times(cfg);
  const std::string traj_path = join(cfg.out_dir, "trajectory.csv");
  if (cfg.simulate.rows == "jumps") {
    write_trajectory_csv(traj_path, model, traj);
    std::cout << "wrote " << traj_path << " (" << traj.jumps().size() << " jumps)\n";
  } else {
    std::vector<double> with_start(times.size() + 1, 0.0);
    std::copy(times.begin(), times.end(), with_start.begin() + 1);
    write_trajectory_at_csv(traj_path, model, traj, with_start);
    std::cout << "wrote " << traj_path << " (" << with_start.size() << " rows)\n";
  }

  Rng obs_rng(mix64(cfg.seed, kSaltObs));
  for (DataKind kind : cfg.simulate.emit) {
    Dataset d;
    d.kind = kind;
    std::string path;
    if (kind == DataKind::incidence) {
      d.times = times;
      const auto inc = case_increments(traj, times);
      d.counts.reserve(inc.size());
      for (std::int64_t mu : inc)
        d.counts.push_back(sample_nb2(static_cast<double>(mu), cfg.params.psi, obs_rng));
      path = join(cfg.out_dir, "incidence.csv");
    } else if (kind == DataKind::prevalence) {
      d.times = times;
      const int ci = model.comp_index("I");
      for (double t : times)
        d.counts.push_back(sample_binom(traj.state_at(t)[ci], cfg.params.rho, obs_rng));
      path = join(cfg.out_dir, "prevalence.csv");
    } else {
      const double t = cfg.simulate.sero_t > 0.0 ? cfg.simulate.sero_t : cfg.horizon;
      const State x = traj.state_at(t);
      std::int64_t alive = 0;
      for (int c = 0; c < model.dim; ++c) alive += x[c];
      const double p =
          alive > 0 ? static_cast<double>(x[model.comp_index("R")]) / alive : 0.0;
      d.times = {t};
      d.counts = {sample_binom(cfg.simulate.sero_n, p, obs_rng)};
      d.n_sero = cfg.simulate.sero_n;
      path = join(cfg.out_dir, "sero.csv");
    }
    write_dataset_csv(path, d);
    std::cout << "wrote " << path << "\n";
  }
}

void cmd_infer(const RunConfig& cfg) {
  require_seed(cfg);
  if (cfg.data.empty()) throw ConfigError("infer needs at least one 'data' entry");
  const ModelSpec model = make_model(cfg);
  const GridPtr grid = make_grid(cfg);
  const std::vector<Dataset> data = load_datasets(cfg);
  ensure_dir(cfg.out_dir);
  echo_config(cfg, join(cfg.out_dir, "config_resolved.json"));

  RunSettings run;
  run.n_iter = cfg.n_iter;
  run.stride = cfg.stride;
  run.approximate = cfg.approximate;
  run.slice_width = cfg.slice_width;
  run.progress = &std::cerr;

  for (int c = 0; c < cfg.chains; ++c) {
    const std::string dir =
        cfg.chains > 1 ? join(cfg.out_dir, "chain_" + std::to_string(c)) : cfg.out_dir;
    ensure_dir(dir);
    const std::uint64_t seed =
        cfg.chains > 1 ? mix64(cfg.seed, kSaltChain, static_cast<std::uint64_t>(c))
                       : cfg.seed;
    if (cfg.chains > 1) std::cerr << "chain " << c << " (seed " << seed << ")\n";
    const ChainOutput out = run_chain(model, grid, data, cfg.params, cfg.space,
                                      cfg.proposal, run, seed);
    write_chain_csv(join(dir, "chain.csv"), out);
    write_nu_counts_csv(join(dir, "nu_counts.csv"), out);
    write_traj_obs_csv(join(dir, "traj_obs.csv"), model, out);
    write_run_summary(join(dir, "run_summary.json"), out, seed);
    std::cout << "chain " << c << ": retained " << out.samples.size()
              << " samples, acceptance "
              << (out.total > 0 ? static_cast<double>(out.accept_total) / out.total : 0.0)
              << ", sim errors " << out.sim_errors << "\n";
  }
}

void cmd_diagnose(const RunConfig& cfg) {
  const std::string chain_dir =
      cfg.diagnose.chain_dir.empty() ? cfg.out_dir : cfg.diagnose.chain_dir;
  ensure_dir(cfg.out_dir);
  echo_config(cfg, join(cfg.out_dir, "config_resolved.json"));

  ChainCsv chain;
  try {
    chain = read_chain_csv(join(chain_dir, "chain.csv"));
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  if (chain.samples.size() < 4)
    throw ConfigError("chain too short for mESS (need >= 4 retained samples)");

  // Prefer the complexity embedding; fall back to the raw parameter columns
  // when the run did not record trajectory snapshots.
  EssReport report;
  const std::string traj_path = join(chain_dir, "traj_obs.csv");
  bool embedded = false;
  if (fs::exists(traj_path)) {
    const TrajObsCsv tob = read_traj_obs_csv(traj_path);
    const bool have_cols = find_column(chain.names, cfg.diagnose.beta) >= 0 &&
                           find_column(chain.names, cfg.diagnose.free_ics[0]) >= 0 &&
                           find_column(chain.names, cfg.diagnose.free_ics[1]) >= 0;
    if (have_cols && !tob.times.empty() && tob.states.size() == chain.samples.size()) {
      const ModelSpec model = make_model(cfg);
      std::vector<std::array<double, 2>> ics(chain.samples.size());
      const auto c0 = chain.column(cfg.diagnose.free_ics[0]);
      const auto c1 = chain.column(cfg.diagnose.free_ics[1]);
      for (std::size_t r = 0; r < ics.size(); ++r) ics[r] = {c0[r], c1[r]};
      try {
        report = mess(embed_chain_for_mess(chain.column(cfg.diagnose.beta), ics,
                                           tob.states, model.comp_index("S"),
                                           model.comp_index("I")));
      } catch (const std::domain_error& e) {
        throw ConfigError(std::string("mESS: ") + e.what());
      }
      embedded = true;
    }
  }
  if (!embedded) {
    Eigen::MatrixXd m(chain.samples.size(), chain.names.size());
    for (std::size_t r = 0; r < chain.samples.size(); ++r)
      for (std::size_t c = 0; c < chain.names.size(); ++c) m(r, c) = chain.samples[r][c];
    try {
      report = mess(m);
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("mESS: ") + e.what());
    }
  }
  write_ess_json(join(cfg.out_dir, "ess.json"), report);
  std::cout << "mESS = " << report.mess << " (n = " << report.n << ", p = " << report.p
            << (embedded ? ", trajectory embedding" : ", raw parameter columns")
            << (report.degenerate ? ", rank-deficient covariance" : "") << ")\n";

  if (!cfg.diagnose.residuals) return;
  const std::string nu_path = join(chain_dir, "nu_counts.csv");
  if (!fs::exists(nu_path))
    throw ConfigError("residuals requested but " + nu_path +
                      " is missing (run infer with the same out_dir first)");
  const NuDensities nd = read_nu_counts_csv(nu_path);
  const int n_slices = static_cast<int>(nd.t_lo.size());
  const int max_lag =
      cfg.diagnose.max_lag > 0 ? cfg.diagnose.max_lag : std::max(1, n_slices / 2);
  std::vector<ResidualSummary> summaries;
  std::vector<std::pair<int, AcfResult>> acfs;
  for (std::size_t e = 0; e < nd.density.size(); ++e) {
    if (nd.density[e].empty()) continue;
    ResidualSummary s = residual_summary(nd.density[e], nd.t_lo, nd.t_hi,
                                         static_cast<int>(e), max_lag);
    acfs.emplace_back(static_cast<int>(e), s.acf_of_mean);
    long flagged = 0;
    for (int f : s.flag) flagged += f != 0;
    std::cout << "event " << e << ": " << flagged << "/" << n_slices
              << " slices outside the prior band\n";
    summaries.push_back(std::move(s));
  }
  write_residual_csv(join(cfg.out_dir, "residuals.csv"), summaries);
  write_acf_csv(join(cfg.out_dir, "acf.csv"), acfs);
  std::cout << "wrote " << join(cfg.out_dir, "residuals.csv") << " and "
            << join(cfg.out_dir, "acf.csv") << "\n";
}

void cmd_benchmark(const RunConfig& cfg) {
  require_seed(cfg);
  if (cfg.benchmark.sizes.empty())
    throw ConfigError("benchmark needs benchmark.sizes (population sizes)");
  if (cfg.n_iter / cfg.stride < 4)
    throw ConfigError("benchmark needs n_iter/stride >= 4 retained samples for mESS");
  const ModelSpec model = make_model(cfg);
  const GridPtr grid = make_grid(cfg);
  ensure_dir(cfg.out_dir);
  echo_config(cfg, join(cfg.out_dir, "config_resolved.json"));

  RunSettings run;
  run.n_iter = cfg.n_iter;
  run.stride = cfg.stride;
  run.approximate = cfg.approximate;
  run.slice_width = cfg.slice_width;
  run.progress = &std::cerr;

  const std::vector<double> times = observation_times(cfg);
  const int ci = model.comp_index("I");

  std::ofstream table(join(cfg.out_dir, "benchmark.csv"));
  if (!table) throw std::runtime_error("cannot write benchmark.csv");
  table.precision(17);
  table << "n,wall_seconds,iterations,retained,mess,seconds_per_ess\n";

  json summary;
  summary["sizes"] = cfg.benchmark.sizes;
  json rows = json::array();
  std::vector<double> xs, ys;

  for (std::int64_t n : cfg.benchmark.sizes) {
    Params p = cfg.params;
    p.s0 = n - p.e0 - p.i0 - p.r0;
    if (p.s0 <= 0)
      throw ConfigError("benchmark size " + std::to_string(n) +
                        " smaller than the seeded compartments");

    // Synthetic prevalence observations from one exact draw at these targets.
    auto truth_nus =
        prior_measures(model, grid, mix64(cfg.seed, kSaltBench, static_cast<std::uint64_t>(n)));
    const Trajectory truth = simulate_exact(model, p, truth_nus);
    Rng obs_rng(mix64(cfg.seed, kSaltBench, kSaltObs, static_cast<std::uint64_t>(n)));
    Dataset d;
    d.kind = DataKind::prevalence;
    d.times = times;
    for (double t : times)
      d.counts.push_back(sample_binom(truth.state_at(t)[ci], p.rho, obs_rng));

    std::cerr << "benchmark n = " << n << "\n";
    const ChainOutput out =
        run_chain(model, grid, {d}, p, cfg.space, cfg.proposal, run,
                  mix64(cfg.seed, kSaltChain, kSaltBench, static_cast<std::uint64_t>(n)));
    EssReport ess;
    try {
      ess = output_mess(out, model, cfg.diagnose, out.wall_seconds);
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("mESS: ") + e.what());
    }
    table << n << "," << out.wall_seconds << "," << out.total << ","
          << out.samples.size() << "," << ess.mess << "," << ess.seconds_per_ess
          << "\n";
    json row;
    row["n"] = n;
    row["wall_seconds"] = out.wall_seconds;
    row["iterations"] = out.total;
    row["retained"] = out.samples.size();
    row["mess"] = ess.mess;
    row["seconds_per_ess"] = ess.seconds_per_ess;
    rows.push_back(row);
    if (ess.seconds_per_ess > 0.0 && ess.mess > 0.0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(ess.seconds_per_ess);
    }
    std::cout << "n = " << n << ": mESS = " << ess.mess << ", "
              << ess.seconds_per_ess << " s per effective sample\n";
  }
  summary["rows"] = rows;
  if (xs.size() >= 2) {
    const double slope = loglog_slope(xs, ys);
    summary["loglog_slope"] = slope;
    std::cout << "log-log slope of cost per effective sample: " << slope << "\n";
  }

  if (cfg.benchmark.compare_simulators) {
    json cmp = json::array();
    for (std::int64_t n : cfg.benchmark.sizes) {
      Params p = cfg.params;
      p.s0 = n - p.e0 - p.i0 - p.r0;
      const int reps = 3;
      double exact_s = 0.0, approx_s = 0.0;
      for (int r = 0; r < reps; ++r) {
        const std::uint64_t s =
            mix64(cfg.seed, kSaltBench, static_cast<std::uint64_t>(n),
                  static_cast<std::uint64_t>(r));
        auto nus_e = prior_measures(model, grid, s);
        const auto t0 = std::chrono::steady_clock::now();
        simulate_exact(model, p, nus_e);
        const auto t1 = std::chrono::steady_clock::now();
        auto nus_a = prior_measures(model, grid, s);
        const auto t2 = std::chrono::steady_clock::now();
        simulate_approx(model, p, nus_a);
        const auto t3 = std::chrono::steady_clock::now();
        exact_s += std::chrono::duration<double>(t1 - t0).count();
        approx_s += std::chrono::duration<double>(t3 - t2).count();
      }
      json row;
      row["n"] = n;
      row["exact_seconds"] = exact_s / reps;
      row["approx_seconds"] = approx_s / reps;
      cmp.push_back(row);
      std::cout << "n = " << n << ": exact " << exact_s / reps << " s, approximate "
                << approx_s / reps << " s per draw\n";
    }
    summary["simulator_comparison"] = cmp;
  }

  std::ofstream f(join(cfg.out_dir, "benchmark_summary.json"));
  if (!f) throw std::runtime_error("cannot write benchmark_summary.json");
  f << summary.dump(2) << "\n";
}

}  // namespace prmmc
