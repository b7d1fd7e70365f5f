#include "prmmc/mcmc.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

namespace prmmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::int64_t* ic_field(Params& p, const std::string& comp) {
  if (comp == "S") return &p.s0;
  if (comp == "E") return &p.e0;
  if (comp == "I") return &p.i0;
  if (comp == "R") return &p.r0;
  return nullptr;
}

}  // namespace

double log_accept_ratio(double cur_loglik, double cur_logprior, double prop_loglik,
                        double prop_logprior) {
  const double prop = prop_loglik + prop_logprior;
  const double cur = cur_loglik + cur_logprior;
  if (prop == kNegInf) return kNegInf;
  if (cur == kNegInf) return std::numeric_limits<double>::infinity();
  return prop - cur;
}

Sampler::Sampler(ModelSpec model, GridPtr grid, std::vector<Dataset> data, Params init,
                 ParamSpace space, ProposalConfig proposal, bool approximate,
                 std::uint64_t seed)
    : model_(std::move(model)),
      grid_(std::move(grid)),
      data_(std::move(data)),
      space_(std::move(space)),
      prop_(proposal),
      approximate_(approximate),
      rng_(mix64(seed, 0x636861696eULL)) {
  if (!(prop_.f_nu > 0.0 && prop_.f_nu <= 1.0))
    throw std::invalid_argument("f_nu must be in (0,1]");
  if (prop_.warmup < 0 || prop_.adapt_iters < 0)
    throw std::invalid_argument("negative iteration counts");
  if (space_.priors.size() != space_.names.size())
    throw std::invalid_argument("one prior per sampled parameter required");
  for (std::size_t i = 0; i < space_.names.size(); ++i) {
    Params probe;
    if (!param_field(probe, space_.names[i]))
      throw std::invalid_argument("unknown sampled parameter: " + space_.names[i]);
    if (space_.priors[i].kind == PriorKind::fixed)
      throw std::invalid_argument("sampled parameter needs a proper prior: " +
                                  space_.names[i]);
    for (std::size_t j = i + 1; j < space_.names.size(); ++j)
      if (space_.names[i] == space_.names[j])
        throw std::invalid_argument("duplicate sampled parameter: " + space_.names[i]);
  }
  for (const Dataset& d : data_) d.validate(grid_->horizon());

  for (int k = 0; k < model_.event_count(); ++k)
    state_.nus.emplace_back(grid_, mix64(seed, 0x6d656173ULL, static_cast<std::uint64_t>(k)),
                            k);
  state_.params = init;
  state_.logprior = log_prior(init, space_);
  if (state_.logprior == kNegInf)
    throw std::invalid_argument("initial parameters outside prior support");
  state_.loglik = simulate_loglik(init, state_.nus, state_.traj);

  const int d = space_.dim();
  S_ = Eigen::MatrixXd::Identity(d, d) * prop_.init_scale;
  if (d > 0) llt_.compute(S_ * S_.transpose());
  for (int c = 0; c < model_.dim; ++c) ic_comps_.push_back(c);
}

double Sampler::simulate_loglik(const Params& p, std::vector<PoissonMeasure>& nus,
                                Trajectory& traj_out) {
  try {
    traj_out = approximate_ ? simulate_approx(model_, p, nus)
                            : simulate_exact(model_, p, nus);
  } catch (const SimulationError&) {
    ++sim_errors_;
    return kNegInf;
  }
  return total_loglik(model_, traj_out, data_, p);
}

std::vector<PoissonMeasure> Sampler::propose_measures(bool full_redraw) {
  const int cols = grid_->column_count();
  std::vector<PoissonMeasure> out;
  out.reserve(state_.nus.size());
  if (full_redraw) {
    col_scratch_.resize(cols);
    std::iota(col_scratch_.begin(), col_scratch_.end(), 0);
    for (auto& nu : state_.nus) out.push_back(nu.redraw_columns(col_scratch_, rng_));
    return out;
  }
  int n_red = static_cast<int>(std::ceil(prop_.f_nu * cols));
  n_red = std::clamp(n_red, 1, cols);
  for (auto& nu : state_.nus) {
    col_scratch_.resize(cols);
    std::iota(col_scratch_.begin(), col_scratch_.end(), 0);
    for (int j = 0; j < n_red; ++j) {
      std::uniform_int_distribution<int> pick(j, cols - 1);
      std::swap(col_scratch_[j], col_scratch_[pick(rng_)]);
    }
    out.push_back(
        nu.redraw_columns(std::span<const int>(col_scratch_.data(), n_red), rng_));
  }
  return out;
}

void Sampler::adapt(const Eigen::VectorXd& z, double alpha) {
  const double nz = z.norm();
  if (nz == 0.0) return;
  const int d = space_.dim();
  const double gamma =
      std::min(1.0, d * std::pow(static_cast<double>(state_.iter), -2.0 / 3.0));
  const double sigma = gamma * (alpha - prop_.target_accept);
  if (sigma == 0.0) return;
  Eigen::VectorXd v = (S_ * z) / nz;
  llt_.rankUpdate(v, sigma);
  if (llt_.info() != Eigen::Success) {
    // Downdate broke positive-definiteness; fall back to the last good factor.
    adapt_reset_ = true;
    llt_.compute(S_ * S_.transpose());
    return;
  }
  S_ = llt_.matrixL();
}

bool Sampler::step() {
  ++state_.iter;
  const bool warm = state_.iter <= prop_.warmup;
  const int d = space_.dim();

  Params cand = state_.params;
  Eigen::VectorXd z(d);
  if (d > 0) {
    std::normal_distribution<double> gauss;
    for (int i = 0; i < d; ++i) z[i] = gauss(rng_);
    const Eigen::VectorXd delta = S_ * z;
    for (int i = 0; i < d; ++i) *param_field(cand, space_.names[i]) += delta[i];
  }
  if (space_.sample_ics && ic_comps_.size() >= 2) {
    // Move one host between two distinct compartments: symmetric on the
    // fixed-N0 lattice; a depleted source lands outside the prior support.
    const int nc = static_cast<int>(ic_comps_.size());
    std::uniform_int_distribution<int> pick(0, nc * (nc - 1) - 1);
    const int code = pick(rng_);
    const int from = code / (nc - 1);
    const int rem = code % (nc - 1);
    const int to = rem >= from ? rem + 1 : rem;
    *ic_field(cand, model_.comp_names[ic_comps_[from]]) -= 1;
    *ic_field(cand, model_.comp_names[ic_comps_[to]]) += 1;
  }

  const double lp = log_prior(cand, space_);
  double alpha = 0.0;
  bool accept = false;
  if (lp != kNegInf) {
    auto nus = propose_measures(warm);
    Trajectory traj;
    const double ll = simulate_loglik(cand, nus, traj);
    const double la = log_accept_ratio(state_.loglik, state_.logprior, ll, lp);
    alpha = la >= 0.0 ? 1.0 : std::exp(la);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng_) < alpha) {
      state_.params = cand;
      state_.nus = std::move(nus);
      state_.traj = std::move(traj);
      state_.loglik = ll;
      state_.logprior = lp;
      accept = true;
      ++accepted_;
    }
  }
  last_alpha_ = alpha;
  if (d > 0 && state_.iter <= prop_.adapt_iters) adapt(z, alpha);
  return accept;
}

namespace {

std::vector<double> merged_obs_times(const std::vector<Dataset>& data) {
  std::set<double> times;
  for (const Dataset& d : data)
    for (double t : d.times) times.insert(t);
  return {times.begin(), times.end()};
}

std::vector<std::vector<double>> density_caps(const ModelSpec& model, const ChainState& st,
                                              const GridSpec& grid,
                                              const TimeSlices& slices) {
  // One cap per (event, slice), from the rate peaks of the current trajectory
  // within that slice. A single horizon-wide cap would dilute the density in
  // low-rate periods by the dead area between the local rate and the global
  // peak, hiding exactly the deviations the residuals are meant to expose.
  const int ns = slices.count();
  std::vector<double> lo(ns), hi(ns);
  for (int s = 0; s < ns; ++s) {
    lo[s] = grid.t_lo(slices.col_edges[s]);
    hi[s] = grid.t_hi(slices.col_edges[s + 1] - 1);
  }
  std::vector<std::vector<double>> caps(model.event_count(), std::vector<double>(ns, 0.0));
  int cursor = 0;
  auto visit = [&](const State& x, double ta, double tb) {
    if (ta >= tb) return;
    while (cursor < ns && hi[cursor] <= ta) ++cursor;
    for (int s = cursor; s < ns && lo[s] < tb; ++s) {
      const double a = std::max(ta, lo[s]);
      const double b = std::min(tb, hi[s]);
      for (int k = 0; k < model.event_count(); ++k) {
        const auto& ev = model.events[k];
        // endpoint probes; within a slice the seasonal variation is tiny
        const double r = std::max(ev.rate(x, a, st.params), ev.rate(x, b, st.params));
        if (r > caps[k][s]) caps[k][s] = r;
      }
    }
  };
  State x = st.traj.initial_state();
  double t = 0.0;
  for (const JumpRecord& j : st.traj.jumps()) {
    visit(x, t, j.t);
    x = j.state_after;
    t = j.t;
  }
  visit(x, t, grid.horizon());
  for (auto& row : caps)
    for (double& c : row) c = grid.round_up_to_level(c);
  return caps;
}

}  // namespace

ChainOutput run_chain(const ModelSpec& model, GridPtr grid,
                      const std::vector<Dataset>& data, const Params& init,
                      const ParamSpace& space, const ProposalConfig& proposal,
                      const RunSettings& run, std::uint64_t seed) {
  const auto t_start = std::chrono::steady_clock::now();
  Sampler sampler(model, grid, data, init, space, proposal, run.approximate, seed);

  ChainOutput out;
  out.n_iter = run.n_iter;
  out.adapt_iters = proposal.adapt_iters;
  out.stride = std::max<long>(1, run.stride);
  out.names = space.names;
  if (space.sample_ics)
    for (const std::string& c : model.comp_names) {
      std::string n = c + "0";
      n[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(n[0])));
      out.names.push_back(n);
    }
  out.obs_times = merged_obs_times(data);
  out.slices = make_slices(*grid, std::max(run.slice_width, 0.0));
  for (int j = 0; j < out.slices.count(); ++j) {
    out.slice_t_lo.push_back(grid->t_edges()[out.slices.col_edges[j]]);
    out.slice_t_hi.push_back(grid->t_edges()[out.slices.col_edges[j + 1]]);
  }

  const long total = proposal.adapt_iters + run.n_iter;
  out.total = total;
  const long tick = run.progress ? std::max<long>(1, total / 20) : 0;
  auto progress = [&](long g) {
    if (!tick || g % tick != 0) return;
    *run.progress << "iter " << g << "/" << total << " accepted "
                  << sampler.accepted() << " sim-errors " << sampler.sim_errors()
                  << (g <= proposal.adapt_iters ? " (adapting)" : "") << "\n";
  };

  for (long g = 1; g <= proposal.adapt_iters; ++g) {
    out.accept_total += sampler.step();
    progress(g);
  }
  out.caps = density_caps(sampler.model(), sampler.state(), *grid, out.slices);

  const long retained = run.n_iter / out.stride;
  out.samples.reserve(retained);
  out.nu_counts.reserve(retained);
  for (long l = 1; l <= run.n_iter; ++l) {
    const bool acc = sampler.step();
    out.accept_total += acc;
    out.accept_sampling += acc;
    if (l % out.stride == 0) {
      const ChainState& st = sampler.state();
      std::vector<double> row;
      row.reserve(out.names.size());
      for (const std::string& n : space.names) row.push_back(param_value(st.params, n));
      if (space.sample_ics) {
        Params p = st.params;
        for (const std::string& c : model.comp_names)
          row.push_back(static_cast<double>(*ic_field(p, c)));
      }
      out.samples.push_back(std::move(row));
      out.iters.push_back(l);
      out.loglik.push_back(st.loglik);
      out.logprior.push_back(st.logprior);

      std::vector<std::vector<std::int64_t>> per_event;
      per_event.reserve(st.nus.size());
      auto& nus = sampler.state().nus;
      for (std::size_t k = 0; k < nus.size(); ++k)
        per_event.push_back(slice_counts_below(nus[k], out.slices, out.caps[k]));
      out.nu_counts.push_back(std::move(per_event));
      out.traj_at_obs.push_back(st.traj.states_at(out.obs_times));
    }
    progress(proposal.adapt_iters + l);
  }

  out.sim_errors = sampler.sim_errors();
  out.adapt_reset = sampler.adapt_reset();
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace prmmc
