#ifndef PRMMC_MCMC_HPP
#define PRMMC_MCMC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "prmmc/measure.hpp"
#include "prmmc/model.hpp"
#include "prmmc/observation.hpp"
#include "prmmc/prior.hpp"
#include "prmmc/simulate.hpp"
#include "prmmc/trajectory.hpp"

namespace prmmc {

struct ChainState {
  Params params;
  std::vector<PoissonMeasure> nus;
  Trajectory traj;  // always simulate(model, params, nus)
  double loglik = 0.0;
  double logprior = 0.0;
  long iter = 0;
};

struct ProposalConfig {
  double f_nu = 0.05;      // fraction of time columns redrawn per event
  long warmup = 100;       // initial iterations with full-prior redraw
  long adapt_iters = 200000;
  double target_accept = 0.234;
  double init_scale = 0.1;  // initial proposal sd per coordinate
};

struct ChainOutput {
  std::vector<std::string> names;  // sample columns
  std::vector<long> iters;         // sampling-phase index per retained row
  std::vector<std::vector<double>> samples;
  std::vector<double> loglik;
  std::vector<double> logprior;

  long n_iter = 0;
  long adapt_iters = 0;
  long stride = 1;
  long accept_sampling = 0;
  long accept_total = 0;
  long total = 0;
  long sim_errors = 0;
  bool adapt_reset = false;
  double wall_seconds = 0.0;

  // Latent-measure summaries: per retained sample, per event, point counts
  // per time slice below that slice's density cap. Caps are local so that
  // low-rate periods are not buried under the dead area below a global peak.
  TimeSlices slices;
  std::vector<double> slice_t_lo, slice_t_hi;
  std::vector<std::vector<double>> caps;  // [event][slice]
  std::vector<std::vector<std::vector<std::int64_t>>> nu_counts;

  // Trajectory values at the observation times, per retained sample.
  std::vector<double> obs_times;
  std::vector<std::vector<State>> traj_at_obs;
};

/// min(1, exp(.)) exponent of the joint move: the latent-measure proposal is
/// reversible with respect to the PRM prior, so only likelihood and prior
/// terms remain.
double log_accept_ratio(double cur_loglik, double cur_logprior, double prop_loglik,
                        double prop_logprior);

/// One MH chain over (theta, nu). Proposes jointly each iteration: a
/// Gaussian walk on the continuous parameters (robust adaptive Metropolis
/// factor), optionally one host moved between two compartments of the
/// initial condition, and a fresh prior redraw of a random column subset of
/// each event's measure (all columns during warm-up).
class Sampler {
 public:
  Sampler(ModelSpec model, GridPtr grid, std::vector<Dataset> data, Params init,
          ParamSpace space, ProposalConfig proposal, bool approximate,
          std::uint64_t seed);

  /// One step; true iff the proposal was accepted.
  bool step();

  ChainState& state() { return state_; }
  const ChainState& state() const { return state_; }
  const ModelSpec& model() const { return model_; }
  const ParamSpace& space() const { return space_; }

  long iterations() const { return state_.iter; }
  long accepted() const { return accepted_; }
  long sim_errors() const { return sim_errors_; }
  bool adapt_reset() const { return adapt_reset_; }
  double last_alpha() const { return last_alpha_; }
  const Eigen::MatrixXd& proposal_factor() const { return S_; }

 private:
  std::vector<PoissonMeasure> propose_measures(bool full_redraw);
  double simulate_loglik(const Params& p, std::vector<PoissonMeasure>& nus,
                         Trajectory& traj_out);
  void adapt(const Eigen::VectorXd& z, double alpha);

  ModelSpec model_;
  GridPtr grid_;
  std::vector<Dataset> data_;
  ParamSpace space_;
  ProposalConfig prop_;
  bool approximate_;
  Rng rng_;

  ChainState state_;
  Eigen::MatrixXd S_;  // lower-triangular proposal factor
  Eigen::LLT<Eigen::MatrixXd> llt_;
  std::vector<int> ic_comps_;
  long accepted_ = 0;
  long sim_errors_ = 0;
  bool adapt_reset_ = false;
  double last_alpha_ = 0.0;
  std::vector<int> col_scratch_;
};

struct RunSettings {
  long n_iter = 0;
  long stride = 1;
  bool approximate = false;
  double slice_width = 0.0;     // 0 = one slice per column
  std::ostream* progress = nullptr;
};

/// Adaptation phase (unretained) followed by n_iter sampling iterations,
/// retaining every stride-th state. Density caps are frozen at the sampling
/// start from the per-slice rate peaks along the current trajectory.
ChainOutput run_chain(const ModelSpec& model, GridPtr grid,
                      const std::vector<Dataset>& data, const Params& init,
                      const ParamSpace& space, const ProposalConfig& proposal,
                      const RunSettings& run, std::uint64_t seed);

}  // namespace prmmc

#endif
