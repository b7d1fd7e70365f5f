#ifndef PRMMC_OBSERVATION_HPP
#define PRMMC_OBSERVATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prmmc/model.hpp"
#include "prmmc/trajectory.hpp"

namespace prmmc {

enum class DataKind { incidence, prevalence, seroprevalence };

struct Dataset {
  DataKind kind = DataKind::incidence;
  std::vector<double> times;        // strictly increasing, within [0, T]
  std::vector<std::int64_t> counts; // observed counts; positives for sero
  std::int64_t n_sero = 0;          // seroprevalence sample size

  void validate(double horizon) const;
};

std::string to_string(DataKind kind);
DataKind data_kind_from_string(const std::string& s);

/// Case increments of the thinned counter over (t_{i-1}, t_i], t_0 = 0.
std::vector<std::int64_t> case_increments(const Trajectory& traj,
                                          const std::vector<double>& times,
                                          int counter = kCasesCounter);

/// Negative binomial (mean/dispersion form) incidence likelihood:
/// y_i ~ NB(mean ΔC_i, var ΔC_i + ΔC_i^2/psi). A zero-mean interval scores
/// 0 when y_i = 0 and -inf otherwise.
double loglik_incidence(const Trajectory& traj, const Dataset& data, double psi);

/// y_i ~ Binomial(I(t_i), rho).
double loglik_prevalence(const ModelSpec& model, const Trajectory& traj,
                         const Dataset& data, double rho);

/// positives ~ Binomial(n_sero, R(t_obs)/N(t_obs)).
double loglik_seroprevalence(const ModelSpec& model, const Trajectory& traj,
                             std::int64_t n_sero, std::int64_t positives,
                             double t_obs);

double loglik(const ModelSpec& model, const Trajectory& traj, const Dataset& data,
              const Params& params);

/// Independent components sum.
double total_loglik(const ModelSpec& model, const Trajectory& traj,
                    std::span<const Dataset> datasets, const Params& params);

double nb2_logpmf(std::int64_t y, double mu, double psi);
double binom_logpmf(std::int64_t k, std::int64_t n, double p);

}  // namespace prmmc

#endif
