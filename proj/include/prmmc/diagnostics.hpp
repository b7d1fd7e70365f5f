#ifndef PRMMC_DIAGNOSTICS_HPP
#define PRMMC_DIAGNOSTICS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "prmmc/model.hpp"

namespace prmmc {

/// Multivariate effective sample size n (|Lambda|/|Sigma|)^(1/p).
/// Determinants are kept in log space (p can reach dozens of dimensions, so
/// raw determinants under/overflow doubles).
struct EssReport {
  long n = 0;
  int p = 0;
  double log_det_lambda = 0.0;  // sample covariance
  double log_det_sigma = 0.0;   // batch-means covariance
  double mess = 0.0;
  bool degenerate = false;      // a covariance was rank-deficient;
                                // log-dets are then pseudo-determinants
  double wall_seconds = -1.0;
  double seconds_per_ess = -1.0;
};

/// Batch size floor(sqrt(n)); throws std::domain_error with fewer than two
/// complete batches. Pass wall_seconds >= 0 to get time per effective sample.
EssReport mess(const Eigen::MatrixXd& chain, double wall_seconds = -1.0);

/// Chain embedding for complexity measurements: one column for beta, two
/// free initial-condition coordinates, then (S, I) at each datapoint; R is
/// determined by the simplex constraint and excluded. p = 3 + 2m.
Eigen::MatrixXd embed_chain_for_mess(const std::vector<double>& beta,
                                     const std::vector<std::array<double, 2>>& free_ics,
                                     const std::vector<std::vector<State>>& at_datapoints,
                                     int comp_s, int comp_i);

struct AcfResult {
  std::vector<double> corr;  // lag 0..max_lag; corr[0] = 1
  bool zero_variance = false;
};

/// Biased autocorrelation estimator.
AcfResult acf(const std::vector<double>& series, int max_lag);

/// Per-slice posterior summary of latent point densities; flags mark
/// slices whose mean leaves the prior value 1 by more than 3 sd.
struct ResidualSummary {
  int event = 0;
  std::vector<double> t_lo, t_hi;
  std::vector<double> mean;
  std::vector<double> sd;     // sample sd across posterior draws
  std::vector<int> flag;      // +1 high, -1 low, 0 inside the band
  AcfResult acf_of_mean;
};

/// densities: one row per posterior sample, one column per slice.
ResidualSummary residual_summary(const std::vector<std::vector<double>>& densities,
                                 const std::vector<double>& t_lo,
                                 const std::vector<double>& t_hi, int event,
                                 int max_lag);

/// OLS slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace prmmc

#endif
