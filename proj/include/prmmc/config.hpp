#ifndef PRMMC_CONFIG_HPP
#define PRMMC_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "prmmc/mcmc.hpp"
#include "prmmc/model.hpp"
#include "prmmc/observation.hpp"
#include "prmmc/prior.hpp"

namespace prmmc {

/// Configuration or input-file problem; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataRef {
  DataKind kind = DataKind::incidence;
  std::string path;           // incidence/prevalence CSV
  std::int64_t n_sero = 0;    // seroprevalence inline fields
  std::int64_t positives = 0;
  double t_obs = 0.0;
};

struct SimulateOpts {
  std::vector<DataKind> emit;       // observation files to sample and write
  std::string rows = "jumps";       // trajectory.csv granularity: jumps | observations
  std::int64_t sero_n = 196;
  double sero_t = 0.0;              // 0 → horizon
};

struct DiagnoseOpts {
  std::string chain_dir;            // default: out_dir
  bool residuals = true;
  int max_lag = 0;                  // 0 → half the slice count
  std::string beta = "beta_m";      // embedding columns
  std::vector<std::string> free_ics = {"s0", "i0"};
};

struct BenchmarkOpts {
  std::vector<std::int64_t> sizes;  // population sizes N
  bool compare_simulators = false;
};

struct RunConfig {
  ModelOptions model;
  Params params;
  ParamSpace space;

  double horizon = 0.0;
  double obs_interval = 10.0;
  double column_width = 0.0;  // 0 → obs_interval / 10
  double u_base = 1.0;

  ProposalConfig proposal;
  bool approximate = false;
  long n_iter = 0;
  long stride = 1;
  double slice_width = 0.0;   // ν summary slices; 0 → one column per slice

  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = ".";
  int chains = 1;

  std::vector<DataRef> data;
  SimulateOpts simulate;
  DiagnoseOpts diagnose;
  BenchmarkOpts benchmark;

  double resolved_column_width() const {
    return column_width > 0.0 ? column_width : obs_interval / 10.0;
  }
};

/// Parse + validate; throws ConfigError naming the offending key.
RunConfig load_config(const std::string& path);

/// Writes the fully-resolved configuration (defaults expanded) as JSON.
void echo_config(const RunConfig& cfg, const std::string& path);

GridPtr make_grid(const RunConfig& cfg);
ModelSpec make_model(const RunConfig& cfg);

/// Reads CSV-backed datasets and materializes inline seroprevalence refs.
std::vector<Dataset> load_datasets(const RunConfig& cfg);

}  // namespace prmmc

#endif
