#ifndef PRMMC_CSV_HPP
#define PRMMC_CSV_HPP

#include <string>
#include <vector>

#include "prmmc/diagnostics.hpp"
#include "prmmc/mcmc.hpp"
#include "prmmc/measure.hpp"
#include "prmmc/model.hpp"
#include "prmmc/observation.hpp"
#include "prmmc/trajectory.hpp"

namespace prmmc {

/// All writers use round-trip-exact float formatting; readers enforce the
/// exact header they expect and throw std::runtime_error with the file and
/// line on malformed input.

void write_trajectory_csv(const std::string& path, const ModelSpec& model,
                          const Trajectory& traj);
void write_trajectory_at_csv(const std::string& path, const ModelSpec& model,
                             const Trajectory& traj, const std::vector<double>& times);

void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path, DataKind kind);

void write_chain_csv(const std::string& path, const ChainOutput& out);

struct ChainCsv {
  std::vector<std::string> names;
  std::vector<long> iters;
  std::vector<double> logpost;
  std::vector<double> loglik;
  std::vector<std::vector<double>> samples;

  std::vector<double> column(const std::string& name) const;
};
ChainCsv read_chain_csv(const std::string& path);

void write_nu_counts_csv(const std::string& path, const ChainOutput& out);

/// Slice densities reconstructed from a counts file: density[event][sample][slice].
struct NuDensities {
  std::vector<double> t_lo, t_hi;
  std::vector<std::vector<double>> caps;  // [event][slice]
  std::vector<std::vector<std::vector<double>>> density;
};
NuDensities read_nu_counts_csv(const std::string& path);

void write_traj_obs_csv(const std::string& path, const ModelSpec& model,
                        const ChainOutput& out);

struct TrajObsCsv {
  std::vector<std::string> comp_names;
  std::vector<double> times;
  std::vector<std::vector<State>> states;  // [sample][time index]
};
TrajObsCsv read_traj_obs_csv(const std::string& path);

void write_measure_records_csv(const std::string& path,
                               const std::vector<MeasureRecord>& records);
std::vector<MeasureRecord> read_measure_records_csv(const std::string& path);

void write_residual_csv(const std::string& path,
                        const std::vector<ResidualSummary>& summaries);
void write_acf_csv(const std::string& path,
                   const std::vector<std::pair<int, AcfResult>>& per_event);
void write_ess_json(const std::string& path, const EssReport& report);

}  // namespace prmmc

#endif
