#ifndef PRMMC_COMMANDS_HPP
#define PRMMC_COMMANDS_HPP

#include "prmmc/config.hpp"

namespace prmmc {

/// Subcommand bodies. Each writes its outputs plus the fully-resolved config
/// into cfg.out_dir. All of them are deterministic in (config, inputs, seed);
/// cmd_benchmark's timing columns are the one necessarily impure output.
void cmd_simulate(const RunConfig& cfg);
void cmd_infer(const RunConfig& cfg);
void cmd_diagnose(const RunConfig& cfg);
void cmd_benchmark(const RunConfig& cfg);

}  // namespace prmmc

#endif
