#ifndef PRMMC_SIMULATE_HPP
#define PRMMC_SIMULATE_HPP

#include <stdexcept>
#include <vector>

#include "prmmc/measure.hpp"
#include "prmmc/model.hpp"
#include "prmmc/trajectory.hpp"

namespace prmmc {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact path of the jump process driven by one PRM per event: a point
/// (t, u) of measure k fires iff u <= rate_k(X_{t-}, t). Levels of the
/// rate ladder are activated lazily from the per-interval rate bounds, so
/// only the region of each measure that can matter is ever materialized.
///
/// `measures[k]` must be the measure for event k; all must share one grid.
Trajectory simulate_exact(const ModelSpec& model, const Params& params,
                          std::vector<PoissonMeasure>& measures);

/// Frozen-rate approximation on the same driving noise: rates are held at
/// their value at each column's start, the points below them are counted in
/// bulk, and the jumps are applied together at the column's end. Batches
/// that would push a compartment negative are truncated (trajectory is
/// flagged `clamped`). Converges to the exact path as columns shrink.
Trajectory simulate_approx(const ModelSpec& model, const Params& params,
                           std::vector<PoissonMeasure>& measures);

}  // namespace prmmc

#endif
