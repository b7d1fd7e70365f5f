#ifndef PRMMC_MODEL_HPP
#define PRMMC_MODEL_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace prmmc {

inline constexpr int kMaxComp = 6;
inline constexpr int kMaxCounters = 2;

/// Counter slots every builder wires: all accepted infections, and the
/// rho-thinned reported cases.
inline constexpr int kInfectionsCounter = 0;
inline constexpr int kCasesCounter = 1;

/// Compartment counts; only the first `dim` entries of a model are live.
using State = std::array<std::int64_t, kMaxComp>;
using Counters = std::array<std::int64_t, kMaxCounters>;

/// Model parameters. Rates are per unit time; initial counts are hosts.
struct Params {
  double beta_m = 0.0;   // mean effective contact rate
  double beta_v = 0.0;   // seasonal amplitude, dimensionless in [0,1)
  double phase = 0.0;    // seasonal phase, radians
  double sigma = 0.0;    // exit rate from the exposed class
  double gamma = 0.0;    // recovery rate
  double omega = 0.0;    // immunity loss rate
  double birth = 0.0;    // per-capita birth rate
  double death = 0.0;    // per-capita death rate
  double eta = 0.0;      // immigration rate of infecteds
  double rho = 1.0;      // reporting probability
  double psi = 10.0;     // negative-binomial dispersion
  std::int64_t s0 = 0, e0 = 0, i0 = 0, r0 = 0;

  std::int64_t n0() const { return s0 + e0 + i0 + r0; }
};

using RateFn = std::function<double(const State&, double, const Params&)>;
/// Upper bound of the rate over a time interval at fixed state.
using BoundFn = std::function<double(const State&, double, double, const Params&)>;

struct EventSpec {
  std::string name;
  int measure_index = 0;
  State increment{};
  RateFn rate;
  BoundFn bound;
};

/// An observation counter driven by one event's PRM: a point accepted for
/// the event also increments the counter iff u <= report_prob * rate.
struct CounterSpec {
  std::string name;
  int event = 0;
  std::function<double(const Params&)> report_prob;
};

struct ModelSpec {
  int dim = 0;
  std::vector<std::string> comp_names;
  std::vector<EventSpec> events;
  std::vector<CounterSpec> counters;

  int event_count() const { return static_cast<int>(events.size()); }
  int counter_count() const { return static_cast<int>(counters.size()); }

  State initial_state(const Params& p) const;
  int comp_index(const std::string& name) const;

  /// All K event rates at (state, t); negative input compartments and
  /// non-finite rates are domain errors.
  std::vector<double> rate_vector(const State& state, double t, const Params& p) const;
};

struct ModelOptions {
  std::string kind = "sir";  // sir | seir | seirs
  bool seasonal = false;
  bool vitality = false;
  bool immigration = false;
  double season_period = 365.0;
};

ModelSpec build_model(const ModelOptions& options);
ModelSpec build_sir();
ModelSpec build_seirs(bool seasonal, bool vitality, bool immigration,
                      double season_period = 365.0);

/// beta(t) = beta_m * (1 + beta_v * sin(2 pi t / period + phase)).
double seasonal_beta(double t, const Params& p, double period);
/// sup of beta over [ta, tb] at fixed params.
double seasonal_beta_max(double ta, double tb, const Params& p, double period);

}  // namespace prmmc

#endif
