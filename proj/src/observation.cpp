#include "prmmc/observation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace prmmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void Dataset::validate(double horizon) const {
  if (times.size() != counts.size())
    throw std::domain_error("dataset times/counts length mismatch");
  if (times.empty()) throw std::domain_error("empty dataset");
  double prev = -1.0;
  for (double t : times) {
    if (!(t >= 0.0 && t <= horizon))
      throw std::domain_error("observation time outside [0, horizon]");
    if (t <= prev) throw std::domain_error("observation times not increasing");
    prev = t;
  }
  for (auto y : counts)
    if (y < 0) throw std::domain_error("negative observed count");
  if (kind == DataKind::seroprevalence) {
    if (times.size() != 1)
      throw std::domain_error("seroprevalence expects a single observation");
    if (n_sero <= 0 || counts[0] > n_sero)
      throw std::domain_error("seroprevalence counts exceed sample size");
  }
}

std::string to_string(DataKind kind) {
  switch (kind) {
    case DataKind::incidence: return "incidence";
    case DataKind::prevalence: return "prevalence";
    case DataKind::seroprevalence: return "seroprevalence";
  }
  return "?";
}

DataKind data_kind_from_string(const std::string& s) {
  if (s == "incidence") return DataKind::incidence;
  if (s == "prevalence") return DataKind::prevalence;
  if (s == "seroprevalence") return DataKind::seroprevalence;
  throw std::domain_error("unknown observation kind: " + s);
}

std::vector<std::int64_t> case_increments(const Trajectory& traj,
                                          const std::vector<double>& times,
                                          int counter) {
  auto snaps = traj.counters_at(times);
  std::vector<std::int64_t> inc(times.size());
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    inc[i] = snaps[i][counter] - prev;
    prev = snaps[i][counter];
  }
  return inc;
}

double nb2_logpmf(std::int64_t y, double mu, double psi) {
  if (psi <= 0.0) throw std::domain_error("dispersion must be positive");
  if (mu < 0.0 || y < 0) return kNegInf;
  if (mu == 0.0) return y == 0 ? 0.0 : kNegInf;
  const double yd = static_cast<double>(y);
  return std::lgamma(yd + psi) - std::lgamma(psi) - std::lgamma(yd + 1.0) +
         psi * std::log(psi / (psi + mu)) + yd * std::log(mu / (psi + mu));
}

double binom_logpmf(std::int64_t k, std::int64_t n, double p) {
  if (k < 0 || k > n) return kNegInf;
  if (p < 0.0 || p > 1.0) throw std::domain_error("probability outside [0,1]");
  if (p == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (p == 1.0) return k == n ? 0.0 : kNegInf;
  const double nd = static_cast<double>(n), kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
         kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

double loglik_incidence(const Trajectory& traj, const Dataset& data, double psi) {
  data.validate(traj.horizon());
  const auto inc = case_increments(traj, data.times);
  double ll = 0.0;
  for (std::size_t i = 0; i < inc.size(); ++i) {
    ll += nb2_logpmf(data.counts[i], static_cast<double>(inc[i]), psi);
    if (ll == kNegInf) return kNegInf;
  }
  return ll;
}

double loglik_prevalence(const ModelSpec& model, const Trajectory& traj,
                         const Dataset& data, double rho) {
  data.validate(traj.horizon());
  const int iI = model.comp_index("I");
  if (iI < 0) throw std::domain_error("model has no I compartment");
  const auto states = traj.states_at(data.times);
  double ll = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    ll += binom_logpmf(data.counts[i], states[i][iI], rho);
    if (ll == kNegInf) return kNegInf;
  }
  return ll;
}

double loglik_seroprevalence(const ModelSpec& model, const Trajectory& traj,
                             std::int64_t n_sero, std::int64_t positives,
                             double t_obs) {
  if (positives < 0 || positives > n_sero)
    throw std::domain_error("positives outside [0, n_sero]");
  const int iR = model.comp_index("R");
  if (iR < 0) throw std::domain_error("model has no R compartment");
  const State s = traj.state_at(t_obs);
  std::int64_t n = 0;
  for (int c = 0; c < model.dim; ++c) n += s[c];
  if (n == 0) throw std::domain_error("population extinct at seroprevalence time");
  const double p = static_cast<double>(s[iR]) / static_cast<double>(n);
  return binom_logpmf(positives, n_sero, p);
}

double loglik(const ModelSpec& model, const Trajectory& traj, const Dataset& data,
              const Params& params) {
  switch (data.kind) {
    case DataKind::incidence:
      return loglik_incidence(traj, data, params.psi);
    case DataKind::prevalence:
      return loglik_prevalence(model, traj, data, params.rho);
    case DataKind::seroprevalence:
      return loglik_seroprevalence(model, traj, data.n_sero, data.counts[0],
                                   data.times[0]);
  }
  throw std::domain_error("unknown dataset kind");
}

double total_loglik(const ModelSpec& model, const Trajectory& traj,
                    std::span<const Dataset> datasets, const Params& params) {
  double ll = 0.0;
  for (const Dataset& d : datasets) {
    ll += loglik(model, traj, d, params);
    if (ll == kNegInf) return kNegInf;
  }
  return ll;
}

}  // namespace prmmc
