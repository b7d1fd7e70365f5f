#include "prmmc/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace prmmc {

namespace {

double live_total(const State& s, int dim) {
  std::int64_t n = 0;
  for (int c = 0; c < dim; ++c) n += s[c];
  return static_cast<double>(n);
}

/// sup of sin(x) for x in [a, b].
double sin_sup(double a, double b) {
  if (b - a >= 2.0 * std::numbers::pi) return 1.0;
  const double half_pi = 0.5 * std::numbers::pi;
  const double k = std::ceil((a - half_pi) / (2.0 * std::numbers::pi));
  if (half_pi + k * 2.0 * std::numbers::pi <= b) return 1.0;
  return std::max(std::sin(a), std::sin(b));
}

}  // namespace

double seasonal_beta(double t, const Params& p, double period) {
  const double arg = 2.0 * std::numbers::pi * t / period + p.phase;
  return p.beta_m * (1.0 + p.beta_v * std::sin(arg));
}

double seasonal_beta_max(double ta, double tb, const Params& p, double period) {
  const double w = 2.0 * std::numbers::pi / period;
  return p.beta_m * (1.0 + p.beta_v * sin_sup(w * ta + p.phase, w * tb + p.phase));
}

State ModelSpec::initial_state(const Params& p) const {
  State s{};
  for (int c = 0; c < dim; ++c) {
    const std::string& name = comp_names[c];
    if (name == "S") s[c] = p.s0;
    else if (name == "E") s[c] = p.e0;
    else if (name == "I") s[c] = p.i0;
    else if (name == "R") s[c] = p.r0;
  }
  return s;
}

int ModelSpec::comp_index(const std::string& name) const {
  for (int c = 0; c < dim; ++c)
    if (comp_names[c] == name) return c;
  return -1;
}

std::vector<double> ModelSpec::rate_vector(const State& state, double t,
                                           const Params& p) const {
  for (int c = 0; c < dim; ++c)
    if (state[c] < 0) throw std::domain_error("negative compartment count");
  std::vector<double> r(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    const double v = events[k].rate(state, t, p);
    if (!std::isfinite(v) || v < 0.0)
      throw std::domain_error("invalid rate for event " + events[k].name);
    r[k] = v;
  }
  return r;
}

ModelSpec build_model(const ModelOptions& options) {
  const bool exposed = options.kind == "seir" || options.kind == "seirs";
  const bool waning = options.kind == "seirs";
  if (!exposed && options.kind != "sir")
    throw std::invalid_argument("unknown model kind: " + options.kind);

  ModelSpec m;
  m.comp_names = exposed ? std::vector<std::string>{"S", "E", "I", "R"}
                         : std::vector<std::string>{"S", "I", "R"};
  m.dim = static_cast<int>(m.comp_names.size());

  const int iS = 0;
  const int iE = exposed ? 1 : -1;
  const int iI = exposed ? 2 : 1;
  const int iR = exposed ? 3 : 2;
  const int dim = m.dim;
  const bool seas = options.seasonal;
  const double period = options.season_period;

  auto add = [&m](std::string name, std::initializer_list<std::pair<int, int>> delta,
                  RateFn rate, BoundFn bound) {
    EventSpec e;
    e.name = std::move(name);
    e.measure_index = static_cast<int>(m.events.size());
    for (auto [c, d] : delta) e.increment[c] = d;
    e.rate = std::move(rate);
    e.bound = std::move(bound);
    m.events.push_back(std::move(e));
  };

  // Thinning identity lambda(s,t) = beta(t) S I / N; the bound freezes the
  // state factor and takes the interval sup of beta.
  auto foi = [=](const State& s, double t, const Params& p) {
    const double n = live_total(s, dim);
    if (n <= 0.0) return 0.0;
    const double beta = seas ? seasonal_beta(t, p, period) : p.beta_m;
    return beta * static_cast<double>(s[iS]) * static_cast<double>(s[iI]) / n;
  };
  auto foi_bound = [=](const State& s, double ta, double tb, const Params& p) {
    const double n = live_total(s, dim);
    if (n <= 0.0) return 0.0;
    const double beta = seas ? seasonal_beta_max(ta, tb, p, period) : p.beta_m;
    return beta * static_cast<double>(s[iS]) * static_cast<double>(s[iI]) / n;
  };
  // Rates linear in one compartment are constant over time at fixed state.
  auto linear = [](int comp, double Params::*coef) {
    RateFn r = [comp, coef](const State& s, double, const Params& p) {
      return p.*coef * static_cast<double>(s[comp]);
    };
    BoundFn b = [comp, coef](const State& s, double, double, const Params& p) {
      return p.*coef * static_cast<double>(s[comp]);
    };
    return std::pair{r, b};
  };

  const int infect_target = exposed ? iE : iI;
  add("infection", {{iS, -1}, {infect_target, +1}}, foi, foi_bound);
  if (exposed) {
    auto [r, b] = linear(iE, &Params::sigma);
    add("progression", {{iE, -1}, {iI, +1}}, r, b);
  }
  {
    auto [r, b] = linear(iI, &Params::gamma);
    add("recovery", {{iI, -1}, {iR, +1}}, r, b);
  }
  if (waning) {
    auto [r, b] = linear(iR, &Params::omega);
    add("waning", {{iR, -1}, {iS, +1}}, r, b);
  }
  if (options.vitality) {
    auto birth = [](const State&, double, const Params& p) {
      return p.birth * static_cast<double>(p.n0());
    };
    add("birth", {{iS, +1}}, birth,
        [birth](const State& s, double, double, const Params& p) { return birth(s, 0.0, p); });
    for (int c = 0; c < dim; ++c) {
      auto [r, b] = linear(c, &Params::death);
      add("death_" + m.comp_names[c], {{c, -1}}, r, b);
    }
  }
  if (options.immigration) {
    auto imp = [](const State&, double, const Params& p) { return p.eta; };
    add("import", {{iI, +1}}, imp,
        [](const State&, double, double, const Params& p) { return p.eta; });
  }

  m.counters.push_back({"infections", 0, [](const Params&) { return 1.0; }});
  m.counters.push_back({"cases", 0, [](const Params& p) { return p.rho; }});
  return m;
}

ModelSpec build_sir() { return build_model({}); }

ModelSpec build_seirs(bool seasonal, bool vitality, bool immigration,
                      double season_period) {
  ModelOptions o;
  o.kind = "seirs";
  o.seasonal = seasonal;
  o.vitality = vitality;
  o.immigration = immigration;
  o.season_period = season_period;
  return build_model(o);
}

}  // namespace prmmc
