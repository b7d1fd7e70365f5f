#include "prmmc/prior.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace prmmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

struct FieldEntry {
  const char* name;
  double Params::*ptr;
  double lo;  // physical support [lo, hi]
  double hi;
  bool lo_open;  // exclude lo itself (psi > 0)
};

const FieldEntry kFields[] = {
    {"beta_m", &Params::beta_m, 0.0, std::numeric_limits<double>::infinity(), false},
    {"beta_v", &Params::beta_v, 0.0, 1.0, false},
    {"phase", &Params::phase, -std::numeric_limits<double>::infinity(),
     std::numeric_limits<double>::infinity(), false},
    {"sigma", &Params::sigma, 0.0, std::numeric_limits<double>::infinity(), false},
    {"gamma", &Params::gamma, 0.0, std::numeric_limits<double>::infinity(), false},
    {"omega", &Params::omega, 0.0, std::numeric_limits<double>::infinity(), false},
    {"birth", &Params::birth, 0.0, std::numeric_limits<double>::infinity(), false},
    {"death", &Params::death, 0.0, std::numeric_limits<double>::infinity(), false},
    {"eta", &Params::eta, 0.0, std::numeric_limits<double>::infinity(), false},
    {"rho", &Params::rho, 0.0, 1.0, false},
    {"psi", &Params::psi, 0.0, std::numeric_limits<double>::infinity(), true},
};

const FieldEntry* find_field(const std::string& name) {
  for (const auto& f : kFields)
    if (name == f.name) return &f;
  return nullptr;
}

}  // namespace

double PriorSpec::log_density(double x) const {
  switch (kind) {
    case PriorKind::fixed:
      return 0.0;
    case PriorKind::uniform:
      return (x >= a && x <= b) ? -std::log(b - a) : kNegInf;
    case PriorKind::normal: {
      const double z = (x - a) / b;
      return -kLogSqrt2Pi - std::log(b) - 0.5 * z * z;
    }
    case PriorKind::lognormal: {
      if (x <= 0.0) return kNegInf;
      const double lx = std::log(x);
      const double z = (lx - a) / b;
      return -lx - kLogSqrt2Pi - std::log(b) - 0.5 * z * z;
    }
  }
  return kNegInf;
}

bool PriorSpec::in_support(double x) const {
  switch (kind) {
    case PriorKind::fixed: return true;
    case PriorKind::uniform: return x >= a && x <= b;
    case PriorKind::normal: return true;
    case PriorKind::lognormal: return x > 0.0;
  }
  return false;
}

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::fixed: return "fixed";
    case PriorKind::uniform: return "uniform";
    case PriorKind::lognormal: return "lognormal";
    case PriorKind::normal: return "normal";
  }
  return "?";
}

PriorKind prior_kind_from_string(const std::string& s) {
  if (s == "fixed") return PriorKind::fixed;
  if (s == "uniform") return PriorKind::uniform;
  if (s == "lognormal") return PriorKind::lognormal;
  if (s == "normal") return PriorKind::normal;
  throw std::domain_error("unknown prior kind: " + s);
}

double* param_field(Params& p, const std::string& name) {
  const FieldEntry* f = find_field(name);
  return f ? &(p.*(f->ptr)) : nullptr;
}

double param_value(const Params& p, const std::string& name) {
  const FieldEntry* f = find_field(name);
  if (!f) throw std::domain_error("unknown parameter: " + name);
  return p.*(f->ptr);
}

const std::vector<std::string>& continuous_param_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& f : kFields) v.emplace_back(f.name);
    return v;
  }();
  return names;
}

bool in_physical_support(const std::string& name, double value) {
  const FieldEntry* f = find_field(name);
  if (!f) throw std::domain_error("unknown parameter: " + name);
  if (!std::isfinite(value)) return false;
  if (f->lo_open ? !(value > f->lo) : !(value >= f->lo)) return false;
  return value <= f->hi;
}

double log_prior(const Params& p, const ParamSpace& space) {
  if (p.s0 < 0 || p.e0 < 0 || p.i0 < 0 || p.r0 < 0) return kNegInf;
  double lp = 0.0;
  for (int i = 0; i < space.dim(); ++i) {
    const double x = param_value(p, space.names[i]);
    if (!in_physical_support(space.names[i], x)) return kNegInf;
    lp += space.priors[i].log_density(x);
    if (lp == kNegInf) return kNegInf;
  }
  return lp;
}

}  // namespace prmmc
