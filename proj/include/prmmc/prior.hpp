#ifndef PRMMC_PRIOR_HPP
#define PRMMC_PRIOR_HPP

#include <string>
#include <vector>

#include "prmmc/model.hpp"

namespace prmmc {

enum class PriorKind { fixed, uniform, lognormal, normal };

/// Independent one-dimensional prior. (a, b) means [lo, hi] for uniform and
/// (location, scale) for the normal families.
struct PriorSpec {
  PriorKind kind = PriorKind::fixed;
  double a = 0.0;
  double b = 0.0;

  double log_density(double x) const;
  bool in_support(double x) const;
};

std::string to_string(PriorKind kind);
PriorKind prior_kind_from_string(const std::string& s);

/// The continuous parameters the sampler may walk over, in vector order,
/// plus whether the integer initial conditions get their own move.
struct ParamSpace {
  std::vector<std::string> names;
  std::vector<PriorSpec> priors;
  bool sample_ics = false;

  int dim() const { return static_cast<int>(names.size()); }
};

/// Pointer to the named continuous field of a Params, or nullptr.
double* param_field(Params& p, const std::string& name);
double param_value(const Params& p, const std::string& name);
const std::vector<std::string>& continuous_param_names();

/// Hard physical support of a named parameter (rho in [0,1], rates >= 0,
/// ...), independent of the declared prior family.
bool in_physical_support(const std::string& name, double value);

/// Sum of component log prior densities; -inf outside any prior or physical
/// support, or when an initial count is negative. Initial conditions carry a
/// flat prior on the fixed-total lattice.
double log_prior(const Params& p, const ParamSpace& space);

}  // namespace prmmc

#endif
