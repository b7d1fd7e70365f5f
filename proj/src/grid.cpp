#include "prmmc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prmmc {

GridSpec::GridSpec(std::vector<double> t_edges, double u_base)
    : t_edges_(std::move(t_edges)), u_base_(u_base) {
  if (t_edges_.size() < 2) throw std::invalid_argument("grid needs at least one column");
  if (t_edges_.front() != 0.0) throw std::invalid_argument("grid must start at t = 0");
  for (std::size_t i = 1; i < t_edges_.size(); ++i) {
    if (!(t_edges_[i] > t_edges_[i - 1]))
      throw std::invalid_argument("grid time edges must be strictly increasing");
  }
  if (!(u_base_ > 0.0) || !std::isfinite(u_base_))
    throw std::invalid_argument("u_base must be positive and finite");
}

GridSpec GridSpec::uniform(double horizon, double dt, double u_base) {
  if (!(horizon > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("horizon and column width must be positive");
  int n = static_cast<int>(std::ceil(horizon / dt - 1e-9));
  std::vector<double> edges(n + 1);
  for (int i = 0; i < n; ++i) edges[i] = i * dt;
  edges[n] = horizon;
  return GridSpec(std::move(edges), u_base);
}

int GridSpec::column_of(double t) const {
  if (t < 0.0 || t > horizon()) throw std::out_of_range("time outside grid");
  if (t == horizon()) return column_count() - 1;
  auto it = std::upper_bound(t_edges_.begin(), t_edges_.end(), t);
  return static_cast<int>(it - t_edges_.begin()) - 1;
}

double GridSpec::u_level(int j) const {
  if (j <= 0) return 0.0;
  return std::ldexp(u_base_, j - 1);
}

int GridSpec::level_of(double u) const {
  if (u < 0.0) throw std::out_of_range("rate coordinate must be nonnegative");
  if (u < u_base_) return 0;
  int j = 1 + static_cast<int>(std::floor(std::log2(u / u_base_)));
  // log2 can land one off at level boundaries; settle exactly.
  while (u < u_level(j)) --j;
  while (u >= u_level(j + 1)) ++j;
  return j;
}

double GridSpec::round_up_to_level(double u) const {
  if (u <= 0.0) return u_base_;
  int j = level_of(u);
  double lo = u_level(j);
  return u == lo && j > 0 ? lo : u_level(j + 1);
}

}  // namespace prmmc
