#ifndef PRMMC_GRID_HPP
#define PRMMC_GRID_HPP

#include <memory>
#include <vector>

namespace prmmc {

/// Deterministic partition of [0,T) x [0,inf) into rectangles.
///
/// Time columns come from an explicit edge list; rate levels follow a
/// geometric ladder u_0 = 0, u_1 = u_base, u_j = u_base * 2^(j-1), so the
/// level containing any finite rate is computable in O(1) and the ladder
/// extends upward without bound.
class GridSpec {
 public:
  GridSpec(std::vector<double> t_edges, double u_base);

  /// Uniform columns of width dt covering [0, horizon].
  static GridSpec uniform(double horizon, double dt, double u_base = 1.0);

  int column_count() const { return static_cast<int>(t_edges_.size()) - 1; }
  double horizon() const { return t_edges_.back(); }
  double u_base() const { return u_base_; }

  double t_lo(int i) const { return t_edges_[i]; }
  double t_hi(int i) const { return t_edges_[i + 1]; }
  double column_width(int i) const { return t_edges_[i + 1] - t_edges_[i]; }

  /// Column containing time t; the last column is closed at T.
  int column_of(double t) const;

  /// Lower edge of level j: 0 for j = 0, u_base * 2^(j-1) otherwise.
  double u_level(int j) const;

  /// Index j of the level with u_level(j) <= u < u_level(j+1).
  int level_of(double u) const;

  /// Number of cells whose lower edge is <= r (0 when r <= 0).
  int levels_for_bound(double r) const {
    return r > 0.0 ? level_of(r) + 1 : 0;
  }

  /// Smallest level boundary >= u (u_base when u <= 0).
  double round_up_to_level(double u) const;

  double cell_area(int i, int j) const {
    return column_width(i) * (u_level(j + 1) - u_level(j));
  }

  const std::vector<double>& t_edges() const { return t_edges_; }

  bool operator==(const GridSpec& other) const {
    return t_edges_ == other.t_edges_ && u_base_ == other.u_base_;
  }

 private:
  std::vector<double> t_edges_;
  double u_base_;
};

using GridPtr = std::shared_ptr<const GridSpec>;

}  // namespace prmmc

#endif
