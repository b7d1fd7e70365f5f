#ifndef PRMMC_MEASURE_HPP
#define PRMMC_MEASURE_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "prmmc/grid.hpp"
#include "prmmc/rng.hpp"

namespace prmmc {

/// One point of a PRM realisation. `ordinal` is the draw counter inside the
/// cell and breaks ties between equal times.
struct PrmPoint {
  double t;
  double u;
  std::uint32_t ordinal;
};

struct PrmCell {
  std::vector<PrmPoint> points;  // sorted by (t, ordinal)
};

using CellPtr = std::shared_ptr<const PrmCell>;

struct PrmColumn {
  std::uint64_t salt = 0;      // bumped by redraw proposals
  std::vector<CellPtr> cells;  // by level; null = not yet materialized
};

/// Flat export record for one PRM point.
struct MeasureRecord {
  int event;
  int column;
  int level;
  double t;
  double u;
};

/// A realisation of a unit-intensity Poisson Random Measure on
/// [0,T) x [0,inf), materialized lazily per grid cell.
///
/// Every cell's points are a pure function of (seed, event, column salt,
/// cell index), so reads are deterministic regardless of the order in which
/// cells get touched. Copies share column storage; cache fills mutate shared
/// columns in place (the measure value is unchanged), while redraws replace
/// whole columns, so a copy held across a rejected proposal keeps its value.
class PoissonMeasure {
 public:
  PoissonMeasure(GridPtr grid, std::uint64_t seed, int event_index);

  const GridSpec& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  int event_index() const { return event_; }

  /// Points of cell (i, j), drawing them on first access.
  std::span<const PrmPoint> cell_points(int i, int j);

  std::int64_t cell_count(int i, int j) { return static_cast<std::int64_t>(cell_points(i, j).size()); }

  bool is_materialized(int i, int j) const;

  /// Exact count of points with u <= r in column i. Cached counts cover the
  /// cells fully below r; only the straddling cell is scanned.
  std::int64_t count_below(int i, double r);

  /// Appends the points with u <= r of column i to `out`, merged in
  /// (t, level, ordinal) order. Cells entirely above r stay untouched.
  void points_below(int i, double r, std::vector<PrmPoint>& out);

  /// Value-semantics proposal move: a copy of this measure whose selected
  /// columns are replaced by fresh prior draws (seeded from `rng`).
  PoissonMeasure redraw_columns(std::span<const int> columns, Rng& rng) const;

  /// Highest level with a materialized cell in column i, or -1.
  int max_materialized_level(int i) const;

  void to_records(std::vector<MeasureRecord>& out) const;

  /// Rebuilds a measure holding exactly the recorded points (all listed
  /// cells materialized, everything else untouched). Records must belong to
  /// a single event index.
  static PoissonMeasure from_records(GridPtr grid, std::span<const MeasureRecord> records,
                                     std::uint64_t seed = 0);

 private:
  PrmColumn& writable_column(int i);
  CellPtr build_cell(int i, int j, std::uint64_t salt) const;

  GridPtr grid_;
  std::uint64_t seed_;
  int event_;
  std::vector<std::shared_ptr<PrmColumn>> columns_;
};

/// Point densities d_s = nu(slice x [0,cap)) / (width * cap) over
/// consecutive-column slices.
struct DensitySeries {
  int event;
  double cap;
  std::vector<double> t_lo;
  std::vector<double> t_hi;
  std::vector<double> density;
};

/// Slice s covers columns [col_edges[s], col_edges[s+1]).
struct TimeSlices {
  std::vector<int> col_edges;
  int count() const { return static_cast<int>(col_edges.size()) - 1; }
};

/// Slices of roughly `width` time units aligned to column boundaries.
TimeSlices make_slices(const GridSpec& grid, double width);

/// Cap must sit on a level boundary; counts cover cells with upper edge <= cap.
DensitySeries point_density(PoissonMeasure& nu, const TimeSlices& slices, double cap);

/// Per-slice point count below a level-boundary cap (the density numerator).
std::vector<std::int64_t> slice_counts_below(PoissonMeasure& nu, const TimeSlices& slices,
                                             double cap);

/// Same with one cap per slice (each on a level boundary).
std::vector<std::int64_t> slice_counts_below(PoissonMeasure& nu, const TimeSlices& slices,
                                             const std::vector<double>& caps);

}  // namespace prmmc

#endif
