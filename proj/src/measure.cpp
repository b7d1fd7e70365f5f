#include "prmmc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prmmc {

PoissonMeasure::PoissonMeasure(GridPtr grid, std::uint64_t seed, int event_index)
    : grid_(std::move(grid)), seed_(seed), event_(event_index) {
  if (!grid_) throw std::invalid_argument("measure needs a grid");
  columns_.resize(grid_->column_count());
}

CellPtr PoissonMeasure::build_cell(int i, int j, std::uint64_t salt) const {
  auto cell = std::make_shared<PrmCell>();
  const double area = grid_->cell_area(i, j);
  if (area > 0.0) {
    Rng rng(mix64(seed_, salt, static_cast<std::uint64_t>(event_),
                  static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
    std::poisson_distribution<std::int64_t> pois(area);
    const std::int64_t n = pois(rng);
    std::uniform_real_distribution<double> ut(grid_->t_lo(i), grid_->t_hi(i));
    std::uniform_real_distribution<double> uu(grid_->u_level(j), grid_->u_level(j + 1));
    cell->points.reserve(n);
    for (std::int64_t m = 0; m < n; ++m) {
      cell->points.push_back({ut(rng), uu(rng), static_cast<std::uint32_t>(m)});
    }
    std::sort(cell->points.begin(), cell->points.end(), [](const PrmPoint& a, const PrmPoint& b) {
      return a.t != b.t ? a.t < b.t : a.ordinal < b.ordinal;
    });
  }
  return cell;
}

PrmColumn& PoissonMeasure::writable_column(int i) {
  if (i < 0 || i >= grid_->column_count()) throw std::out_of_range("column index outside grid");
  auto& col = columns_[i];
  if (!col) col = std::make_shared<PrmColumn>();
  return *col;
}

std::span<const PrmPoint> PoissonMeasure::cell_points(int i, int j) {
  if (j < 0) throw std::out_of_range("negative level index");
  PrmColumn& col = writable_column(i);
  if (static_cast<int>(col.cells.size()) <= j) col.cells.resize(j + 1);
  if (!col.cells[j]) col.cells[j] = build_cell(i, j, col.salt);
  return col.cells[j]->points;
}

bool PoissonMeasure::is_materialized(int i, int j) const {
  if (i < 0 || i >= grid_->column_count() || j < 0) return false;
  const auto& col = columns_[i];
  return col && j < static_cast<int>(col->cells.size()) && col->cells[j] != nullptr;
}

std::int64_t PoissonMeasure::count_below(int i, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("rate bound must be nonnegative");
  const int levels = grid_->levels_for_bound(r);
  if (levels == 0) return 0;
  std::int64_t total = 0;
  for (int j = 0; j + 1 < levels; ++j) total += cell_count(i, j);
  // straddling cell: u_level(levels-1) <= r < u_level(levels)
  for (const PrmPoint& p : cell_points(i, levels - 1)) {
    if (p.u <= r) ++total;
  }
  return total;
}

void PoissonMeasure::points_below(int i, double r, std::vector<PrmPoint>& out) {
  if (!(r >= 0.0)) throw std::invalid_argument("rate bound must be nonnegative");
  const int levels = grid_->levels_for_bound(r);
  if (levels == 0) return;
  const std::size_t start = out.size();
  for (int j = 0; j < levels; ++j) {
    for (const PrmPoint& p : cell_points(i, j)) {
      if (p.u <= r) out.push_back(p);
    }
  }
  std::sort(out.begin() + start, out.end(), [](const PrmPoint& a, const PrmPoint& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.u != b.u) return a.u < b.u;
    return a.ordinal < b.ordinal;
  });
}

PoissonMeasure PoissonMeasure::redraw_columns(std::span<const int> columns, Rng& rng) const {
  PoissonMeasure fresh(*this);
  for (int i : columns) {
    if (i < 0 || i >= grid_->column_count()) throw std::out_of_range("redraw column outside grid");
    auto col = std::make_shared<PrmColumn>();
    col->salt = draw_u64(rng);
    fresh.columns_[i] = std::move(col);
  }
  return fresh;
}

int PoissonMeasure::max_materialized_level(int i) const {
  const auto& col = columns_[i];
  if (!col) return -1;
  for (int j = static_cast<int>(col->cells.size()) - 1; j >= 0; --j) {
    if (col->cells[j]) return j;
  }
  return -1;
}

void PoissonMeasure::to_records(std::vector<MeasureRecord>& out) const {
  for (int i = 0; i < grid_->column_count(); ++i) {
    const auto& col = columns_[i];
    if (!col) continue;
    for (int j = 0; j < static_cast<int>(col->cells.size()); ++j) {
      if (!col->cells[j]) continue;
      for (const PrmPoint& p : col->cells[j]->points) {
        out.push_back({event_, i, j, p.t, p.u});
      }
    }
  }
}

PoissonMeasure PoissonMeasure::from_records(GridPtr grid, std::span<const MeasureRecord> records,
                                            std::uint64_t seed) {
  if (records.empty()) throw std::invalid_argument("no records to rebuild a measure from");
  PoissonMeasure m(std::move(grid), seed, records.front().event);
  for (const MeasureRecord& r : records) {
    if (r.event != m.event_) throw std::invalid_argument("records span multiple events");
    PrmColumn& col = m.writable_column(r.column);
    if (static_cast<int>(col.cells.size()) <= r.level) col.cells.resize(r.level + 1);
    if (!col.cells[r.level]) col.cells[r.level] = std::make_shared<PrmCell>();
    auto* cell = const_cast<PrmCell*>(col.cells[r.level].get());
    cell->points.push_back(
        {r.t, r.u, static_cast<std::uint32_t>(cell->points.size())});
  }
  for (auto& colptr : m.columns_) {
    if (!colptr) continue;
    for (auto& cellptr : colptr->cells) {
      if (!cellptr) continue;
      auto* cell = const_cast<PrmCell*>(cellptr.get());
      std::sort(cell->points.begin(), cell->points.end(),
                [](const PrmPoint& a, const PrmPoint& b) {
                  return a.t != b.t ? a.t < b.t : a.ordinal < b.ordinal;
                });
    }
  }
  return m;
}

TimeSlices make_slices(const GridSpec& grid, double width) {
  if (width < 0.0) throw std::invalid_argument("slice width must be nonnegative");
  TimeSlices s;
  if (width == 0.0) {  // one slice per column
    s.col_edges.resize(grid.column_count() + 1);
    for (int i = 0; i <= grid.column_count(); ++i) s.col_edges[i] = i;
    return s;
  }
  s.col_edges.push_back(0);
  double next = width;
  for (int i = 0; i < grid.column_count(); ++i) {
    // close the slice at the first column edge reaching the target width
    if (grid.t_hi(i) >= next - 1e-9 && i + 1 < grid.column_count()) {
      s.col_edges.push_back(i + 1);
      next = grid.t_hi(i) + width;
    }
  }
  s.col_edges.push_back(grid.column_count());
  return s;
}

namespace {

int cap_level(const GridSpec& grid, double cap) {
  const int j_cap = grid.level_of(cap);
  if (grid.u_level(j_cap) != cap || j_cap == 0)
    throw std::invalid_argument("density cap must sit on a grid level boundary");
  return j_cap;
}

}  // namespace

std::vector<std::int64_t> slice_counts_below(PoissonMeasure& nu, const TimeSlices& slices,
                                             double cap) {
  return slice_counts_below(nu, slices, std::vector<double>(slices.count(), cap));
}

std::vector<std::int64_t> slice_counts_below(PoissonMeasure& nu, const TimeSlices& slices,
                                             const std::vector<double>& caps) {
  const GridSpec& grid = nu.grid();
  if (static_cast<int>(caps.size()) != slices.count())
    throw std::invalid_argument("one density cap per slice expected");
  std::vector<std::int64_t> counts(slices.count(), 0);
  for (int s = 0; s < slices.count(); ++s) {
    const int j_cap = cap_level(grid, caps[s]);
    for (int i = slices.col_edges[s]; i < slices.col_edges[s + 1]; ++i) {
      for (int j = 0; j < j_cap; ++j) counts[s] += nu.cell_count(i, j);
    }
  }
  return counts;
}

DensitySeries point_density(PoissonMeasure& nu, const TimeSlices& slices, double cap) {
  const GridSpec& grid = nu.grid();
  auto counts = slice_counts_below(nu, slices, cap);
  DensitySeries out;
  out.event = nu.event_index();
  out.cap = cap;
  out.t_lo.resize(slices.count());
  out.t_hi.resize(slices.count());
  out.density.resize(slices.count());
  for (int s = 0; s < slices.count(); ++s) {
    out.t_lo[s] = grid.t_lo(slices.col_edges[s]);
    out.t_hi[s] = grid.t_hi(slices.col_edges[s + 1] - 1);
    const double volume = (out.t_hi[s] - out.t_lo[s]) * cap;
    out.density[s] = static_cast<double>(counts[s]) / volume;
  }
  return out;
}

}  // namespace prmmc
