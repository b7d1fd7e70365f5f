#include "prmmc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

namespace prmmc {

namespace {

void check_wiring(const ModelSpec& model, const std::vector<PoissonMeasure>& measures) {
  if (measures.size() != static_cast<std::size_t>(model.event_count()))
    throw SimulationError("need one measure per event");
  for (std::size_t k = 0; k < measures.size(); ++k) {
    if (measures[k].event_index() != static_cast<int>(k))
      throw SimulationError("measure/event index mismatch");
    if (!(measures[k].grid() == measures[0].grid()))
      throw SimulationError("measures disagree on grid");
  }
}

double checked_rate(const EventSpec& e, const State& x, double t, const Params& p) {
  const double r = e.rate(x, t, p);
  if (!std::isfinite(r) || r < 0.0)
    throw SimulationError("invalid rate for event " + e.name);
  return r;
}

void apply_increment(State& x, const State& inc, std::int64_t mult,
                     const std::string& name, int dim) {
  for (int c = 0; c < dim; ++c) {
    x[c] += mult * inc[c];
    if (x[c] < 0) throw SimulationError("event " + name + " drove a count negative");
  }
}

/// One pending PRM point, ordered by (t, event, level, ordinal) so the merge
/// across cells is a deterministic total order.
struct Cursor {
  double t;
  int event;
  int level;
  std::uint32_t ordinal;
  std::span<const PrmPoint> pts;
  std::size_t pos;
};

struct CursorAfter {
  bool operator()(const Cursor& a, const Cursor& b) const {
    return std::tie(a.t, a.event, a.level, a.ordinal) >
           std::tie(b.t, b.event, b.level, b.ordinal);
  }
};

std::size_t first_after(std::span<const PrmPoint> pts, double t) {
  auto it = std::upper_bound(pts.begin(), pts.end(), t,
                             [](double v, const PrmPoint& p) { return v < p.t; });
  return static_cast<std::size_t>(it - pts.begin());
}

}  // namespace

Trajectory simulate_exact(const ModelSpec& model, const Params& params,
                          std::vector<PoissonMeasure>& measures) {
  check_wiring(model, measures);
  const GridSpec& grid = measures[0].grid();
  const int K = model.event_count();

  State x = model.initial_state(params);
  for (int c = 0; c < model.dim; ++c)
    if (x[c] < 0) throw SimulationError("negative initial count");
  Counters counts{};
  Trajectory traj(x, grid.horizon());

  std::priority_queue<Cursor, std::vector<Cursor>, CursorAfter> heap;
  std::vector<int> active(K);

  for (int i = 0; i < grid.column_count(); ++i) {
    const double t_end = grid.t_hi(i);
    double t_cur = grid.t_lo(i);
    heap = {};
    std::fill(active.begin(), active.end(), 0);

    // Open every ladder level a rate could reach before the next jump; a
    // point in a still-closed level sits above the bound, hence above the
    // rate, and could only have been rejected.
    auto open_levels = [&](int k) {
      const double b = model.events[k].bound(x, t_cur, t_end, params);
      if (!std::isfinite(b) || b < 0.0)
        throw SimulationError("invalid rate bound for event " + model.events[k].name);
      const int want = grid.levels_for_bound(b);
      for (int j = active[k]; j < want; ++j) {
        auto pts = measures[k].cell_points(i, j);
        const std::size_t pos = first_after(pts, t_cur);
        if (pos < pts.size())
          heap.push({pts[pos].t, k, j, pts[pos].ordinal, pts, pos});
      }
      active[k] = std::max(active[k], want);
    };

    for (int k = 0; k < K; ++k) open_levels(k);

    while (!heap.empty()) {
      Cursor cur = heap.top();
      heap.pop();
      if (cur.pos + 1 < cur.pts.size()) {
        const PrmPoint& nxt = cur.pts[cur.pos + 1];
        heap.push({nxt.t, cur.event, cur.level, nxt.ordinal, cur.pts, cur.pos + 1});
      }

      const PrmPoint& p = cur.pts[cur.pos];
      const EventSpec& ev = model.events[cur.event];
      const double r = checked_rate(ev, x, p.t, params);
      ++traj.points_considered;
      if (r <= 0.0 || p.u > r) continue;
      ++traj.points_accepted;

      for (int c = 0; c < model.counter_count(); ++c) {
        const CounterSpec& cs = model.counters[c];
        if (cs.event == cur.event && p.u <= cs.report_prob(params) * r) ++counts[c];
      }
      apply_increment(x, ev.increment, 1, ev.name, model.dim);
      traj.push({p.t, cur.event, 1, x, counts});
      t_cur = p.t;
      for (int k = 0; k < K; ++k) open_levels(k);
    }
  }
  return traj;
}

Trajectory simulate_approx(const ModelSpec& model, const Params& params,
                           std::vector<PoissonMeasure>& measures) {
  check_wiring(model, measures);
  const GridSpec& grid = measures[0].grid();
  const int K = model.event_count();

  State x = model.initial_state(params);
  for (int c = 0; c < model.dim; ++c)
    if (x[c] < 0) throw SimulationError("negative initial count");
  Counters counts{};
  Trajectory traj(x, grid.horizon());

  std::vector<double> rate(K);
  std::vector<std::int64_t> want(K), left(K), applied(K);
  std::vector<std::pair<int, std::int64_t>> batches;
  std::vector<PrmPoint> pts;

  for (int i = 0; i < grid.column_count(); ++i) {
    const double t0 = grid.t_lo(i);
    for (int k = 0; k < K; ++k) {
      rate[k] = checked_rate(model.events[k], x, t0, params);
      want[k] = measures[k].count_below(i, rate[k]);
      left[k] = want[k];
      applied[k] = 0;
    }

    // Round-robin over events, each time applying the longest run of jumps
    // the compartments can absorb; leftovers are dropped and flagged.
    batches.clear();
    State scratch = x;
    bool progress = true;
    while (progress) {
      progress = false;
      for (int k = 0; k < K; ++k) {
        if (left[k] == 0) continue;
        std::int64_t m = left[k];
        for (int c = 0; c < model.dim; ++c) {
          const std::int64_t d = model.events[k].increment[c];
          if (d < 0) m = std::min(m, scratch[c] / -d);
        }
        if (m == 0) continue;
        apply_increment(scratch, model.events[k].increment, m, model.events[k].name,
                        model.dim);
        batches.emplace_back(k, m);
        left[k] -= m;
        applied[k] += m;
        progress = true;
      }
    }
    for (int k = 0; k < K; ++k)
      if (left[k] > 0) traj.clamped = true;

    Counters inc{};
    for (int c = 0; c < model.counter_count(); ++c) {
      const CounterSpec& cs = model.counters[c];
      const int k = cs.event;
      if (applied[k] == 0) continue;
      const double q = cs.report_prob(params);
      if (applied[k] == want[k]) {
        inc[c] = measures[k].count_below(i, std::min(q, 1.0) * rate[k]);
      } else {
        // Truncated batch: only the first applied[k] points (in time order)
        // fired, so thin exactly those.
        pts.clear();
        measures[k].points_below(i, rate[k], pts);
        const double cut = q * rate[k];
        for (std::int64_t n = 0; n < applied[k]; ++n)
          if (pts[static_cast<std::size_t>(n)].u <= cut) ++inc[c];
      }
    }

    const double t1 = grid.t_hi(i);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      auto [k, m] = batches[b];
      apply_increment(x, model.events[k].increment, m, model.events[k].name, model.dim);
      if (b + 1 == batches.size())
        for (int c = 0; c < kMaxCounters; ++c) counts[c] += inc[c];
      traj.push({t1, k, m, x, counts});
    }
  }
  return traj;
}

}  // namespace prmmc
