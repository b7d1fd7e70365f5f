#ifndef PRMMC_TRAJECTORY_HPP
#define PRMMC_TRAJECTORY_HPP

#include <cstdint>
#include <vector>

#include "prmmc/model.hpp"

namespace prmmc {

struct JumpRecord {
  double t = 0.0;
  int event = -1;
  std::int64_t mult = 1;  // >1 when a frozen-rate step batches identical jumps
  State state_after{};
  Counters counters_after{};
};

/// Piecewise-constant right-continuous path on [0, horizon].
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(State initial, double horizon)
      : initial_(initial), horizon_(horizon) {}

  void push(JumpRecord j) { jumps_.push_back(j); }

  const State& initial_state() const { return initial_; }
  double horizon() const { return horizon_; }
  const std::vector<JumpRecord>& jumps() const { return jumps_; }
  std::size_t jump_count() const { return jumps_.size(); }

  State state_at(double t) const;
  Counters counters_at(double t) const;
  const State& final_state() const;

  /// State snapshots at each query time (times must be non-decreasing).
  std::vector<State> states_at(const std::vector<double>& times) const;
  std::vector<Counters> counters_at(const std::vector<double>& times) const;

  bool clamped = false;  // an approximate step truncated a jump batch
  std::int64_t points_considered = 0;  // thinning candidates examined
  std::int64_t points_accepted = 0;

 private:
  State initial_{};
  double horizon_ = 0.0;
  std::vector<JumpRecord> jumps_;
};

}  // namespace prmmc

#endif
