#include "prmmc/trajectory.hpp"

#include <algorithm>

namespace prmmc {

namespace {
// Index of the last jump with time <= t, or -1.
std::ptrdiff_t last_jump_at(const std::vector<JumpRecord>& jumps, double t) {
  auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                             [](double v, const JumpRecord& j) { return v < j.t; });
  return it - jumps.begin() - 1;
}
}  // namespace

State Trajectory::state_at(double t) const {
  auto i = last_jump_at(jumps_, t);
  return i < 0 ? initial_ : jumps_[i].state_after;
}

Counters Trajectory::counters_at(double t) const {
  auto i = last_jump_at(jumps_, t);
  return i < 0 ? Counters{} : jumps_[i].counters_after;
}

const State& Trajectory::final_state() const {
  return jumps_.empty() ? initial_ : jumps_.back().state_after;
}

std::vector<State> Trajectory::states_at(const std::vector<double>& times) const {
  std::vector<State> out;
  out.reserve(times.size());
  std::size_t j = 0;
  for (double t : times) {
    while (j < jumps_.size() && jumps_[j].t <= t) ++j;
    out.push_back(j == 0 ? initial_ : jumps_[j - 1].state_after);
  }
  return out;
}

std::vector<Counters> Trajectory::counters_at(const std::vector<double>& times) const {
  std::vector<Counters> out;
  out.reserve(times.size());
  std::size_t j = 0;
  for (double t : times) {
    while (j < jumps_.size() && jumps_[j].t <= t) ++j;
    out.push_back(j == 0 ? Counters{} : jumps_[j - 1].counters_after);
  }
  return out;
}

}  // namespace prmmc
