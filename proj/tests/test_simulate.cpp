#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "prmmc/simulate.hpp"
#include "support/gillespie_sir.hpp"
#include "support/stats.hpp"

using namespace prmmc;

namespace {

GridPtr grid_of(double horizon, double dt) {
  return std::make_shared<const GridSpec>(GridSpec::uniform(horizon, dt, 1.0));
}

std::vector<PoissonMeasure> measures_for(const ModelSpec& m, GridPtr g,
                                         std::uint64_t seed) {
  std::vector<PoissonMeasure> nus;
  for (int k = 0; k < m.event_count(); ++k)
    nus.emplace_back(g, mix64(seed, static_cast<std::uint64_t>(k)), k);
  return nus;
}

Params sir_params(double beta, double gamma, std::int64_t s0, std::int64_t i0) {
  Params p;
  p.beta_m = beta;
  p.gamma = gamma;
  p.s0 = s0;
  p.i0 = i0;
  return p;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("trajectory queries are right-continuous") {
  State x0{};
  x0[0] = 10;
  Trajectory traj(x0, 5.0);
  State x1 = x0;
  x1[0] = 9;
  x1[1] = 1;
  traj.push({1.0, 0, 1, x1, {1, 0}});
  State x2 = x1;
  x2[1] = 0;
  x2[2] = 1;
  traj.push({3.0, 1, 1, x2, {1, 0}});

  CHECK(traj.state_at(0.0)[0] == 10);
  CHECK(traj.state_at(0.999)[0] == 10);
  CHECK(traj.state_at(1.0)[0] == 9);  // jump included at its own time
  CHECK(traj.state_at(2.0)[1] == 1);
  CHECK(traj.state_at(5.0)[2] == 1);
  CHECK(traj.final_state()[2] == 1);
  CHECK(traj.counters_at(0.5)[0] == 0);
  CHECK(traj.counters_at(1.0)[0] == 1);

  const auto states = traj.states_at({0.5, 1.0, 4.0});
  CHECK(states[0][0] == 10);
  CHECK(states[1][0] == 9);
  CHECK(states[2][2] == 1);
}

TEST_CASE("exact simulation is reproducible and conserves hosts") {
  const ModelSpec m = build_sir();
  const Params p = sir_params(1.5, 0.5, 99, 1);
  auto g = grid_of(10.0, 1.0);

  auto nus1 = measures_for(m, g, 2718);
  auto nus2 = measures_for(m, g, 2718);
  const Trajectory a = simulate_exact(m, p, nus1);
  const Trajectory b = simulate_exact(m, p, nus2);
  REQUIRE(a.jump_count() == b.jump_count());
  REQUIRE(a.jump_count() > 0);
  double prev = 0.0;
  for (std::size_t k = 0; k < a.jump_count(); ++k) {
    CHECK(a.jumps()[k].t == b.jumps()[k].t);
    CHECK(a.jumps()[k].event == b.jumps()[k].event);
    CHECK(a.jumps()[k].t >= prev);
    prev = a.jumps()[k].t;
    CHECK(a.jumps()[k].t <= 10.0);
    std::int64_t total = 0;
    for (int c = 0; c < m.dim; ++c) total += a.jumps()[k].state_after[c];
    CHECK(total == 100);  // closed population
  }
}

TEST_CASE("exact simulator matches an independent Gillespie oracle") {
  const ModelSpec m = build_sir();
  const Params p = sir_params(1.5, 0.5, 99, 1);
  auto g = grid_of(10.0, 1.0);
  const int reps = 3000;

  std::vector<double> prm_sizes(reps), ssa_sizes(reps);
  for (int rep = 0; rep < reps; ++rep) {
    auto nus = measures_for(m, g, mix64(101, rep));
    const Trajectory traj = simulate_exact(m, p, nus);
    prm_sizes[rep] = static_cast<double>(100 - traj.final_state()[0]);
  }
  std::mt19937_64 rng(424242);
  for (int rep = 0; rep < reps; ++rep) {
    const auto d = testoracle::gillespie_sir(99, 1, 1.5, 0.5, 10.0, rng);
    ssa_sizes[rep] = static_cast<double>(100 - d.s);
  }
  const double se = std::sqrt(teststat::variance(prm_sizes) / reps +
                              teststat::variance(ssa_sizes) / reps);
  CHECK(std::fabs(teststat::mean(prm_sizes) - teststat::mean(ssa_sizes)) < 3.0 * se);
  CHECK(teststat::ks2_p(prm_sizes, ssa_sizes) > 0.01);
}

TEST_CASE("pure death process hits its analytic mean") {
  // beta = 0: only recovery fires, I(T) ~ Binomial(I0, exp(-gamma T))
  const ModelSpec m = build_sir();
  const Params p = sir_params(0.0, 0.1, 0, 50);
  auto g = grid_of(10.0, 1.0);
  const int reps = 2000;
  std::vector<double> final_i(reps);
  for (int rep = 0; rep < reps; ++rep) {
    auto nus = measures_for(m, g, mix64(555, rep));
    final_i[rep] = static_cast<double>(simulate_exact(m, p, nus).final_state()[1]);
  }
  const double expect = 50.0 * std::exp(-1.0);
  const double se = std::sqrt(teststat::variance(final_i) / reps);
  CHECK(std::fabs(teststat::mean(final_i) - expect) < 3.0 * se);
}

TEST_CASE("counters: monotone, coupled to rho") {
  const ModelSpec m = build_sir();
  auto g = grid_of(10.0, 1.0);

  Params p = sir_params(1.5, 0.5, 99, 1);
  p.rho = 1.0;
  auto nus = measures_for(m, g, 7);
  const Trajectory full = simulate_exact(m, p, nus);
  std::int64_t prev_inf = 0, prev_case = 0;
  for (const JumpRecord& j : full.jumps()) {
    CHECK(j.counters_after[kInfectionsCounter] >= prev_inf);
    CHECK(j.counters_after[kCasesCounter] >= prev_case);
    prev_inf = j.counters_after[kInfectionsCounter];
    prev_case = j.counters_after[kCasesCounter];
  }
  // rho = 1: every infection is a case; count equals susceptible depletion
  CHECK(full.counters_at(10.0)[kCasesCounter] == full.counters_at(10.0)[kInfectionsCounter]);
  CHECK(full.counters_at(10.0)[kInfectionsCounter] == 99 - full.final_state()[0]);

  p.rho = 0.0;
  auto nus0 = measures_for(m, g, 7);
  const Trajectory none = simulate_exact(m, p, nus0);
  CHECK(none.counters_at(10.0)[kCasesCounter] == 0);
  CHECK(none.counters_at(10.0)[kInfectionsCounter] == 99 - none.final_state()[0]);

  p.rho = 0.5;
  auto nus_h = measures_for(m, g, 7);
  const Trajectory half = simulate_exact(m, p, nus_h);
  CHECK(half.counters_at(10.0)[kCasesCounter] <= half.counters_at(10.0)[kInfectionsCounter]);
  // same measures, same trajectory: thinning only affects the counter
  CHECK(half.final_state()[0] == none.final_state()[0]);
}

TEST_CASE("approximate equals exact for constant rates") {
  // import-only model: the rate never depends on state or time
  ModelOptions opt;
  opt.kind = "sir";
  opt.immigration = true;
  const ModelSpec m = build_model(opt);
  Params p = sir_params(0.0, 0.0, 20, 0);
  p.eta = 1.7;
  auto g = grid_of(20.0, 2.0);
  auto nus_e = measures_for(m, g, 31);
  auto nus_a = measures_for(m, g, 31);
  const Trajectory exact = simulate_exact(m, p, nus_e);
  const Trajectory approx = simulate_approx(m, p, nus_a);
  CHECK(exact.final_state()[1] == approx.final_state()[1]);
  CHECK(approx.clamped == false);
}

TEST_CASE("approximate clamps instead of going negative") {
  const ModelSpec m = build_sir();
  const Params p = sir_params(0.0, 10.0, 0, 3);  // frozen recovery rate 30 per column
  auto g = grid_of(10.0, 5.0);
  auto nus = measures_for(m, g, 13);
  const Trajectory traj = simulate_approx(m, p, nus);
  CHECK(traj.clamped);
  CHECK(traj.final_state()[1] >= 0);
  CHECK(traj.final_state()[1] + traj.final_state()[2] == 3);
}

TEST_CASE("approximate final sizes approach exact as columns shrink") {
  const ModelSpec m = build_sir();
  const Params p = sir_params(1.5, 0.5, 99, 1);
  const int reps = 400;
  std::vector<double> exact_sizes(reps);
  auto g_fine = grid_of(10.0, 0.05);
  for (int rep = 0; rep < reps; ++rep) {
    auto nus = measures_for(m, g_fine, mix64(900, rep));
    exact_sizes[rep] = static_cast<double>(100 - simulate_exact(m, p, nus).final_state()[0]);
  }
  double prev_gap = 1e300;
  for (double dt : {2.0, 0.5, 0.05}) {
    auto g = grid_of(10.0, dt);
    std::vector<double> sizes(reps);
    for (int rep = 0; rep < reps; ++rep) {
      auto nus = measures_for(m, g, mix64(900, rep));
      sizes[rep] = static_cast<double>(100 - simulate_approx(m, p, nus).final_state()[0]);
    }
    const double gap = std::fabs(teststat::mean(sizes) - teststat::mean(exact_sizes));
    CHECK(gap <= prev_gap + 1e-9);
    prev_gap = gap;
  }
}

TEST_CASE("thinning rejection overhead stays bounded on the SIR benchmark") {
  const ModelSpec m = build_sir();
  const Params p = sir_params(1.5, 0.5, 99, 1);
  auto g = grid_of(10.0, 1.0);
  std::int64_t considered = 0, accepted = 0;
  for (int rep = 0; rep < 200; ++rep) {
    auto nus = measures_for(m, g, mix64(321, rep));
    const Trajectory traj = simulate_exact(m, p, nus);
    considered += traj.points_considered;
    accepted += traj.points_accepted;
  }
  REQUIRE(accepted > 0);
  CHECK(static_cast<double>(considered) / static_cast<double>(accepted) < 4.0);
}

TEST_CASE("broken models surface as simulation errors") {
  // an event whose rate ignores an empty source compartment
  ModelSpec bad;
  bad.dim = 1;
  bad.comp_names = {"A"};
  EventSpec ev;
  ev.name = "drain";
  ev.measure_index = 0;
  ev.increment[0] = -1;
  ev.rate = [](const State&, double, const Params&) { return 1.0; };
  ev.bound = [](const State&, double, double, const Params&) { return 1.0; };
  bad.events.push_back(ev);
  Params p;
  auto g = grid_of(50.0, 5.0);
  std::vector<PoissonMeasure> nus;
  nus.emplace_back(g, 1, 0);
  CHECK_THROWS_AS(simulate_exact(bad, p, nus), SimulationError);

  // wiring mismatch: measure's event index disagrees
  const ModelSpec m = build_sir();
  std::vector<PoissonMeasure> wrong;
  wrong.emplace_back(g, 1, 1);
  wrong.emplace_back(g, 2, 0);
  const Params sp = sir_params(1.0, 1.0, 10, 1);
  CHECK_THROWS_AS(simulate_exact(m, sp, wrong), SimulationError);
}

TEST_CASE("approximate batch records carry multiplicities at column edges") {
  const ModelSpec m = build_sir();
  const Params p = sir_params(1.5, 0.5, 990, 10);
  auto g = grid_of(10.0, 1.0);
  auto nus = measures_for(m, g, 88);
  const Trajectory traj = simulate_approx(m, p, nus);
  REQUIRE(traj.jump_count() > 0);
  for (const JumpRecord& j : traj.jumps()) {
    CHECK(j.mult >= 1);
    // every record sits on a column edge
    const double ratio = j.t / 1.0;
    CHECK(std::fabs(ratio - std::round(ratio)) < 1e-12);
  }
  // counters remain coupled
  const auto c = traj.counters_at(10.0);
  CHECK(c[kCasesCounter] <= c[kInfectionsCounter]);
}

}  // TEST_SUITE
