#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "prmmc/model.hpp"

using namespace prmmc;

TEST_SUITE("model") {

TEST_CASE("sir rates match hand arithmetic") {
  const ModelSpec m = build_sir();
  CHECK(m.dim == 3);
  CHECK(m.comp_names == std::vector<std::string>{"S", "I", "R"});
  REQUIRE(m.event_count() == 2);
  CHECK(m.events[0].name == "infection");
  CHECK(m.events[1].name == "recovery");

  Params p;
  p.beta_m = 2.0;
  p.gamma = 0.5;
  p.s0 = 999;
  p.i0 = 1;
  const State x = m.initial_state(p);
  CHECK(x[0] == 999);
  CHECK(x[1] == 1);
  CHECK(x[2] == 0);

  const auto rates = m.rate_vector(x, 0.0, p);
  CHECK(rates[0] == doctest::Approx(2.0 * 999.0 * 1.0 / 1000.0));  // 1.998
  CHECK(rates[1] == doctest::Approx(0.5));

  // increments
  CHECK(m.events[0].increment[0] == -1);
  CHECK(m.events[0].increment[1] == 1);
  CHECK(m.events[1].increment[1] == -1);
  CHECK(m.events[1].increment[2] == 1);
}

TEST_CASE("force of infection vanishes with nobody alive or infected") {
  const ModelSpec m = build_sir();
  Params p;
  p.beta_m = 2.0;
  p.gamma = 1.0;
  State x{};
  CHECK(m.rate_vector(x, 0.0, p)[0] == 0.0);
  x[0] = 10;
  CHECK(m.rate_vector(x, 0.0, p)[0] == 0.0);  // no infecteds
}

TEST_CASE("negative compartments are rejected") {
  const ModelSpec m = build_sir();
  Params p;
  p.beta_m = 1.0;
  p.gamma = 1.0;
  State x{};
  x[1] = -1;
  CHECK_THROWS_AS(m.rate_vector(x, 0.0, p), std::domain_error);
}

TEST_CASE("seir and seirs wiring") {
  ModelOptions opt;
  opt.kind = "seir";
  const ModelSpec seir = build_model(opt);
  CHECK(seir.dim == 4);
  CHECK(seir.comp_names == std::vector<std::string>{"S", "E", "I", "R"});
  REQUIRE(seir.event_count() == 3);
  CHECK(seir.events[0].name == "infection");
  CHECK(seir.events[1].name == "progression");
  // infection moves S -> E for exposed models
  CHECK(seir.events[0].increment[seir.comp_index("E")] == 1);
  CHECK(seir.events[0].increment[seir.comp_index("I")] == 0);

  opt.kind = "seirs";
  const ModelSpec seirs = build_model(opt);
  REQUIRE(seirs.event_count() == 4);
  CHECK(seirs.events[3].name == "waning");
  Params p;
  p.beta_m = 1.0;
  p.sigma = 0.25;
  p.gamma = 0.5;
  p.omega = 0.125;
  State x{};
  x[seirs.comp_index("E")] = 8;
  x[seirs.comp_index("I")] = 4;
  x[seirs.comp_index("R")] = 16;
  const auto r = seirs.rate_vector(x, 0.0, p);
  CHECK(r[1] == doctest::Approx(2.0));  // sigma E
  CHECK(r[2] == doctest::Approx(2.0));  // gamma I
  CHECK(r[3] == doctest::Approx(2.0));  // omega R

  opt.kind = "nonsense";
  CHECK_THROWS_AS(build_model(opt), std::invalid_argument);
}

TEST_CASE("vitality and immigration events") {
  ModelOptions opt;
  opt.kind = "seir";
  opt.vitality = true;
  opt.immigration = true;
  const ModelSpec m = build_model(opt);
  // infection, progression, recovery, birth, 4 deaths, import
  REQUIRE(m.event_count() == 9);
  Params p;
  p.beta_m = 0.5;
  p.sigma = 1.0;
  p.gamma = 1.0;
  p.birth = 0.01;
  p.death = 0.02;
  p.eta = 0.3;
  p.s0 = 90;
  p.e0 = 0;
  p.i0 = 10;
  p.r0 = 0;
  const State x = m.initial_state(p);
  const auto r = m.rate_vector(x, 0.0, p);
  double birth_rate = 0.0, import_rate = 0.0, death_total = 0.0;
  for (int k = 0; k < m.event_count(); ++k) {
    if (m.events[k].name == "birth") birth_rate = r[k];
    else if (m.events[k].name == "import") import_rate = r[k];
    else if (m.events[k].name.starts_with("death")) death_total += r[k];
  }
  CHECK(birth_rate == doctest::Approx(0.01 * 100));  // B * N0, constant
  CHECK(import_rate == doctest::Approx(0.3));
  CHECK(death_total == doctest::Approx(0.02 * 100));
  // import adds an infected
  for (int k = 0; k < m.event_count(); ++k)
    if (m.events[k].name == "import") CHECK(m.events[k].increment[m.comp_index("I")] == 1);
}

TEST_CASE("seasonal rate and its interval bound") {
  Params p;
  p.beta_m = 2.0;
  p.beta_v = 0.5;
  p.phase = 0.0;
  const double period = 365.0;
  CHECK(seasonal_beta(0.0, p, period) == doctest::Approx(2.0));
  CHECK(seasonal_beta(period / 4.0, p, period) == doctest::Approx(3.0));    // peak
  CHECK(seasonal_beta(3.0 * period / 4.0, p, period) == doctest::Approx(1.0));  // trough

  // sup over an interval containing the peak equals the peak value
  CHECK(seasonal_beta_max(0.0, period / 2.0, p, period) == doctest::Approx(3.0));
  // short interval away from the peak: endpoint max
  CHECK(seasonal_beta_max(0.0, 10.0, p, period) ==
        doctest::Approx(seasonal_beta(10.0, p, period)));
  // any interval of one full period reaches the global max
  CHECK(seasonal_beta_max(100.0, 100.0 + period, p, period) == doctest::Approx(3.0));
}

TEST_CASE("bounds dominate rates over their interval") {
  ModelOptions opt;
  opt.kind = "seirs";
  opt.seasonal = true;
  opt.vitality = true;
  opt.season_period = 50.0;
  const ModelSpec m = build_model(opt);
  Params p;
  p.beta_m = 1.2;
  p.beta_v = 0.8;
  p.phase = 1.0;
  p.sigma = 0.3;
  p.gamma = 0.4;
  p.omega = 0.05;
  p.birth = 0.01;
  p.death = 0.01;
  p.s0 = 50;
  p.e0 = 5;
  p.i0 = 5;
  p.r0 = 40;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(0.0, 100.0);
  std::uniform_int_distribution<std::int64_t> uc(0, 60);
  for (int rep = 0; rep < 500; ++rep) {
    State x{};
    for (int c = 0; c < m.dim; ++c) x[c] = uc(rng);
    double ta = ut(rng), tb = ut(rng);
    if (ta > tb) std::swap(ta, tb);
    for (int k = 0; k < m.event_count(); ++k) {
      const double bound = m.events[k].bound(x, ta, tb, p);
      for (double f : {0.0, 0.31, 0.77, 1.0}) {
        const double t = ta + f * (tb - ta);
        CHECK(m.events[k].rate(x, t, p) <= bound * (1 + 1e-12) + 1e-12);
      }
    }
  }
}

TEST_CASE("counters: infections at full rate, cases thinned by rho") {
  const ModelSpec m = build_sir();
  REQUIRE(m.counter_count() == 2);
  CHECK(m.counters[kInfectionsCounter].name == "infections");
  CHECK(m.counters[kCasesCounter].name == "cases");
  CHECK(m.counters[0].event == 0);
  CHECK(m.counters[1].event == 0);
  Params p;
  p.rho = 0.37;
  CHECK(m.counters[0].report_prob(p) == 1.0);
  CHECK(m.counters[1].report_prob(p) == doctest::Approx(0.37));
}

TEST_CASE("comp_index") {
  const ModelSpec m = build_sir();
  CHECK(m.comp_index("S") == 0);
  CHECK(m.comp_index("R") == 2);
  CHECK(m.comp_index("E") == -1);
}

}  // TEST_SUITE
