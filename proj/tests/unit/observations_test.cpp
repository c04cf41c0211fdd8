#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ctmcfit/dataset_io.hpp"
#include "ctmcfit/errors.hpp"
#include "ctmcfit/observations.hpp"

using namespace ctmcfit;

namespace {

ConcreteCtmc two_way() {
  // 0 -> 1 at 0.5, 0 -> 2 at 1.5; 1 and 2 absorbing.
  return ConcreteCtmc({{0}, {1}, {2}}, {1.0, 0.0, 0.0}, {{0, 1, 0.5}, {0, 2, 1.5}});
}

}  // namespace

TEST_CASE("observation validation") {
  const TimedObservation good{{{0}, {1}}, {0.5}};
  const TimedObservation missing{{{0}, {1}}, {}};
  const TimedObservation zero{{{0}, {1}}, {0.0}};
  const TimedObservation empty{{}, {}};
  const TimedObservation single{{{0}}, {}};
  CHECK_NOTHROW(good.validate());
  CHECK_THROWS_AS(missing.validate(), ModelError);
  CHECK_THROWS_AS(zero.validate(), ModelError);
  CHECK_THROWS_AS(empty.validate(), ModelError);
  CHECK_THROWS_AS(Dataset(std::vector<TimedObservation>{}), ModelError);
  CHECK(single.steps() == 0);
}

TEST_CASE("strip_times keeps labels") {
  const TimedObservation o{{{0}, {1}, {1}}, {0.5, 2.0}};
  CHECK(strip_times(o).labels == o.labels);
  const Dataset d(std::vector<TimedObservation>{o}, {"x"});
  const auto u = d.without_times();
  CHECK(u.kind() == ObservationKind::Untimed);
  CHECK(u.untimed()[0].labels == o.labels);
  CHECK(u.observables() == d.observables());
  CHECK_THROWS_AS(u.timed(), ModelError);
}

TEST_CASE("simulation halts at absorbing states") {
  const ConcreteCtmc c({{0}, {1}}, {0.0, 1.0}, {{0, 1, 1.0}});
  const auto o = simulate(c, 10, 3);
  CHECK(o.labels.size() == 1);
  CHECK(o.dwells.empty());
}

TEST_CASE("simulated dwell times have mean 1/E") {
  const auto c = two_way();
  Rng rng(17);
  SimulationLimits limits;
  limits.max_steps = 1;
  const int draws = 10000;
  double sum = 0.0;
  int to_one = 0;
  for (int i = 0; i < draws; ++i) {
    const auto o = simulate(c, limits, rng);
    REQUIRE(o.dwells.size() == 1);
    sum += o.dwells[0];
    to_one += o.labels[1] == Label{1};
  }
  // Exp(2): mean 0.5, sd 0.5.
  CHECK(std::abs(sum / draws - 0.5) <= 3 * 0.5 / std::sqrt(draws));
  // Successor 1 with probability 0.25.
  const double p = 0.25;
  CHECK(std::abs(to_one / double(draws) - p) <= 3 * std::sqrt(p * (1 - p) / draws));
}

TEST_CASE("simulation is deterministic per seed and independent of workers") {
  const ConcreteCtmc c({{0}, {1}}, {1.0, 0.0}, {{0, 1, 1.0}, {1, 0, 2.0}});
  CHECK(simulate(c, 20, 5) == simulate(c, 20, 5));
  CHECK_FALSE(simulate(c, 20, 5) == simulate(c, 20, 6));
  SimulationLimits limits;
  limits.max_steps = 15;
  CHECK(simulate_many(c, 12, limits, 9, 1) == simulate_many(c, 12, limits, 9, 4));
}

TEST_CASE("simulation horizon drops the overflowing jump") {
  const ConcreteCtmc c({{0}, {1}}, {1.0, 0.0}, {{0, 1, 1.0}, {1, 0, 1.0}});
  SimulationLimits limits;
  limits.max_steps = 1000;
  limits.horizon = 5.0;
  Rng rng(2);
  const auto o = simulate(c, limits, rng);
  double total = 0.0;
  for (double d : o.dwells) total += d;
  CHECK(total <= 5.0);
  CHECK(o.dwells.size() < 1000);
}

TEST_CASE("sample_index follows weights") {
  Rng rng(4);
  std::vector<int> counts(3, 0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) ++counts[sample_index({1.0, 0.0, 3.0}, rng)];
  CHECK(counts[1] == 0);
  CHECK(std::abs(counts[0] / double(draws) - 0.25) <= 3 * std::sqrt(0.25 * 0.75 / draws));
}

TEST_CASE("dataset round trip is exact") {
  const TimedObservation a{{{0, 1}, {1, 1}, {2, 0}}, {0.1, 1.0 / 3.0}};
  const TimedObservation b{{{4, 4}}, {}};
  const Dataset d(std::vector<TimedObservation>{a, b}, {"sc", "ph"});
  std::stringstream s;
  write_dataset(s, d);
  CHECK(read_dataset(s) == d);

  const Dataset u = d.without_times();
  std::stringstream su;
  write_dataset(su, u);
  CHECK(su.str().find("times") == std::string::npos);
  CHECK(read_dataset(su) == u);
}

TEST_CASE("dataset parser rejects bad input") {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return read_dataset(in);
  };
  CHECK_THROWS_AS(read(""), DatasetFormatError);
  CHECK_THROWS_AS(read("{\"kind\":\"timed\"}\n"), DatasetFormatError);
  CHECK_THROWS_AS(read("{\"kind\":\"untimed\"}\n{\"labels\":[[0],[1]],\"times\":[1.0]}\n"), DatasetFormatError);
  CHECK_THROWS_AS(read("{\"kind\":\"timed\"}\n{\"labels\":[[0],[1]]}\n"), DatasetFormatError);
  CHECK_THROWS_AS(read("{\"kind\":\"timed\"}\n{\"labels\":[[0],[1]],\"times\":[-1.0]}\n"), DatasetFormatError);
  CHECK_THROWS_AS(read("{\"kind\":\"bogus\"}\n{\"labels\":[[0]]}\n"), DatasetFormatError);
  CHECK_THROWS_AS(read("{\"kind\":\"timed\",\"observables\":[\"a\"]}\n{\"labels\":[[0,1]],\"times\":[]}\n"),
                  DatasetFormatError);
  try {
    read("{\"kind\":\"timed\"}\n{\"labels\":[[0],[1]],\"times\":[1.0]}\nnot json\n");
    FAIL("expected an error");
  } catch (const DatasetFormatError& e) {
    CHECK(e.line() == 3);
  }
}
