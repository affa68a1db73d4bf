#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "hrn/generator.hpp"
#include "oracles.hpp"

using namespace hrn;

TEST_SUITE("generator") {

TEST_CASE("config validation") {
  SimulationConfig c{make_params(0.3, 0.3, 0.5, 1.0, 1.0)};
  c.n_edges = 0;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c.n_edges = 10;
  c.snapshot_steps = {5, 11};
  CHECK_THROWS_AS(validate(c), ValidationError);
  c.snapshot_steps = {5, 3};
  CHECK_THROWS_AS(validate(c), ValidationError);
  c.snapshot_steps = {3, 10};
  CHECK_NOTHROW(validate(c));
  c.params = HybridParams{0.0, 1.0, 0.0, 0.5, 1.0, 1.0};
  CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("xi = 1 adds a fresh self-looped node every step") {
  SimulationConfig c{HybridParams{0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 0.0}};
  c.n_edges = 50;
  const auto r = simulate(c);
  CHECK(r.state.node_count() == 51);
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    CHECK(r.log.records[i].source == i + 2);
    CHECK(r.log.records[i].target == i + 2);
  }
}

TEST_CASE("conservation after every step") {
  const auto th = make_params(0.2, 0.5, 0.6, 0.8, 1.5, 0.05, 0.1);
  Simulator sim(th, 4);
  std::uint64_t fresh = 0;
  for (int k = 1; k <= 2000; ++k) {
    const auto& r = sim.step();
    fresh += static_cast<std::uint64_t>(fresh_node_count(*r.scenario));
    const auto& s = sim.state();
    const auto in = std::accumulate(s.in_degrees().begin(), s.in_degrees().end(), std::uint64_t{0});
    const auto out =
        std::accumulate(s.out_degrees().begin(), s.out_degrees().end(), std::uint64_t{0});
    REQUIRE(in == static_cast<std::uint64_t>(k) + 1);
    REQUIRE(out == static_cast<std::uint64_t>(k) + 1);
    REQUIRE(s.node_count() == 1 + fresh);
    REQUIRE(r.time == k);
  }
}

TEST_CASE("node count concentrates at 1 - beta") {
  SimulationConfig c{make_params(0.1, 0.8, 0.8, 1.3, 0.7)};
  c.n_edges = 10'000;
  for (std::uint64_t s = 0; s < 5; ++s) {
    c.seed = s;
    const auto r = simulate(c);
    CHECK(std::abs(static_cast<double>(r.state.node_count()) / 1e4 - 0.2) < 0.02);
  }
}

TEST_CASE("scenario frequencies within three binomial deviations") {
  const auto th = make_params(0.45, 0.1, 0.6, 1.3, 0.7);
  SimulationConfig c{th};
  c.n_edges = 10'000;
  c.seed = 21;
  const auto r = simulate(c);
  std::array<double, 5> n{};
  for (const auto& rec : r.log.records) n[to_int(*rec.scenario) - 1] += 1.0;
  const double probs[] = {th.alpha, th.beta, th.gamma};
  for (int j = 0; j < 3; ++j) {
    const double sd = std::sqrt(probs[j] * (1 - probs[j]) / 1e4);
    CHECK(std::abs(n[j] / 1e4 - probs[j]) < 3 * sd);
  }
}

TEST_CASE("two-step histories match enumeration") {
  const auto th = make_params(0.3, 0.4, 0.5, 1.0, 1.0);
  const auto exact = oracle::enumerate_histories(th, 2);
  double total = 0.0;
  for (const auto& [h, pr] : exact) total += pr;
  CHECK(std::abs(total - 1.0) < 1e-12);

  std::map<oracle::History, double> freq;
  const int runs = 100'000;
  for (int i = 0; i < runs; ++i) {
    Simulator sim(th, replicate_seed(2024, static_cast<std::uint64_t>(i)), false);
    sim.run(2);
    oracle::History h;
    for (const auto& r : sim.log().records) h.emplace_back(r.source, r.target);
    freq[h] += 1.0 / runs;
  }
  double tv = 0.0;
  for (const auto& [h, pr] : exact) {
    const auto it = freq.find(h);
    tv += std::abs(pr - (it == freq.end() ? 0.0 : it->second));
  }
  for (const auto& [h, f] : freq) {
    if (!exact.count(h)) tv += f;
  }
  CHECK(0.5 * tv < 0.01);
}

TEST_CASE("identical seeds give identical runs") {
  SimulationConfig c{make_params(0.2, 0.5, 0.6, 0.8, 1.5)};
  c.n_edges = 3000;
  c.seed = 77;
  c.snapshot_steps = {10, 3000};
  const auto a = simulate(c);
  const auto b = simulate(c);
  CHECK(a.log == b.log);
  REQUIRE(a.snapshots.size() == 2);
  CHECK(a.snapshots[0].step == 10);
  CHECK(a.snapshots[0].counts.n_edges == 11);
  CHECK(a.snapshots[1].counts == degree_counts(a.state));
  c.seed = 78;
  CHECK_FALSE(simulate(c).log == a.log);
}

TEST_CASE("replicates are independent of worker count") {
  SimulationConfig c{make_params(0.2, 0.5, 0.6, 0.8, 1.5)};
  c.n_edges = 2000;
  c.seed = 5;
  const auto one = simulate_replicates(c, 4, 1);
  const auto four = simulate_replicates(c, 4, 4);
  REQUIRE(one.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(one[i].log == four[i].log);
    CHECK(one[i].seed == replicate_seed(5, i));
  }
  auto single = c;
  single.seed = replicate_seed(5, 0);
  CHECK(simulate(single).log == one[0].log);
  CHECK_FALSE(one[0].log == one[1].log);
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(8, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

}
