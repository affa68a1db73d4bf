#include <random>
#include <unordered_set>

#include "doctest.h"
#include "hrn/generator.hpp"
#include "hrn/kernels.hpp"
#include "oracles.hpp"

using namespace hrn;

namespace {

HybridParams random_params(std::mt19937_64& rng, bool extended) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double w[5];
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    w[i] = (i >= 3 && !extended) ? 0.0 : u(rng) + 0.05;
    sum += w[i];
  }
  HybridParams th{w[0] / sum, w[1] / sum, 0.0, u(rng), 0.1 + 3.0 * u(rng), 0.1 + 3.0 * u(rng),
                  w[3] / sum, w[4] / sum};
  th.gamma = 1.0 - th.alpha - th.beta - th.xi - th.eta;
  return th;
}

}  // namespace

TEST_SUITE("model-core") {

TEST_CASE("seed state kernels") {
  const NetworkState seed;
  const auto th = make_params(0.2, 0.5, 0.7, 0.4, 2.0);
  CHECK(attach_prob_in(seed, 1, th) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(attach_prob_out(seed, 1, th) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(attach_prob_in(seed, 2, th), std::out_of_range);
  CHECK_THROWS_AS(attach_prob_out(seed, 0, th), std::out_of_range);
}

TEST_CASE("two-node hand evaluation") {
  // Seed then 1 -> 2: in-degrees (1, 1), 2 edges of mass.
  NetworkState s;
  s.apply(Scenario::NewTarget, 1, 0);
  auto th = make_params(0.3, 0.3, 1.0, 1.0, 1.0);
  CHECK(attach_prob_in(s, 1, th) == doctest::Approx(0.5));
  // Seed then 2 -> 1: out-degrees (1, 1).
  NetworkState t;
  t.apply(Scenario::NewSource, 0, 1);
  CHECK(attach_prob_out(t, 1, th) == doctest::Approx(0.5));
  // In-degrees (2, 0) after 2 -> 1: (2 + 1) / (2 + 2) = 0.75.
  CHECK(attach_prob_in(t, 1, th) == doctest::Approx(0.75));
  CHECK(attach_prob_in(t, 2, th) == doctest::Approx(0.25));
  th.p = 0.0;
  CHECK(attach_prob_in(t, 1, th) == doctest::Approx(0.5));
  CHECK(attach_prob_in(t, 2, th) == doctest::Approx(0.5));
  CHECK(attach_prob_out(t, 2, th) == doctest::Approx(0.5));
}

TEST_CASE("kernels sum to one on reachable states") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    const auto th = random_params(rng, rep % 2 == 1);
    Simulator sim(th, rng());
    sim.run(rep * 3);
    const auto& s = sim.state();
    double in = 0.0;
    double out = 0.0;
    for (NodeId i = 1; i <= s.node_count(); ++i) {
      in += attach_prob_in(s, i, th);
      out += attach_prob_out(s, i, th);
      CHECK(attach_prob_in(s, i, th) ==
            doctest::Approx(oracle::kernel(std::vector<double>(s.in_degrees().begin(),
                                                               s.in_degrees().end()),
                                           i - 1, th.p, th.delta_in))
                .epsilon(1e-13));
    }
    CHECK(std::abs(in - 1.0) < 1e-12);
    CHECK(std::abs(out - 1.0) < 1e-12);
  }
}

TEST_CASE("step_distribution on the seed") {
  const auto th = make_params(0.2, 0.5, 0.7, 0.4, 2.0);
  const auto dist = step_distribution(NetworkState{}, th);
  REQUIRE(dist.size() == 3);
  for (const auto& o : dist) {
    switch (o.scenario) {
      case Scenario::NewSource:
        CHECK(o.source == 2);
        CHECK(o.target == 1);
        CHECK(o.probability == doctest::Approx(0.2));
        break;
      case Scenario::Existing:
        CHECK(o.source == 1);
        CHECK(o.target == 1);
        CHECK(o.probability == doctest::Approx(0.5));
        break;
      case Scenario::NewTarget:
        CHECK(o.source == 1);
        CHECK(o.target == 2);
        CHECK(o.probability == doctest::Approx(0.3));
        break;
      default:
        FAIL("unexpected scenario");
    }
  }
}

TEST_CASE("step_distribution with xi = 1") {
  const HybridParams th{0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 0.0};
  Simulator sim(make_params(0.3, 0.3, 0.5, 1.0, 1.0), 3);
  sim.run(4);
  const auto dist = step_distribution(sim.state(), th);
  REQUIRE(dist.size() == 1);
  CHECK(dist[0].scenario == Scenario::NewSelfLoop);
  CHECK(dist[0].source == sim.state().node_count() + 1);
  CHECK(dist[0].target == dist[0].source);
  CHECK(dist[0].probability == 1.0);
}

TEST_CASE("step_distribution sums to one up to 50 nodes") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const auto th = random_params(rng, rep % 3 == 0);
    Simulator sim(th, rng());
    while (sim.state().node_count() < static_cast<std::size_t>(1 + rep * 49 / 29)) sim.step();
    if (sim.state().node_count() > 50) continue;
    const auto dist = step_distribution(sim.state(), th);
    double total = 0.0;
    for (const auto& o : dist) total += o.probability;
    CHECK(std::abs(total - 1.0) < 1e-12);
    ++checked;
  }
  CHECK(checked >= 25);
}

TEST_CASE("in-degree increment probability equals (alpha + beta) times the in-kernel") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const auto th = random_params(rng, rep % 2 == 0);
    Simulator sim(th, rng());
    sim.run(20);
    const auto& s = sim.state();
    const auto dist = step_distribution(s, th);
    for (NodeId i = 1; i <= s.node_count(); ++i) {
      double up_in = 0.0;
      double up_out = 0.0;
      for (const auto& o : dist) {
        if (o.target == i) up_in += o.probability;
        if (o.source == i) up_out += o.probability;
      }
      CHECK(up_in == doctest::Approx((th.alpha + th.beta) * attach_prob_in(s, i, th)).epsilon(1e-12));
      CHECK(up_out ==
            doctest::Approx((th.beta + th.gamma) * attach_prob_out(s, i, th)).epsilon(1e-12));
    }
  }
}

TEST_CASE("classify_scenario") {
  const std::unordered_set<NodeId> prev{1, 2};
  CHECK(classify_scenario(prev, EdgeRecord{5, 2}) == Scenario::NewSource);
  CHECK(classify_scenario(prev, EdgeRecord{2, 2}) == Scenario::Existing);
  CHECK(classify_scenario(prev, EdgeRecord{1, 9}) == Scenario::NewTarget);
  CHECK(classify_scenario(prev, EdgeRecord{4, 4}) == Scenario::NewSelfLoop);
  CHECK(classify_scenario(prev, EdgeRecord{7, 8}) == Scenario::NewPair);
  CHECK(classify_scenario(2, EdgeRecord{3, 1}) == Scenario::NewSource);
  CHECK(classify_scenario(2, EdgeRecord{3, 3}) == Scenario::NewSelfLoop);
  CHECK_THROWS_AS(classify_scenario(prev, EdgeRecord{0, 1}), std::invalid_argument);
}

TEST_CASE("classification reproduces generator labels") {
  const auto th = make_params(0.2, 0.5, 0.6, 1.0, 1.5, 0.05, 0.05);
  Simulator sim(th, 99);
  sim.run(5000);
  std::unordered_set<NodeId> seen{1};
  for (const auto& r : sim.log().records) {
    REQUIRE(r.scenario.has_value());
    CHECK(classify_scenario(seen, r) == *r.scenario);
    seen.insert(r.source);
    seen.insert(r.target);
  }
}

TEST_CASE("network state bookkeeping") {
  NetworkState s;
  CHECK(s.node_count() == 1);
  CHECK(s.total_edges() == 1);
  CHECK(s.creation_step(1) == 0);
  auto [a, b] = s.apply(Scenario::NewPair, 0, 0);
  CHECK(a == 2);
  CHECK(b == 3);
  CHECK(s.creation_step(3) == 1);
  auto [c, d] = s.apply(Scenario::NewSelfLoop, 0, 0);
  CHECK(c == 4);
  CHECK(d == 4);
  CHECK(s.in_degree(4) == 1);
  CHECK(s.out_degree(4) == 1);
  CHECK(s.step() == 2);
  CHECK_THROWS_AS(s.in_degree(5), std::out_of_range);
  CHECK(scenario_from_int(3) == Scenario::NewTarget);
  CHECK_THROWS_AS(scenario_from_int(6), std::invalid_argument);
  CHECK(fresh_node_count(Scenario::NewPair) == 2);
  CHECK(fresh_node_count(Scenario::Existing) == 0);
}

}
