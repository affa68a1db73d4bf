#include <cmath>
#include <random>

#include "doctest.h"
#include "hrn/generator.hpp"
#include "hrn/likelihood.hpp"
#include "oracles.hpp"

using namespace hrn;

namespace {

EdgeLog seed_log(std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  EdgeLog log;
  std::int64_t t = 0;
  for (auto [s, d] : edges) log.records.push_back({s, d, ++t, std::nullopt});
  return log;
}

double ll_at(const SufficientStats& st, HybridParams th, int coord, double value) {
  if (coord == 0) th.delta_in = value;
  if (coord == 1) th.delta_out = value;
  if (coord == 2) th.p = value;
  return log_likelihood(st, th);
}

}  // namespace

TEST_SUITE("likelihood") {

TEST_CASE("replay examples") {
  auto st = replay(seed_log({{2, 1}}));
  REQUIRE(st.steps.size() == 1);
  CHECK(st.steps[0].scenario == Scenario::NewSource);
  CHECK(st.steps[0].in_degree == 1);
  CHECK(st.steps[0].node_count == 1);
  CHECK(st.steps[0].step == 1);
  CHECK(st.counts[Scenario::NewSource] == 1);

  st = replay(seed_log({{1, 1}}));
  CHECK(st.steps[0].scenario == Scenario::Existing);
  CHECK(st.steps[0].in_degree == 1);
  CHECK(st.steps[0].out_degree == 1);
  CHECK(st.steps[0].node_count == 1);

  st = replay(EdgeLog{});
  CHECK(st.steps.empty());
  CHECK(st.counts.total() == 0);
}

TEST_CASE("replay rejects inconsistent logs") {
  CHECK_THROWS_WITH_AS(replay(seed_log({{1, 5}})), doctest::Contains("has not appeared"),
                       std::invalid_argument);
  auto log = seed_log({{2, 1}, {1, 1}});
  log.records[1].time = -3;
  CHECK_THROWS_WITH_AS(replay(log), doctest::Contains("nondecreasing"), std::invalid_argument);
  log = seed_log({{2, 1}});
  log.records[0].scenario = Scenario::Existing;
  CHECK_THROWS_AS(replay(log), std::invalid_argument);
  log = seed_log({{3, 4}});
  log.origin = LogOrigin::FirstRecord;
  CHECK_THROWS_AS(replay(log), std::invalid_argument);
}

TEST_CASE("first-record origin") {
  auto log = seed_log({{1, 2}, {3, 2}, {2, 1}});
  log.origin = LogOrigin::FirstRecord;
  const auto st = replay(log);
  CHECK(st.initial_scenario == Scenario::NewPair);
  CHECK(st.counts[Scenario::NewPair] == 1);
  REQUIRE(st.steps.size() == 2);
  CHECK(st.steps[0].scenario == Scenario::NewSource);
  CHECK(st.steps[0].node_count == 2);
  CHECK(st.steps[0].step == 1);
  CHECK(st.steps[0].in_degree == 1);
  CHECK(st.steps[1].scenario == Scenario::Existing);
  CHECK(st.steps[1].out_degree == 0);
  CHECK(st.steps[1].in_degree == 0);
  CHECK(st.steps[1].node_count == 3);
}

TEST_CASE("one-record logs reduce to the scenario probability") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.9);
  for (int i = 0; i < 20; ++i) {
    const double a = u(rng) / 2;
    const double b = u(rng) / 2;
    const auto th = make_params(a, b, u(rng), 0.1 + 3 * u(rng), 0.1 + 3 * u(rng));
    CHECK(log_likelihood(replay(seed_log({{2, 1}})), th) == doctest::Approx(std::log(a)));
    CHECK(log_likelihood(replay(seed_log({{1, 1}})), th) == doctest::Approx(std::log(b)));
    CHECK(log_likelihood(replay(seed_log({{1, 2}})), th) == doctest::Approx(std::log(th.gamma)));
  }
}

TEST_CASE("likelihood normalizes over all short histories") {
  const HybridParams cases[] = {
      make_params(0.3, 0.4, 0.5, 1.0, 1.0),
      make_params(0.1, 0.8, 0.8, 1.3, 0.7),
      make_params(0.2, 0.3, 0.35, 0.4, 2.5, 0.1, 0.15),
      make_params(0.5, 0.2, 1.0, 0.05, 9.0),
  };
  for (const auto& th : cases) {
    for (int len = 1; len <= 2; ++len) {
      const auto histories = oracle::enumerate_histories(th, len);
      double total = 0.0;
      for (const auto& [h, pr] : histories) {
        EdgeLog log;
        for (std::size_t k = 0; k < h.size(); ++k) {
          log.records.push_back({h[k].first, h[k].second, static_cast<std::int64_t>(k)});
        }
        const double lik = std::exp(log_likelihood(replay(log), th));
        CHECK(lik == doctest::Approx(pr).epsilon(1e-12));
        total += lik;
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("zero probability with positive count gives -inf") {
  const auto th = make_params(0.0, 0.5, 0.5, 1.0, 1.0);
  CHECK(log_likelihood(replay(seed_log({{2, 1}})), th) == kNegInf);
  CHECK(std::isfinite(log_likelihood(replay(seed_log({{1, 1}})), th)));
}

TEST_CASE("score matches central differences") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int pair = 0; pair < 50; ++pair) {
    const double a = 0.05 + 0.4 * u(rng);
    const double b = 0.05 + 0.4 * u(rng);
    const auto truth = make_params(a, b, 0.05 + 0.9 * u(rng), 0.2 + 3 * u(rng), 0.2 + 3 * u(rng));
    Simulator sim(truth, rng());
    sim.run(200);
    const auto st = replay(sim.log());
    auto th = truth;
    th.p = 0.1 + 0.8 * u(rng);
    th.delta_in = 0.2 + 3 * u(rng);
    th.delta_out = 0.2 + 3 * u(rng);
    const auto sc = score(st, th);
    const double analytic[] = {sc.delta_in, sc.delta_out, sc.p};
    const double at[] = {th.delta_in, th.delta_out, th.p};
    for (int c = 0; c < 3; ++c) {
      const double h = 1e-5;
      const double fd = (ll_at(st, th, c, at[c] + h) - ll_at(st, th, c, at[c] - h)) / (2 * h);
      CHECK(std::abs(analytic[c] - fd) / (1.0 + std::abs(analytic[c])) < 1e-6);
    }
  }
}

TEST_CASE("score edge cases") {
  const auto th = make_params(0.3, 0.3, 0.6, 1.2, 0.8);
  CHECK(score(replay(seed_log({{1, 2}, {1, 3}})), th).delta_in == 0.0);
  CHECK(score(replay(seed_log({{2, 1}})), th).p == 0.0);
  CHECK(score(replay(seed_log({{1, 1}})), th).p == 0.0);
}

TEST_CASE("scenario MLE") {
  ScenarioCounts c;
  c.n = {1, 6, 3, 0, 0};
  const auto e = mle_scenarios(c);
  CHECK(e.alpha == doctest::Approx(0.1));
  CHECK(e.beta == doctest::Approx(0.6));
  CHECK(e.gamma == doctest::Approx(0.3));
  CHECK(e.regular);

  c.n = {0, 4, 0, 0, 0};
  CHECK(mle_scenarios(c).beta == 1.0);
  CHECK_FALSE(mle_scenarios(c).regular);
  CHECK_THROWS_AS(mle_scenarios(ScenarioCounts{}), std::invalid_argument);
}

TEST_CASE("scenario MLE maximizes the scenario part") {
  ScenarioCounts c;
  c.n = {120, 500, 300, 40, 40};
  const auto e = mle_scenarios(c);
  const HybridParams best{e.alpha, e.beta, e.gamma, 0.5, 1.0, 1.0, e.xi, e.eta};
  const double top = scenario_log_likelihood(c, best);
  const double step = 1e-3;
  double* fields[5];
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i == j) continue;
      auto th = best;
      fields[0] = &th.alpha;
      fields[1] = &th.beta;
      fields[2] = &th.gamma;
      fields[3] = &th.xi;
      fields[4] = &th.eta;
      *fields[i] += step;
      *fields[j] -= step;
      CHECK(scenario_log_likelihood(c, th) <= top);
    }
  }
}

TEST_CASE("simulated scenario MLE within binomial interval") {
  SimulationConfig cfg{make_params(0.45, 0.1, 0.6, 1.3, 0.7)};
  cfg.n_edges = 10'000;
  cfg.seed = 12;
  const auto e = mle_scenarios(replay(simulate(cfg).log));
  CHECK(std::abs(e.alpha - 0.45) < 3 * std::sqrt(0.45 * 0.55 / 1e4));
}

TEST_CASE("approximate score recovers the effective offset from limit frequencies") {
  for (const auto& th : {make_params(0.1, 0.8, 0.8, 1.3, 0.7), make_params(0.45, 0.1, 0.6, 1.3, 0.7),
                         make_params(0.3, 0.3, 0.9, 0.4, 2.0)}) {
    const auto pmf = limit_pmf(th);
    const auto d = derived_constants(th);
    const double n = 1e13;
    DegreeCounts counts;
    counts.n_edges = static_cast<std::uint64_t>(n);
    for (double v : pmf.psi_in) counts.in_counts.push_back(std::llround(v * n));
    for (double v : pmf.psi_out) counts.out_counts.push_back(std::llround(v * n));
    const ScenarioFrequencies f{th.alpha, th.beta, th.gamma};
    const auto in = approx_score_solve(counts, f, Direction::In, th.p);
    const auto out = approx_score_solve(counts, f, Direction::Out, th.p);
    CHECK(std::abs(in.delta_tilde - d.delta_in_tilde) < 1e-3);
    CHECK(std::abs(out.delta_tilde - d.delta_out_tilde) < 1e-3);
    CHECK(in.delta == doctest::Approx(th.delta_in).epsilon(1e-3));
    CHECK(std::abs(in.residual) < 1e-9);
  }
}

TEST_CASE("approximate score without a tail has no root") {
  DegreeCounts counts;
  counts.in_counts = {7};
  counts.out_counts = {7};
  counts.n_nodes = 7;
  counts.n_edges = 10;
  CHECK_THROWS_AS(approx_score_solve(counts, {0.5, 0.5, 0.0}, Direction::In, 0.5),
                  std::runtime_error);
}

TEST_CASE("approximate score residual is smallest near the truth") {
  const auto th = make_params(0.1, 0.8, 0.8, 1.3, 0.7);
  SimulationConfig cfg{th};
  cfg.n_edges = 100'000;
  cfg.seed = 31;
  const auto counts = degree_counts(simulate(cfg).state);
  const auto d = derived_constants(th);
  const ScenarioFrequencies f{th.alpha, th.beta, th.gamma};
  for (auto dir : {Direction::In, Direction::Out}) {
    const double dt = dir == Direction::In ? d.delta_in_tilde : d.delta_out_tilde;
    const double at = std::abs(approx_score_residual(counts, f, dir, dt));
    CHECK(at < std::abs(approx_score_residual(counts, f, dir, 0.8 * dt)));
    CHECK(at < std::abs(approx_score_residual(counts, f, dir, 1.2 * dt)));
  }
}

}
