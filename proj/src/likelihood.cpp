#include "hrn/likelihood.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hrn/kernels.hpp"

namespace hrn {

std::uint64_t ScenarioCounts::total() const noexcept {
  std::uint64_t t = 0;
  for (auto v : n) t += v;
  return t;
}

namespace {

[[noreturn]] void replay_error(std::size_t index, const std::string& what) {
  throw std::invalid_argument("edge log record " + std::to_string(index + 1) + ": " + what);
}

void check_fresh_ids(std::size_t index, Scenario s, const EdgeRecord& r, std::size_t nodes) {
  const NodeId fresh = nodes + 1;
  auto require = [&](NodeId id, NodeId expected) {
    if (id != expected) {
      replay_error(index, "node " + std::to_string(id) +
                              " has not appeared yet (next fresh id is " +
                              std::to_string(expected) + ")");
    }
  };
  switch (s) {
    case Scenario::NewSource:
      require(r.source, fresh);
      break;
    case Scenario::NewTarget:
      require(r.target, fresh);
      break;
    case Scenario::NewSelfLoop:
      require(r.source, fresh);
      break;
    case Scenario::NewPair:
      require(r.source, fresh);
      require(r.target, fresh + 1);
      break;
    case Scenario::Existing:
      break;
  }
}

void check_label(std::size_t index, const EdgeRecord& r, Scenario derived) {
  if (r.scenario && *r.scenario != derived) {
    replay_error(index, "logged scenario " + std::to_string(to_int(*r.scenario)) +
                            " disagrees with classified scenario " +
                            std::to_string(to_int(derived)));
  }
}

}  // namespace

SufficientStats replay(const EdgeLog& log) {
  SufficientStats stats;
  if (log.empty()) return stats;

  NetworkState state;
  std::size_t first = 0;
  if (log.origin == LogOrigin::FirstRecord) {
    const auto& r = log.records.front();
    const bool self_loop = r.source == 1 && r.target == 1;
    if (!self_loop && !(r.source == 1 && r.target == 2)) {
      replay_error(0, "a first-record log must start with 1 -> 1 or 1 -> 2 (relabel the log first)");
    }
    const Scenario s = self_loop ? Scenario::NewSelfLoop : Scenario::NewPair;
    check_label(0, r, s);
    state = NetworkState::from_initial_edge(self_loop);
    stats.initial_scenario = s;
    ++stats.counts[s];
    first = 1;
  }

  stats.steps.reserve(log.size() - first);
  std::int64_t last_time = log.records.front().time;
  for (std::size_t i = first; i < log.size(); ++i) {
    const auto& r = log.records[i];
    if (r.time < last_time) replay_error(i, "timestamps must be nondecreasing");
    last_time = r.time;

    const std::size_t nodes = state.node_count();
    const Scenario s = classify_scenario(nodes, r);
    check_fresh_ids(i, s, r, nodes);
    check_label(i, r, s);

    StepStats st{s, state.total_edges(), nodes, -1, -1};
    const auto k = static_cast<double>(st.step);
    const auto v = static_cast<double>(nodes);
    if (s == Scenario::NewSource || s == Scenario::Existing) {
      st.in_degree = static_cast<std::int64_t>(state.in_degree(r.target));
      stats.in_terms.push_back({static_cast<double>(st.in_degree), v, k});
    }
    if (s == Scenario::Existing || s == Scenario::NewTarget) {
      st.out_degree = static_cast<std::int64_t>(state.out_degree(r.source));
      stats.out_terms.push_back({static_cast<double>(st.out_degree), v, k});
    }
    stats.steps.push_back(st);
    ++stats.counts[s];
    state.apply(s, r.source, r.target);
  }
  return stats;
}

double scenario_log_likelihood(const ScenarioCounts& counts, const HybridParams& theta) {
  const double probs[] = {theta.alpha, theta.beta, theta.gamma, theta.xi, theta.eta};
  double total = 0.0;
  for (int j = 0; j < 5; ++j) {
    if (counts.n[j] == 0) continue;
    if (!(probs[j] > 0.0)) return kNegInf;
    total += static_cast<double>(counts.n[j]) * std::log(probs[j]);
  }
  return total;
}

double kernel_log_numerator(std::span<const KernelTerm> terms, double p, double delta) {
  const double q = 1.0 - p;
  double total = 0.0;
  for (const auto& t : terms) total += std::log((p * t.degree + delta) * t.nodes + q * t.step);
  return total;
}

double kernel_log_normalizer(std::span<const KernelTerm> terms, double delta) {
  double total = 0.0;
  for (const auto& t : terms) total += std::log(t.nodes * (t.step + t.nodes * delta));
  return total;
}

double kernel_log_likelihood(std::span<const KernelTerm> terms, double p, double delta) {
  return kernel_log_numerator(terms, p, delta) - kernel_log_normalizer(terms, delta);
}

double log_likelihood(const SufficientStats& stats, const HybridParams& theta) {
  validate(theta);
  const double scen = scenario_log_likelihood(stats.counts, theta);
  if (scen == kNegInf) return kNegInf;
  return scen + kernel_log_likelihood(stats.in_terms, theta.p, theta.delta_in) +
         kernel_log_likelihood(stats.out_terms, theta.p, theta.delta_out);
}

Score score(const SufficientStats& stats, const HybridParams& theta) {
  validate(theta);
  Score out{0.0, 0.0, 0.0};
  const double q = 1.0 - theta.p;
  for (const auto& t : stats.in_terms) {
    const double num = (theta.p * t.degree + theta.delta_in) * t.nodes + q * t.step;
    out.delta_in += t.nodes / num - t.nodes / (t.step + t.nodes * theta.delta_in);
    out.p += (t.degree * t.nodes - t.step) / num;
  }
  for (const auto& t : stats.out_terms) {
    const double num = (theta.p * t.degree + theta.delta_out) * t.nodes + q * t.step;
    out.delta_out += t.nodes / num - t.nodes / (t.step + t.nodes * theta.delta_out);
    out.p += (t.degree * t.nodes - t.step) / num;
  }
  return out;
}

ScenarioEstimate mle_scenarios(const ScenarioCounts& counts) {
  const auto total = counts.total();
  if (total == 0) throw std::invalid_argument("mle_scenarios: empty edge log");
  const auto n = static_cast<double>(total);
  ScenarioEstimate est{};
  est.alpha = static_cast<double>(counts.n[0]) / n;
  est.beta = static_cast<double>(counts.n[1]) / n;
  est.gamma = static_cast<double>(counts.n[2]) / n;
  est.xi = static_cast<double>(counts.n[3]) / n;
  est.eta = static_cast<double>(counts.n[4]) / n;
  est.regular = est.alpha < 1.0 && est.beta < 1.0 && est.alpha + est.beta > 0.0;
  return est;
}

ScenarioEstimate mle_scenarios(const SufficientStats& stats) { return mle_scenarios(stats.counts); }

double approx_score_residual(const DegreeCounts& counts, const ScenarioFrequencies& freqs,
                             Direction direction, double delta_tilde) {
  if (!(delta_tilde > 0.0)) throw std::domain_error("delta_tilde must be positive");
  if (counts.n_edges == 0) throw std::invalid_argument("approx score needs a nonempty network");
  const auto tail = strict_tail_counts(counts, direction);
  const auto n = static_cast<double>(counts.n_edges);
  double lhs = 0.0;
  for (std::size_t m = 0; m < tail.size(); ++m) {
    if (tail[m] == 0) break;
    lhs += static_cast<double>(tail[m]) / n / (static_cast<double>(m) + delta_tilde);
  }
  const bool in = direction == Direction::In;
  const double born_one = in ? freqs.gamma : freqs.alpha;
  const double growth = in ? freqs.alpha + freqs.beta : freqs.beta + freqs.gamma;
  const double one_minus_beta = 1.0 - freqs.beta;
  const double rhs =
      born_one / delta_tilde + growth * one_minus_beta / (1.0 + delta_tilde * one_minus_beta);
  return lhs - rhs;
}

ApproxScoreSolution approx_score_solve(const DegreeCounts& counts, const ScenarioFrequencies& freqs,
                                       Direction direction, double p) {
  auto f = [&](double dt) { return approx_score_residual(counts, freqs, direction, dt); };

  constexpr int kGrid = 241;
  const double lo_exp = -4.0;
  const double hi_exp = 4.0;
  double a = 0.0;
  double b = 0.0;
  double fa = 0.0;
  bool bracketed = false;
  double prev_x = std::pow(10.0, lo_exp);
  double prev_f = f(prev_x);
  for (int i = 1; i < kGrid && !bracketed; ++i) {
    const double x = std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (kGrid - 1));
    const double fx = f(x);
    if (prev_f == 0.0 || (prev_f < 0.0) != (fx < 0.0)) {
      a = prev_x;
      b = x;
      fa = prev_f;
      bracketed = true;
    }
    prev_x = x;
    prev_f = fx;
  }
  if (!bracketed) {
    throw std::runtime_error("approximate score equation has no sign change on [1e-4, 1e4]");
  }
  for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) {
      a = b = mid;
      break;
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  ApproxScoreSolution sol{};
  sol.delta_tilde = 0.5 * (a + b);
  sol.residual = f(sol.delta_tilde);
  sol.delta = offset_from_effective(sol.delta_tilde, p, freqs.beta);
  return sol;
}

}  // namespace hrn
