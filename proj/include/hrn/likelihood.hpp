#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hrn/degree_stats.hpp"
#include "hrn/network.hpp"
#include "hrn/params.hpp"

namespace hrn {

/// Covariates of one attachment term: the pre-step degree of the chosen
/// endpoint, |V_{k-1}|, and the step index k (= edges present before the step).
struct KernelTerm {
  double degree;
  double nodes;
  double step;
};

struct StepStats {
  Scenario scenario;
  std::uint64_t step;        // k
  std::uint64_t node_count;  // |V_{k-1}|
  std::int64_t in_degree;    // D_in of the target before the step; -1 unless scenario 1 or 2
  std::int64_t out_degree;   // D_out of the source before the step; -1 unless scenario 2 or 3
};

struct ScenarioCounts {
  std::array<std::uint64_t, 5> n{};

  std::uint64_t operator[](Scenario s) const noexcept { return n[to_int(s) - 1]; }
  std::uint64_t& operator[](Scenario s) noexcept { return n[to_int(s) - 1]; }
  std::uint64_t total() const noexcept;
};

/// Everything the likelihood needs from an edge log.
struct SufficientStats {
  std::vector<StepStats> steps;
  ScenarioCounts counts;
  /// Terms of the in-kernel (scenarios 1, 2) and out-kernel (2, 3) products.
  std::vector<KernelTerm> in_terms;
  std::vector<KernelTerm> out_terms;
  /// Set when the first record formed the initial graph; it contributes to
  /// `counts` only.
  std::optional<Scenario> initial_scenario;
};

/// One pass over the log rebuilding pre-step degrees and node counts.
///
/// Ids must be dense in creation order: a fresh node carries the next unused
/// id (source before target). Seed-origin logs continue node 1's self-loop;
/// first-record logs start from the first record (a self-loop on 1 or 1 -> 2).
/// Logged scenario labels are checked against the classification.
/// Throws std::invalid_argument on unknown ids, label mismatches or
/// decreasing times.
SufficientStats replay(const EdgeLog& log);

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// n1 log alpha + n2 log beta + n3 log gamma + n4 log xi + n5 log eta, with
/// 0 log 0 = 0 and -inf when a zero probability has a positive count.
double scenario_log_likelihood(const ScenarioCounts& counts, const HybridParams& theta);

/// sum over terms of log[(p D + delta)|V| + (1 - p) k] - log[k |V| + |V|^2 delta]
double kernel_log_likelihood(std::span<const KernelTerm> terms, double p, double delta);

/// Only the p-dependent part: sum of log[(p D + delta)|V| + (1 - p) k].
double kernel_log_numerator(std::span<const KernelTerm> terms, double p, double delta);

/// Only the p-free part: sum of log[k |V| + |V|^2 delta].
double kernel_log_normalizer(std::span<const KernelTerm> terms, double delta);

double log_likelihood(const SufficientStats& stats, const HybridParams& theta);

struct Score {
  double delta_in;
  double delta_out;
  double p;
};

/// Analytic partial derivatives of log_likelihood.
Score score(const SufficientStats& stats, const HybridParams& theta);

struct ScenarioEstimate {
  double alpha;
  double beta;
  double gamma;
  double xi;
  double eta;
  bool regular;  // alpha < 1, beta < 1 and alpha + beta > 0
};

/// Scenario frequencies n_j / n. Throws std::invalid_argument on empty stats.
ScenarioEstimate mle_scenarios(const SufficientStats& stats);
ScenarioEstimate mle_scenarios(const ScenarioCounts& counts);

struct ScenarioFrequencies {
  double alpha;
  double beta;
  double gamma;
};

struct ApproxScoreSolution {
  double delta_tilde;
  double delta;      // offset_from_effective(delta_tilde, p, beta)
  double residual;   // lhs - rhs at the root
};

/// lhs - rhs of the approximate score equation at delta_tilde:
///   sum_m (N_{>m}/n) / (m + dt) - [w / dt + c (1 - beta) / (1 + dt (1 - beta))]
/// with (w, c) = (gamma, alpha + beta) for in-degrees and (alpha, beta + gamma)
/// for out-degrees, n = counts.n_edges.
double approx_score_residual(const DegreeCounts& counts, const ScenarioFrequencies& freqs,
                             Direction direction, double delta_tilde);

/// Root of approx_score_residual by log-grid bracketing and bisection.
/// Throws std::runtime_error when no sign change is found.
ApproxScoreSolution approx_score_solve(const DegreeCounts& counts, const ScenarioFrequencies& freqs,
                                       Direction direction, double p);

}  // namespace hrn
