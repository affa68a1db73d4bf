#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrn/likelihood.hpp"
#include "hrn/params.hpp"

namespace hrn {

// ---------------------------------------------------------------------------
// Generic derivative-free minimizer

struct SimplexOptions {
  std::size_t max_iters = 10'000;
  double f_tol = 1e-9;  // spread of objective values across the simplex
  double x_tol = 1e-7;  // max coordinate distance of any vertex from the best
};

struct SimplexOutcome {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  bool collapsed = false;  // non-finite best vertex or degenerate simplex
};

/// Nelder-Mead minimization (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). The initial simplex is x0 plus x0 + step_i e_i. Non-finite
/// objective values are treated as +inf.
SimplexOutcome nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                    std::vector<double> x0, std::span<const double> step,
                                    const SimplexOptions& options);

// ---------------------------------------------------------------------------
// Likelihood fitting

struct NelderMeadConfig {
  HybridParams initial_point{};  // (1/3, 1/3, 1/3, 1/2, 1, 1) by default
  /// Initial simplex spread per transformed coordinate; empty means 0.5 each.
  std::vector<double> scale;
  std::size_t max_iters = 10'000;
  double f_tol = 1e-9;
  double x_tol = 1e-7;
  /// Fix the scenario probabilities at their closed-form maximizer and search
  /// only (p, delta_in, delta_out). The likelihood is separable, so the
  /// optimum is unchanged; the full search is kept for comparison.
  bool profile_scenarios = true;
  /// Restarts from the reported optimum after convergence.
  std::size_t restarts = 2;
};

void validate(const NelderMeadConfig& config);

enum class PointSummary : std::uint8_t { Mean, Median };

struct MhStepSizes {
  double probability = 0.01;  // alpha, beta, xi, eta, p (raw scale)
  double log_delta = 0.05;    // log delta_in, log delta_out
};

struct MhConfig {
  std::uint64_t burn_in = 10'000;
  std::uint64_t iterations = 20'000;
  std::uint64_t thinning = 500;
  MhStepSizes step_sizes{};
  /// Flat priors: scenario probabilities uniform on the simplex, p uniform on
  /// [0, 1], offsets uniform on (0, delta_upper].
  double delta_upper = 100.0;
  std::optional<HybridParams> initial_point;
  std::uint64_t seed = 1;
  PointSummary summary = PointSummary::Mean;
  std::size_t max_start_attempts = 100;
};

void validate(const MhConfig& config);

struct TraceRow {
  std::uint64_t iteration;
  HybridParams theta;
  double log_posterior;
};

struct EstimationResult {
  HybridParams point{};
  double log_likelihood = kNegInf;
  bool converged = false;
  std::string message;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  /// M-H only: fraction of accepted coordinate proposals after burn-in.
  std::optional<double> acceptance_rate;
  /// Thinned draws, one per `thinning` post-burn-in iterations.
  std::vector<TraceRow> trace;
  /// Running mean of the kept draws, one entry per trace row.
  std::vector<HybridParams> running_mean;
};

/// Maximizes log_likelihood over (alpha, beta, [xi, eta,] p, delta_in,
/// delta_out) in unconstrained coordinates: additive log-ratios against gamma,
/// logit p, log delta. Extended probabilities are free only when the data
/// contain the matching scenario or the initial point sets them.
/// Iteration exhaustion or a collapsed simplex yields converged = false.
EstimationResult fit_nelder_mead(const SufficientStats& stats, const NelderMeadConfig& config);

/// Random-walk Metropolis-Hastings, one Gaussian proposal per coordinate per
/// iteration. Scenario and p proposals are reflected into their feasible
/// intervals; offsets move on the log scale. Point = summary of kept draws.
/// Throws std::runtime_error when no start with finite likelihood is found.
EstimationResult fit_mh(const SufficientStats& stats, const MhConfig& config);

/// M-H, then Nelder-Mead started from the M-H point estimate. Returns the
/// Nelder-Mead result carrying the M-H trace and acceptance rate.
EstimationResult fit_integrated(const SufficientStats& stats, const MhConfig& mh_config,
                                const NelderMeadConfig& nm_template);

}  // namespace hrn
