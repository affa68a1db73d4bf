#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hrn/degree_stats.hpp"
#include "hrn/network.hpp"
#include "hrn/params.hpp"

namespace hrn {

/// The engine behind every random draw in the library. Seeds are recorded in
/// all CLI outputs; a seed fully determines a simulation or a chain.
using Engine = std::mt19937_64;

/// Per-replicate seed, derived from the master seed by the SplitMix64
/// finalizer applied to master + (r + 1) * golden-ratio increment.
std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate);

struct SimulationConfig {
  HybridParams params;
  std::uint64_t n_edges = 10'000;
  std::uint64_t seed = 0;
  bool log_scenarios = true;
  std::vector<std::uint64_t> snapshot_steps;  // sorted, within [1, n_edges]
};

void validate(const SimulationConfig& config);

struct DegreeSnapshot {
  std::uint64_t step;
  DegreeCounts counts;
};

struct SimulationResult {
  NetworkState state;
  EdgeLog log;
  std::vector<DegreeSnapshot> snapshots;
  std::uint64_t seed = 0;
};

/// Edge-by-edge simulator starting from the seed self-loop.
///
/// Each endpoint is drawn in two stages: with probability p preferentially,
/// otherwise uniformly over the current nodes. A preferential draw picks a
/// uniform node with probability delta |V| / (E + delta |V|) and otherwise the
/// endpoint of a uniformly chosen edge, which samples weights D + delta
/// exactly in O(1).
class Simulator {
 public:
  Simulator(const HybridParams& params, std::uint64_t seed, bool log_scenarios = true);

  /// Adds one edge; returns the logged record (time = step index).
  const EdgeRecord& step();
  void run(std::uint64_t steps);

  const NetworkState& state() const noexcept { return state_; }
  const EdgeLog& log() const noexcept { return log_; }
  const HybridParams& params() const noexcept { return params_; }

  NetworkState take_state() && { return std::move(state_); }
  EdgeLog take_log() && { return std::move(log_); }

  void reserve(std::uint64_t steps);

 private:
  Scenario draw_scenario();
  NodeId draw_endpoint(const std::vector<NodeId>& endpoints, double delta);

  HybridParams params_;
  Engine engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  NetworkState state_;
  EdgeLog log_;
  bool log_scenarios_;
  std::vector<NodeId> edge_targets_;  // target of every edge, seed included
  std::vector<NodeId> edge_sources_;
};

SimulationResult simulate(const SimulationConfig& config);

/// r independent runs with seeds replicate_seed(config.seed, i), i = 0..r-1.
/// Output order is replicate order for any worker count.
std::vector<SimulationResult> simulate_replicates(const SimulationConfig& config, std::size_t r,
                                                  std::size_t worker_count);

/// Runs fn(i) for i in [0, count) on up to worker_count threads.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t worker_count, Fn&& fn);

}  // namespace hrn

#include "hrn/detail/parallel.hpp"
