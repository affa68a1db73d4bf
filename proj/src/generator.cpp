#include "hrn/generator.hpp"

#include <algorithm>
#include <string>

namespace hrn {

std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) {
  std::uint64_t z = master_seed + (replicate + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void validate(const SimulationConfig& config) {
  validate(config.params);
  if (config.n_edges < 1) throw ValidationError("n_edges must be at least 1");
  std::uint64_t previous = 0;
  for (auto s : config.snapshot_steps) {
    if (s < 1 || s > config.n_edges) {
      throw ValidationError("snapshot step " + std::to_string(s) + " outside [1, n_edges]");
    }
    if (s < previous) throw ValidationError("snapshot steps must be sorted");
    previous = s;
  }
}

Simulator::Simulator(const HybridParams& params, std::uint64_t seed, bool log_scenarios)
    : params_(params), engine_(seed), log_scenarios_(log_scenarios) {
  validate(params_);
  edge_targets_.push_back(1);
  edge_sources_.push_back(1);
}

void Simulator::reserve(std::uint64_t steps) {
  log_.records.reserve(log_.records.size() + steps);
  edge_targets_.reserve(edge_targets_.size() + steps);
  edge_sources_.reserve(edge_sources_.size() + steps);
}

Scenario Simulator::draw_scenario() {
  const double u = unit_(engine_);
  double edge = params_.alpha;
  if (u < edge) return Scenario::NewSource;
  edge += params_.beta;
  if (u < edge) return Scenario::Existing;
  edge += params_.gamma;
  if (u < edge || (params_.xi == 0.0 && params_.eta == 0.0)) return Scenario::NewTarget;
  edge += params_.xi;
  if (u < edge || params_.eta == 0.0) return Scenario::NewSelfLoop;
  return Scenario::NewPair;
}

NodeId Simulator::draw_endpoint(const std::vector<NodeId>& endpoints, double delta) {
  const auto nodes = state_.node_count();
  auto uniform_node = [&] {
    return std::uniform_int_distribution<NodeId>(1, nodes)(engine_);
  };
  if (params_.p < 1.0 && unit_(engine_) >= params_.p) return uniform_node();
  const double offset_mass = delta * static_cast<double>(nodes);
  const double total = offset_mass + static_cast<double>(endpoints.size());
  if (unit_(engine_) * total < offset_mass) return uniform_node();
  return endpoints[std::uniform_int_distribution<std::size_t>(0, endpoints.size() - 1)(engine_)];
}

const EdgeRecord& Simulator::step() {
  const Scenario scenario = draw_scenario();
  NodeId source = 0;
  NodeId target = 0;
  switch (scenario) {
    case Scenario::NewSource:
      target = draw_endpoint(edge_targets_, params_.delta_in);
      break;
    case Scenario::Existing:
      source = draw_endpoint(edge_sources_, params_.delta_out);
      target = draw_endpoint(edge_targets_, params_.delta_in);
      break;
    case Scenario::NewTarget:
      source = draw_endpoint(edge_sources_, params_.delta_out);
      break;
    case Scenario::NewSelfLoop:
    case Scenario::NewPair:
      break;
  }
  std::tie(source, target) = state_.apply(scenario, source, target);
  edge_sources_.push_back(source);
  edge_targets_.push_back(target);

  EdgeRecord record{source, target, static_cast<std::int64_t>(state_.step()), std::nullopt};
  if (log_scenarios_) record.scenario = scenario;
  log_.records.push_back(record);
  return log_.records.back();
}

void Simulator::run(std::uint64_t steps) {
  reserve(steps);
  for (std::uint64_t i = 0; i < steps; ++i) step();
}

SimulationResult simulate(const SimulationConfig& config) {
  validate(config);
  Simulator sim(config.params, config.seed, config.log_scenarios);
  sim.reserve(config.n_edges);
  SimulationResult result;
  result.seed = config.seed;
  auto next_snapshot = config.snapshot_steps.begin();
  for (std::uint64_t k = 1; k <= config.n_edges; ++k) {
    sim.step();
    while (next_snapshot != config.snapshot_steps.end() && *next_snapshot == k) {
      result.snapshots.push_back({k, degree_counts(sim.state())});
      ++next_snapshot;
    }
  }
  result.log = std::move(sim).take_log();
  result.state = std::move(sim).take_state();
  return result;
}

std::vector<SimulationResult> simulate_replicates(const SimulationConfig& config, std::size_t r,
                                                  std::size_t worker_count) {
  validate(config);
  if (r < 1) throw ValidationError("replicate count must be at least 1");
  std::vector<SimulationResult> results(r);
  parallel_for(r, worker_count, [&](std::size_t i) {
    SimulationConfig replica = config;
    replica.seed = replicate_seed(config.seed, i);
    results[i] = simulate(replica);
  });
  return results;
}

}  // namespace hrn
