#pragma once

#include <unordered_set>
#include <vector>

#include "hrn/network.hpp"
#include "hrn/params.hpp"

namespace hrn {

/// Probability that the next scenario-1/2 edge points at node i:
///   p (D_in(i) + delta_in) / (n + delta_in |V|) + (1 - p) / |V|
/// with n = state.total_edges(). Throws std::out_of_range for unknown i.
double attach_prob_in(const NetworkState& state, NodeId i, const HybridParams& params);

/// Out-degree counterpart, used for the source of scenario-2/3 edges.
double attach_prob_out(const NetworkState& state, NodeId j, const HybridParams& params);

/// One outcome of the next step. Fresh nodes carry the ids they would be
/// assigned (node_count()+1, then +2).
struct StepOutcome {
  Scenario scenario;
  NodeId source;
  NodeId target;
  double probability;
};

/// Full conditional law of the next step, enumerated. Outcomes of zero
/// probability (scenario weight 0) are omitted. O(|V|^2) entries.
std::vector<StepOutcome> step_distribution(const NetworkState& state, const HybridParams& params);

/// Scenario implied by which endpoints are already in the graph.
Scenario classify_scenario(const std::unordered_set<NodeId>& previous_nodes,
                           const EdgeRecord& record);

/// Dense-id variant: ids 1..node_count are the existing nodes.
Scenario classify_scenario(std::size_t node_count, const EdgeRecord& record);

}  // namespace hrn
