#include "hrn/kernels.hpp"

#include <stdexcept>

namespace hrn {

namespace {

double mixed_kernel(std::uint64_t degree, double delta, double p, const NetworkState& state) {
  const auto nodes = static_cast<double>(state.node_count());
  const auto mass = static_cast<double>(state.total_edges()) + delta * nodes;
  return p * (static_cast<double>(degree) + delta) / mass + (1.0 - p) / nodes;
}

Scenario classify(bool source_known, bool target_known, bool same) {
  if (source_known && target_known) return Scenario::Existing;
  if (!source_known && target_known) return Scenario::NewSource;
  if (source_known) return Scenario::NewTarget;
  return same ? Scenario::NewSelfLoop : Scenario::NewPair;
}

}  // namespace

double attach_prob_in(const NetworkState& state, NodeId i, const HybridParams& params) {
  return mixed_kernel(state.in_degree(i), params.delta_in, params.p, state);
}

double attach_prob_out(const NetworkState& state, NodeId j, const HybridParams& params) {
  return mixed_kernel(state.out_degree(j), params.delta_out, params.p, state);
}

std::vector<StepOutcome> step_distribution(const NetworkState& state, const HybridParams& params) {
  validate(params);
  const std::size_t nodes = state.node_count();
  const NodeId fresh = nodes + 1;

  std::vector<double> in_prob(nodes), out_prob(nodes);
  for (NodeId v = 1; v <= nodes; ++v) {
    in_prob[v - 1] = attach_prob_in(state, v, params);
    out_prob[v - 1] = attach_prob_out(state, v, params);
  }

  std::vector<StepOutcome> out;
  if (params.alpha > 0.0) {
    for (NodeId i = 1; i <= nodes; ++i) {
      out.push_back({Scenario::NewSource, fresh, i, params.alpha * in_prob[i - 1]});
    }
  }
  if (params.beta > 0.0) {
    for (NodeId j = 1; j <= nodes; ++j) {
      for (NodeId i = 1; i <= nodes; ++i) {
        out.push_back({Scenario::Existing, j, i, params.beta * out_prob[j - 1] * in_prob[i - 1]});
      }
    }
  }
  if (params.gamma > 0.0) {
    for (NodeId j = 1; j <= nodes; ++j) {
      out.push_back({Scenario::NewTarget, j, fresh, params.gamma * out_prob[j - 1]});
    }
  }
  if (params.xi > 0.0) out.push_back({Scenario::NewSelfLoop, fresh, fresh, params.xi});
  if (params.eta > 0.0) out.push_back({Scenario::NewPair, fresh, fresh + 1, params.eta});
  return out;
}

Scenario classify_scenario(const std::unordered_set<NodeId>& previous_nodes,
                           const EdgeRecord& record) {
  if (record.source == 0 || record.target == 0) {
    throw std::invalid_argument("node ids must be positive");
  }
  return classify(previous_nodes.contains(record.source), previous_nodes.contains(record.target),
                  record.source == record.target);
}

Scenario classify_scenario(std::size_t node_count, const EdgeRecord& record) {
  if (record.source == 0 || record.target == 0) {
    throw std::invalid_argument("node ids must be positive");
  }
  return classify(record.source <= node_count, record.target <= node_count,
                  record.source == record.target);
}

}  // namespace hrn
