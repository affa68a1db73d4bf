#include "hrn/network.hpp"

#include <stdexcept>
#include <string>

namespace hrn {

Scenario scenario_from_int(int label) {
  if (label < 1 || label > 5) {
    throw std::invalid_argument("scenario label must be in 1..5, got " + std::to_string(label));
  }
  return static_cast<Scenario>(label);
}

int fresh_node_count(Scenario s) noexcept {
  switch (s) {
    case Scenario::NewSource:
    case Scenario::NewTarget:
    case Scenario::NewSelfLoop:
      return 1;
    case Scenario::NewPair:
      return 2;
    case Scenario::Existing:
      break;
  }
  return 0;
}

std::string_view to_string(LogOrigin origin) noexcept {
  return origin == LogOrigin::Seed ? "seed" : "first-record";
}

NetworkState::NetworkState() : in_degree_{1}, out_degree_{1}, creation_step_{0} {}

NetworkState NetworkState::from_initial_edge(bool self_loop) {
  NetworkState state;
  if (!self_loop) {
    state.in_degree_ = {0, 1};
    state.out_degree_ = {1, 0};
    state.creation_step_ = {0, 0};
  }
  return state;
}

void NetworkState::check(NodeId id) const {
  if (!contains(id)) {
    throw std::out_of_range("unknown node id " + std::to_string(id) + " (node count " +
                            std::to_string(node_count()) + ")");
  }
}

std::uint64_t NetworkState::in_degree(NodeId id) const {
  check(id);
  return in_degree_[id - 1];
}

std::uint64_t NetworkState::out_degree(NodeId id) const {
  check(id);
  return out_degree_[id - 1];
}

std::uint64_t NetworkState::creation_step(NodeId id) const {
  check(id);
  return creation_step_[id - 1];
}

void NetworkState::reserve(std::size_t nodes) {
  in_degree_.reserve(nodes);
  out_degree_.reserve(nodes);
  creation_step_.reserve(nodes);
}

NodeId NetworkState::add_node() {
  in_degree_.push_back(0);
  out_degree_.push_back(0);
  creation_step_.push_back(step_);
  return node_count();
}

std::pair<NodeId, NodeId> NetworkState::apply(Scenario scenario, NodeId source, NodeId target) {
  switch (scenario) {
    case Scenario::NewSource:
      check(target);
      ++step_;
      source = add_node();
      break;
    case Scenario::Existing:
      check(source);
      check(target);
      ++step_;
      break;
    case Scenario::NewTarget:
      check(source);
      ++step_;
      target = add_node();
      break;
    case Scenario::NewSelfLoop:
      ++step_;
      source = target = add_node();
      break;
    case Scenario::NewPair:
      ++step_;
      source = add_node();
      target = add_node();
      break;
  }
  ++out_degree_[source - 1];
  ++in_degree_[target - 1];
  return {source, target};
}

}  // namespace hrn
