#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hrn {

/// Node ids are positive; inside a NetworkState they are dense, 1..node_count,
/// in creation order.
using NodeId = std::uint64_t;

/// Edge-creation scenario of one step.
enum class Scenario : std::uint8_t {
  NewSource = 1,    // fresh node -> existing node
  Existing = 2,     // existing node -> existing node
  NewTarget = 3,    // existing node -> fresh node
  NewSelfLoop = 4,  // fresh node with a self-loop
  NewPair = 5,      // fresh node -> another fresh node
};

inline constexpr int to_int(Scenario s) noexcept { return static_cast<int>(s); }

/// Throws std::invalid_argument outside 1..5.
Scenario scenario_from_int(int label);

/// Number of fresh nodes a scenario introduces.
int fresh_node_count(Scenario s) noexcept;

struct EdgeRecord {
  NodeId source = 0;
  NodeId target = 0;
  std::int64_t time = 0;
  std::optional<Scenario> scenario;

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

/// How the first state of a log is obtained.
///   Seed: the log continues the single self-looped node 1 (simulated data).
///   FirstRecord: the first record itself forms the initial graph (real data).
enum class LogOrigin : std::uint8_t { Seed, FirstRecord };

std::string_view to_string(LogOrigin origin) noexcept;

struct EdgeLog {
  std::vector<EdgeRecord> records;
  LogOrigin origin = LogOrigin::Seed;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }

  friend bool operator==(const EdgeLog&, const EdgeLog&) = default;
};

/// Degree bookkeeping of an evolving network.
///
/// step() counts edges added after the initial graph; total_edges() includes
/// the initial edge, so sum of in-degrees == sum of out-degrees == step() + 1.
class NetworkState {
 public:
  /// Single node 1 with a self-loop, step 0.
  NetworkState();

  /// Initial graph formed by one edge: a self-loop on node 1, or 1 -> 2.
  static NetworkState from_initial_edge(bool self_loop);

  std::size_t node_count() const noexcept { return in_degree_.size(); }
  std::uint64_t step() const noexcept { return step_; }
  std::uint64_t total_edges() const noexcept { return step_ + 1; }

  bool contains(NodeId id) const noexcept { return id >= 1 && id <= node_count(); }

  /// Throws std::out_of_range for unknown ids.
  std::uint64_t in_degree(NodeId id) const;
  std::uint64_t out_degree(NodeId id) const;
  std::uint64_t creation_step(NodeId id) const;

  std::span<const std::uint64_t> in_degrees() const noexcept { return in_degree_; }
  std::span<const std::uint64_t> out_degrees() const noexcept { return out_degree_; }
  std::span<const std::uint64_t> creation_steps() const noexcept { return creation_step_; }

  /// Performs one step of the given scenario. Existing endpoints must be
  /// supplied for the scenario's existing roles; fresh ones are assigned
  /// node_count()+1 (source first). Returns the realised (source, target).
  std::pair<NodeId, NodeId> apply(Scenario scenario, NodeId source, NodeId target);

  void reserve(std::size_t nodes);

 private:
  NodeId add_node();
  void check(NodeId id) const;

  std::uint64_t step_ = 0;
  std::vector<std::uint64_t> in_degree_;
  std::vector<std::uint64_t> out_degree_;
  std::vector<std::uint64_t> creation_step_;
};

}  // namespace hrn
