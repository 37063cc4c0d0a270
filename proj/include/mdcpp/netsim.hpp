#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "mdcpp/estimator.hpp"
#include "mdcpp/geometry.hpp"

namespace mdcpp {

/// Range-limited communication. An empty range means unlimited.
struct NetworkConfig {
  std::optional<double> comm_range;

  static NetworkConfig unlimited() { return {}; }
  static NetworkConfig limited(double range);

  bool in_range(Point a, Point b) const {
    return !comm_range || distance(a, b) <= *comm_range;
  }
  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

enum class MessageKind {
  RequestAssignment,
  SendAssignment,
  SendStateAndCells,
  SwappedAssignment,
  RepartitionRequest,
  ObservationShare,
};

namespace payload {
struct RequestAssignment {};
struct SendAssignment {
  std::vector<CellIndex> cells;
};
struct SendStateAndCells {
  Point position;
  std::vector<CellIndex> cells;
};
struct SwappedAssignment {
  std::vector<CellIndex> cells;
};
struct RepartitionRequest {};
struct ObservationShare {
  std::vector<Observation> observations;
};
}  // namespace payload

using Payload = std::variant<payload::RequestAssignment, payload::SendAssignment, payload::SendStateAndCells,
                             payload::SwappedAssignment, payload::RepartitionRequest, payload::ObservationShare>;

/// A unit of inter-robot traffic. The kind is derived from the payload
/// alternative, so the two can never disagree.
struct Message {
  RobotId from = 0;
  std::optional<RobotId> to;  // empty: broadcast
  Payload payload;

  MessageKind kind() const { return static_cast<MessageKind>(payload.index()); }
};

struct RobotPosition {
  RobotId id = 0;
  Point position;
};

/// Robots j != id with |q_id - q_j| <= range, ascending. Throws
/// std::invalid_argument if id is not among the positions.
std::vector<RobotId> neighbors(RobotId id, const std::vector<RobotPosition>& positions, const NetworkConfig& cfg);

/// Connected components of the range graph; each component sorted, the list
/// ordered by smallest member.
std::vector<std::vector<RobotId>> connected_components(const std::vector<RobotPosition>& positions,
                                                       const NetworkConfig& cfg);

struct TrafficCounters {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
};

/// Step-scoped mailbox over a frozen position snapshot. Delivery is
/// immediate and lossless inside range; anything else is dropped and
/// counted.
class Network {
 public:
  Network(NetworkConfig cfg, std::vector<RobotPosition> snapshot);

  /// Unicast: true iff delivered. Broadcast: true iff at least one
  /// neighbor received it.
  bool send(Message msg);
  /// Removes and returns everything queued for `id`.
  std::vector<Message> drain(RobotId id);
  const std::vector<RobotId>& neighbors_of(RobotId id) const;
  const TrafficCounters& counters() const { return counters_; }
  const NetworkConfig& config() const { return cfg_; }

 private:
  NetworkConfig cfg_;
  std::vector<RobotPosition> snapshot_;
  std::map<RobotId, std::vector<RobotId>> neighbor_sets_;
  std::map<RobotId, std::deque<Message>> inbox_;
  TrafficCounters counters_;
};

}  // namespace mdcpp
