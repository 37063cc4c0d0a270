#include "mdcpp/netsim.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mdcpp {

NetworkConfig NetworkConfig::limited(double range) {
  if (!(range > 0.0)) throw std::invalid_argument("comm_range must be positive");
  return NetworkConfig{range};
}

std::vector<RobotId> neighbors(RobotId id, const std::vector<RobotPosition>& positions, const NetworkConfig& cfg) {
  const auto self = std::find_if(positions.begin(), positions.end(), [id](const auto& rp) { return rp.id == id; });
  if (self == positions.end()) throw std::invalid_argument("neighbors: unknown robot id " + std::to_string(id));
  std::vector<RobotId> out;
  for (const auto& rp : positions) {
    if (rp.id != id && cfg.in_range(self->position, rp.position)) out.push_back(rp.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<RobotId>> connected_components(const std::vector<RobotPosition>& positions,
                                                       const NetworkConfig& cfg) {
  std::vector<RobotPosition> sorted = positions;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  const std::size_t n = sorted.size();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<RobotId>> comps;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<RobotId> comp;
    std::vector<std::size_t> frontier{s};
    seen[s] = true;
    while (!frontier.empty()) {
      const auto u = frontier.back();
      frontier.pop_back();
      comp.push_back(sorted[u].id);
      for (std::size_t v = 0; v < n; ++v) {
        if (!seen[v] && cfg.in_range(sorted[u].position, sorted[v].position)) {
          seen[v] = true;
          frontier.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

Network::Network(NetworkConfig cfg, std::vector<RobotPosition> snapshot)
    : cfg_(cfg), snapshot_(std::move(snapshot)) {
  for (const auto& rp : snapshot_) {
    neighbor_sets_[rp.id] = neighbors(rp.id, snapshot_, cfg_);
    inbox_[rp.id];
  }
}

const std::vector<RobotId>& Network::neighbors_of(RobotId id) const {
  const auto it = neighbor_sets_.find(id);
  if (it == neighbor_sets_.end()) throw std::invalid_argument("network: unknown robot id " + std::to_string(id));
  return it->second;
}

bool Network::send(Message msg) {
  const auto& nbrs = neighbors_of(msg.from);
  ++counters_.sent;
  if (!msg.to) {
    for (RobotId j : nbrs) {
      inbox_[j].push_back(msg);
      ++counters_.delivered;
    }
    return !nbrs.empty();
  }
  if (std::binary_search(nbrs.begin(), nbrs.end(), *msg.to)) {
    inbox_[*msg.to].push_back(std::move(msg));
    ++counters_.delivered;
    return true;
  }
  ++counters_.dropped;
  return false;
}

std::vector<Message> Network::drain(RobotId id) {
  auto& box = inbox_.at(id);
  std::vector<Message> out(std::make_move_iterator(box.begin()), std::make_move_iterator(box.end()));
  box.clear();
  return out;
}

}  // namespace mdcpp
