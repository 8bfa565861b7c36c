#include "spanforest/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace spanforest {

namespace {

std::uint64_t pair_key(VertexId a, VertexId b) {
  const auto lo = std::min(a.value, b.value);
  const auto hi = std::max(a.value, b.value);
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

}  // namespace

std::string_view to_string(VertexLabel label) { return label == VertexLabel::T ? "T" : "N"; }

std::string_view to_string(PortLabel label) {
  switch (label) {
    case PortLabel::NonTree:
      return "0";
    case PortLabel::TowardToken:
      return "1";
    case PortLabel::AwayFromToken:
      return "2";
  }
  return "?";
}

std::string_view to_string(TopologyOp op) { return op == TopologyOp::AddEdge ? "add_edge" : "remove_edge"; }

PortLabel RemovalRecord::port_at(VertexId x) const {
  if (x == u) return port_u;
  if (x == v) return port_v;
  throw GraphError("vertex is not an endpoint of the removed edge");
}

VertexId RemovalRecord::other(VertexId x) const {
  if (x == u) return v;
  if (x == v) return u;
  throw GraphError("vertex is not an endpoint of the removed edge");
}

VertexId DynamicGraph::add_vertex() {
  const VertexId v{static_cast<std::uint32_t>(labels_.size())};
  labels_.push_back(VertexLabel::T);
  adjacency_.emplace_back();
  stale_ports_.emplace_back();
  return v;
}

EdgeId DynamicGraph::add_edge(VertexId u, VertexId v) {
  require_vertex(u);
  require_vertex(v);
  if (u == v) throw GraphError("self-loop on vertex " + std::to_string(u.value));
  const auto key = pair_key(u, v);
  if (edge_index_.contains(key)) {
    throw GraphError("duplicate edge (" + std::to_string(u.value) + "," + std::to_string(v.value) + ")");
  }
  const EdgeId e{static_cast<std::uint32_t>(edges_.size())};
  edges_.push_back(EdgeSlot{u, v});
  edge_index_.emplace(key, e);
  adjacency_[u.value].push_back({v, e});
  adjacency_[v.value].push_back({u, e});
  ++present_edges_;
  log_.push_back({clock_, TopologyOp::AddEdge, u, v});
  return e;
}

RemovalRecord DynamicGraph::remove_edge(EdgeId e) {
  const EdgeSlot slot = present_slot(e);
  auto detach = [&](VertexId from) {
    auto& list = adjacency_[from.value];
    list.erase(std::find_if(list.begin(), list.end(), [e](const Incidence& inc) { return inc.edge == e; }));
    stale_ports_[from.value].push_back(e);
  };
  detach(slot.u);
  detach(slot.v);
  edges_[e.value].present = false;
  edge_index_.erase(pair_key(slot.u, slot.v));
  --present_edges_;
  log_.push_back({clock_, TopologyOp::RemoveEdge, slot.u, slot.v});
  return RemovalRecord{e, slot.u, slot.v, slot.port_u, slot.port_v, clock_};
}

RemovalRecord DynamicGraph::remove_edge(VertexId u, VertexId v) {
  const auto e = find_edge(u, v);
  if (!e) throw GraphError("edge (" + std::to_string(u.value) + "," + std::to_string(v.value) + ") is absent");
  return remove_edge(*e);
}

std::vector<NeighborEntry> DynamicGraph::neighbors(VertexId v) const {
  std::vector<NeighborEntry> out;
  out.reserve(incidences(v).size());
  for (const auto& inc : adjacency_[v.value]) {
    const EdgeSlot& slot = edges_[inc.edge.value];
    const bool at_u = slot.u == v;
    out.push_back({inc.neighbor, inc.edge, at_u ? slot.port_u : slot.port_v, at_u ? slot.port_v : slot.port_u});
  }
  return out;
}

std::optional<EdgeId> DynamicGraph::find_edge(VertexId u, VertexId v) const {
  const auto it = edge_index_.find(pair_key(u, v));
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<EdgeId> DynamicGraph::present_edges() const {
  std::vector<EdgeId> out;
  out.reserve(present_edges_);
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].present) out.push_back(EdgeId{i});
  }
  return out;
}

std::pair<VertexId, VertexId> DynamicGraph::endpoints(EdgeId e) const {
  if (e.value >= edges_.size()) throw GraphError("unknown edge " + std::to_string(e.value));
  return {edges_[e.value].u, edges_[e.value].v};
}

void DynamicGraph::set_port(EdgeId e, VertexId end, PortLabel label) {
  present_slot(e);
  EdgeSlot& slot = edges_[e.value];
  if (end == slot.u) {
    slot.port_u = label;
  } else if (end == slot.v) {
    slot.port_v = label;
  } else {
    throw GraphError("vertex is not an endpoint of the edge");
  }
}

bool DynamicGraph::purge_port(VertexId v, EdgeId e) {
  require_vertex(v);
  auto& stale = stale_ports_[v.value];
  const auto it = std::find(stale.begin(), stale.end(), e);
  if (it == stale.end()) return false;
  stale.erase(it);
  return true;
}

bool DynamicGraph::has_stale_port(VertexId v, EdgeId e) const {
  require_vertex(v);
  const auto& stale = stale_ports_[v.value];
  return std::find(stale.begin(), stale.end(), e) != stale.end();
}

std::size_t DynamicGraph::stale_port_count() const {
  std::size_t total = 0;
  for (const auto& s : stale_ports_) total += s.size();
  return total;
}

void DynamicGraph::advance_clock_to(std::uint64_t tick) {
  if (tick < clock_) throw GraphError("event clock cannot move backwards");
  clock_ = tick;
}

std::string to_json_line(const TopologyEvent& event) {
  nlohmann::ordered_json j;
  j["tick"] = event.tick;
  j["op"] = to_string(event.op);
  j["u"] = event.u.value;
  j["v"] = event.v.value;
  return j.dump();
}

void write_event_log(std::ostream& out, std::span<const TopologyEvent> events) {
  for (const auto& event : events) out << to_json_line(event) << '\n';
}

std::vector<TopologyEvent> read_event_log(std::istream& in) {
  std::vector<TopologyEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TopologyEvent event;
      event.tick = j.at("tick").get<std::uint64_t>();
      const auto op = j.at("op").get<std::string>();
      if (op == "add_edge") {
        event.op = TopologyOp::AddEdge;
      } else if (op == "remove_edge") {
        event.op = TopologyOp::RemoveEdge;
      } else {
        throw GraphError("unknown op '" + op + "'");
      }
      event.u = VertexId{j.at("u").get<std::uint32_t>()};
      event.v = VertexId{j.at("v").get<std::uint32_t>()};
      events.push_back(event);
    } catch (const nlohmann::json::exception& ex) {
      throw GraphError("event log line " + std::to_string(line_no) + ": " + ex.what());
    } catch (const GraphError& ex) {
      throw GraphError("event log line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return events;
}

DynamicGraph replay_topology(std::size_t vertex_count, std::span<const TopologyEvent> events) {
  DynamicGraph graph;
  for (std::size_t i = 0; i < vertex_count; ++i) graph.add_vertex();
  for (const auto& event : events) {
    graph.advance_clock_to(event.tick);
    if (event.op == TopologyOp::AddEdge) {
      graph.add_edge(event.u, event.v);
    } else {
      const auto record = graph.remove_edge(event.u, event.v);
      graph.purge_port(record.u, record.edge);
      graph.purge_port(record.v, record.edge);
    }
  }
  return graph;
}

}  // namespace spanforest
