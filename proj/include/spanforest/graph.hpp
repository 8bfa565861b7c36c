#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spanforest {

/// Opaque vertex handle. The numeric value is simulation bookkeeping (it is
/// the per-run alias written to event logs); protocol decisions never depend
/// on it.
struct VertexId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(VertexId, VertexId) = default;
};

struct EdgeId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(EdgeId, EdgeId) = default;
};

enum class VertexLabel : std::uint8_t { T, N };

// Per-endpoint edge label: NonTree is the empty label, TowardToken is "1",
// AwayFromToken is "2".
enum class PortLabel : std::uint8_t { NonTree, TowardToken, AwayFromToken };

std::string_view to_string(VertexLabel label);
std::string_view to_string(PortLabel label);

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Incidence {
  VertexId neighbor;
  EdgeId edge;
};

struct NeighborEntry {
  VertexId vertex;
  EdgeId edge;
  PortLabel own_port;
  PortLabel other_port;
};

enum class TopologyOp : std::uint8_t { AddEdge, RemoveEdge };

std::string_view to_string(TopologyOp op);

struct TopologyEvent {
  std::uint64_t tick = 0;
  TopologyOp op = TopologyOp::AddEdge;
  VertexId u;
  VertexId v;

  friend bool operator==(const TopologyEvent&, const TopologyEvent&) = default;
};

/// Snapshot of a removed edge. The port labels are the values the edge carried
/// at each endpoint just before it disappeared; each endpoint keeps a stale
/// port entry until the protocol purges it.
struct RemovalRecord {
  EdgeId edge;
  VertexId u;
  VertexId v;
  PortLabel port_u = PortLabel::NonTree;
  PortLabel port_v = PortLabel::NonTree;
  std::uint64_t tick = 0;

  [[nodiscard]] bool touches(VertexId x) const { return x == u || x == v; }
  [[nodiscard]] PortLabel port_at(VertexId x) const;
  [[nodiscard]] VertexId other(VertexId x) const;
};

struct AdditionRecord {
  EdgeId edge;
  VertexId u;
  VertexId v;
  std::uint64_t tick = 0;
};

/// Undirected simple graph with per-vertex labels, per-endpoint port labels
/// and an append-only topology event log. Iteration orders follow insertion
/// order everywhere.
class DynamicGraph {
 public:
  VertexId add_vertex();
  EdgeId add_edge(VertexId u, VertexId v);
  RemovalRecord remove_edge(EdgeId e);
  RemovalRecord remove_edge(VertexId u, VertexId v);

  /// Present incident edges of `v` with both port labels, in edge insertion
  /// order.
  [[nodiscard]] std::vector<NeighborEntry> neighbors(VertexId v) const;
  [[nodiscard]] std::span<const Incidence> incidences(VertexId v) const {
    require_vertex(v);
    return adjacency_[v.value];
  }

  [[nodiscard]] std::optional<EdgeId> find_edge(VertexId u, VertexId v) const;
  [[nodiscard]] bool contains(VertexId v) const { return v.value < labels_.size(); }
  [[nodiscard]] bool is_present(EdgeId e) const {
    return e.value < edges_.size() && edges_[e.value].present;
  }
  [[nodiscard]] std::size_t vertex_count() const { return labels_.size(); }
  [[nodiscard]] std::size_t edge_count() const { return present_edges_; }
  [[nodiscard]] std::vector<EdgeId> present_edges() const;
  [[nodiscard]] std::pair<VertexId, VertexId> endpoints(EdgeId e) const;
  [[nodiscard]] std::size_t degree(VertexId v) const { return incidences(v).size(); }

  [[nodiscard]] VertexLabel label(VertexId v) const {
    require_vertex(v);
    return labels_[v.value];
  }
  void set_label(VertexId v, VertexLabel label) {
    require_vertex(v);
    labels_[v.value] = label;
  }

  /// Port label of present edge `e` at endpoint `end`.
  [[nodiscard]] PortLabel port(EdgeId e, VertexId end) const {
    const EdgeSlot& slot = present_slot(e);
    if (end == slot.u) return slot.port_u;
    if (end == slot.v) return slot.port_v;
    throw GraphError("vertex is not an endpoint of the edge");
  }
  void set_port(EdgeId e, VertexId end, PortLabel label);

  /// Removes the stale port entry `v` holds for a removed edge. Returns false
  /// when there is nothing to purge.
  bool purge_port(VertexId v, EdgeId e);
  [[nodiscard]] bool has_stale_port(VertexId v, EdgeId e) const;
  [[nodiscard]] std::size_t stale_port_count() const;

  [[nodiscard]] std::uint64_t clock() const { return clock_; }
  void advance_clock_to(std::uint64_t tick);
  [[nodiscard]] const std::vector<TopologyEvent>& events() const { return log_; }

 private:
  struct EdgeSlot {
    VertexId u;
    VertexId v;
    PortLabel port_u = PortLabel::NonTree;
    PortLabel port_v = PortLabel::NonTree;
    bool present = true;
  };

  void require_vertex(VertexId v) const {
    if (v.value >= labels_.size()) throw GraphError("unknown vertex " + std::to_string(v.value));
  }
  const EdgeSlot& present_slot(EdgeId e) const {
    if (!is_present(e)) throw GraphError("edge " + std::to_string(e.value) + " is not present");
    return edges_[e.value];
  }

  std::vector<VertexLabel> labels_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::vector<std::vector<EdgeId>> stale_ports_;
  std::vector<EdgeSlot> edges_;
  std::unordered_map<std::uint64_t, EdgeId> edge_index_;
  std::size_t present_edges_ = 0;
  std::uint64_t clock_ = 0;
  std::vector<TopologyEvent> log_;
};

// JSON-lines form: {"tick":3,"op":"remove_edge","u":0,"v":7}
std::string to_json_line(const TopologyEvent& event);
void write_event_log(std::ostream& out, std::span<const TopologyEvent> events);
std::vector<TopologyEvent> read_event_log(std::istream& in);

/// Rebuilds the topology described by an event log on `vertex_count`
/// isolated vertices. Labels are left in their initial state.
DynamicGraph replay_topology(std::size_t vertex_count, std::span<const TopologyEvent> events);

}  // namespace spanforest

template <>
struct std::hash<spanforest::VertexId> {
  std::size_t operator()(spanforest::VertexId v) const noexcept { return std::hash<std::uint32_t>{}(v.value); }
};

template <>
struct std::hash<spanforest::EdgeId> {
  std::size_t operator()(spanforest::EdgeId e) const noexcept { return std::hash<std::uint32_t>{}(e.value); }
};
