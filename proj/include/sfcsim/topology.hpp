#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sfcsim {

using NodeId = std::int32_t;
using LinkId = std::int32_t;

enum class NodeKind { Server, CoreSwitch, AggSwitch, EdgeSwitch };

const char* to_string(NodeKind k);
NodeKind node_kind_from_string(const std::string& s);

// Per-server resource amounts. Whole units only (vCPU count, GB of memory,
// GPU count) so allocation arithmetic stays exact and release restores the
// pre-apply state bit for bit.
struct ResourceVector {
  std::int64_t vcpu = 0;
  std::int64_t mem_gb = 0;
  std::int64_t gpu = 0;

  bool fits_within(const ResourceVector& cap) const {
    return vcpu <= cap.vcpu && mem_gb <= cap.mem_gb && gpu <= cap.gpu;
  }
  ResourceVector& operator+=(const ResourceVector& o) {
    vcpu += o.vcpu;
    mem_gb += o.mem_gb;
    gpu += o.gpu;
    return *this;
  }
  ResourceVector& operator-=(const ResourceVector& o) {
    vcpu -= o.vcpu;
    mem_gb -= o.mem_gb;
    gpu -= o.gpu;
    return *this;
  }
  bool operator==(const ResourceVector&) const = default;
};

// One directed link. Every physical cable is modeled as two directed links
// (a reverse twin exists for every id), each with its own bandwidth pool.
struct Link {
  LinkId id = -1;
  NodeId src = -1;
  NodeId dst = -1;
  std::int64_t bandwidth_bps = 0;
  double delay_ms = 0.0;
};

// Uniform hardware profile used by all builders.
inline constexpr std::int64_t kServerLinkBps = 1'000'000'000;    // server <-> switch
inline constexpr std::int64_t kSwitchLinkBps = 10'000'000'000;   // switch <-> switch
inline constexpr double kLinkDelayMs = 0.05;
inline constexpr ResourceVector kDefaultServerCaps{96, 112, 12};

struct NetworkGraph {
  std::vector<NodeKind> kinds;              // index is the node id
  std::vector<Link> links;                  // index is the link id
  std::vector<ResourceVector> server_caps;  // per node; zero for switches
  // Derived by finalize():
  std::vector<std::vector<LinkId>> out_links;  // adjacency by source node
  std::vector<NodeId> servers;                 // ascending
  std::vector<NodeId> core_switches;           // ascending

  int node_count() const { return static_cast<int>(kinds.size()); }
  int link_count() const { return static_cast<int>(links.size()); }
  bool is_server(NodeId n) const { return kinds[n] == NodeKind::Server; }

  // Placement sites: servers plus core switches, ascending. Paths are kept
  // for every ordered pair of these.
  std::vector<NodeId> placement_sites() const;

  // Builds adjacency and caches, and validates structural invariants
  // (endpoint ids in range, no self loops, reverse twin per link).
  void finalize();
};

// Three-tier fat-tree with k pods (k even, >= 2): k^3/4 servers, k*k/2 edge
// and aggregation switches, (k/2)^2 cores. Node numbering: servers, then
// edge, aggregation, core. Core (i,j) attaches to aggregation switch i of
// every pod.
NetworkGraph build_fat_tree(int k);

// Server-centric recursive topology: n^(levels+1) servers, (levels+1)*n^levels
// switches, one switch level per digit position. Each server attaches to one
// switch per level; there are no switch-to-switch links, so routes between
// servers pass through intermediate servers. The top level acts as the core.
NetworkGraph build_bcube(int n, int levels);

// Folded-Clos variant: n*k^2/4 servers under k^2/4 top-of-rack switches,
// k aggregation switches, k/2 intermediate (core) switches. Each ToR attaches
// to two aggregation switches; aggregation <-> intermediate is complete
// bipartite. n and k even, positive.
NetworkGraph build_vl2(int n, int k);

// A loop-free directed route. Paths between a node pair are ranked by hop
// count, ties broken by lexicographic comparison of the link-id sequence.
struct Path {
  NodeId src = -1;
  NodeId dst = -1;
  std::vector<LinkId> links;
  double total_delay_ms = 0.0;

  int hop_count() const { return static_cast<int>(links.size()); }
  bool operator==(const Path&) const = default;
};

// Up to d ranked loop-free paths per ordered pair of placement sites.
// Pairs with fewer than d loop-free paths keep what exists.
class PathTable {
 public:
  PathTable() = default;
  PathTable(int node_count, int d);

  int d() const { return d_; }
  const std::vector<Path>& between(NodeId from, NodeId to) const;
  void set(NodeId from, NodeId to, std::vector<Path> paths);

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<std::vector<Path>> entries_;  // n*n, row-major by source
};

PathTable k_shortest_paths(const NetworkGraph& g, int d);

std::string graph_to_json(const NetworkGraph& g);
NetworkGraph graph_from_json(const std::string& text);

}  // namespace sfcsim
