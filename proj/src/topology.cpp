#include "sfcsim/topology.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace sfcsim {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Server: return "server";
    case NodeKind::CoreSwitch: return "core";
    case NodeKind::AggSwitch: return "agg";
    case NodeKind::EdgeSwitch: return "edge";
  }
  return "?";
}

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "server") return NodeKind::Server;
  if (s == "core") return NodeKind::CoreSwitch;
  if (s == "agg") return NodeKind::AggSwitch;
  if (s == "edge") return NodeKind::EdgeSwitch;
  throw std::invalid_argument("unknown node kind: " + s);
}

std::vector<NodeId> NetworkGraph::placement_sites() const {
  std::vector<NodeId> out = servers;
  out.insert(out.end(), core_switches.begin(), core_switches.end());
  std::sort(out.begin(), out.end());
  return out;
}

void NetworkGraph::finalize() {
  const int n = node_count();
  out_links.assign(n, {});
  servers.clear();
  core_switches.clear();
  if (server_caps.size() != kinds.size())
    throw std::invalid_argument("server_caps size does not match node count");
  // (src,dst) -> link id, to verify each link has a reverse twin
  std::set<std::pair<NodeId, NodeId>> seen;
  for (int i = 0; i < link_count(); ++i) {
    const Link& l = links[i];
    if (l.id != i) throw std::invalid_argument("link ids must be dense and ordered");
    if (l.src < 0 || l.src >= n || l.dst < 0 || l.dst >= n)
      throw std::invalid_argument("link endpoint out of range");
    if (l.src == l.dst) throw std::invalid_argument("self loops are not allowed");
    if (l.bandwidth_bps <= 0) throw std::invalid_argument("link bandwidth must be positive");
    if (!seen.insert({l.src, l.dst}).second)
      throw std::invalid_argument("duplicate directed link");
    out_links[l.src].push_back(l.id);
  }
  for (const Link& l : links)
    if (!seen.count({l.dst, l.src}))
      throw std::invalid_argument("directed link without reverse twin");
  for (NodeId v = 0; v < n; ++v) {
    if (kinds[v] == NodeKind::Server) servers.push_back(v);
    if (kinds[v] == NodeKind::CoreSwitch) core_switches.push_back(v);
  }
}

namespace {

struct GraphBuilder {
  NetworkGraph g;

  NodeId add_node(NodeKind kind, ResourceVector caps = {}) {
    g.kinds.push_back(kind);
    g.server_caps.push_back(kind == NodeKind::Server ? caps : ResourceVector{});
    return static_cast<NodeId>(g.kinds.size() - 1);
  }

  // Adds the directed link and its reverse twin with consecutive ids.
  void connect(NodeId a, NodeId b, std::int64_t bw) {
    LinkId id = static_cast<LinkId>(g.links.size());
    g.links.push_back({id, a, b, bw, kLinkDelayMs});
    g.links.push_back({static_cast<LinkId>(id + 1), b, a, bw, kLinkDelayMs});
  }

  NetworkGraph take() {
    g.finalize();
    return std::move(g);
  }
};

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

NetworkGraph build_fat_tree(int k) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("fat-tree arity must be even and >= 2");
  const int half = k / 2;
  GraphBuilder b;
  // servers: pod-major, then edge switch, then slot
  for (int p = 0; p < k; ++p)
    for (int e = 0; e < half; ++e)
      for (int s = 0; s < half; ++s) b.add_node(NodeKind::Server, kDefaultServerCaps);
  const NodeId edge0 = static_cast<NodeId>(b.g.kinds.size());
  for (int p = 0; p < k; ++p)
    for (int e = 0; e < half; ++e) b.add_node(NodeKind::EdgeSwitch);
  const NodeId agg0 = static_cast<NodeId>(b.g.kinds.size());
  for (int p = 0; p < k; ++p)
    for (int a = 0; a < half; ++a) b.add_node(NodeKind::AggSwitch);
  const NodeId core0 = static_cast<NodeId>(b.g.kinds.size());
  for (int i = 0; i < half; ++i)
    for (int j = 0; j < half; ++j) b.add_node(NodeKind::CoreSwitch);

  auto server_id = [&](int p, int e, int s) { return (p * half + e) * half + s; };
  auto edge_id = [&](int p, int e) { return edge0 + p * half + e; };
  auto agg_id = [&](int p, int a) { return agg0 + p * half + a; };
  auto core_id = [&](int i, int j) { return core0 + i * half + j; };

  for (int p = 0; p < k; ++p)
    for (int e = 0; e < half; ++e)
      for (int s = 0; s < half; ++s)
        b.connect(server_id(p, e, s), edge_id(p, e), kServerLinkBps);
  for (int p = 0; p < k; ++p)
    for (int e = 0; e < half; ++e)
      for (int a = 0; a < half; ++a)
        b.connect(edge_id(p, e), agg_id(p, a), kSwitchLinkBps);
  // core group i serves aggregation switch i of every pod
  for (int p = 0; p < k; ++p)
    for (int i = 0; i < half; ++i)
      for (int j = 0; j < half; ++j)
        b.connect(agg_id(p, i), core_id(i, j), kSwitchLinkBps);
  return b.take();
}

NetworkGraph build_bcube(int n, int levels) {
  if (n < 2) throw std::invalid_argument("bcube port count must be >= 2");
  if (levels < 0) throw std::invalid_argument("bcube level must be >= 0");
  const std::int64_t n_servers = ipow(n, levels + 1);
  const std::int64_t per_level = ipow(n, levels);
  GraphBuilder b;
  for (std::int64_t s = 0; s < n_servers; ++s) b.add_node(NodeKind::Server, kDefaultServerCaps);
  // switch levels bottom-up; the top level is the core
  for (int l = 0; l <= levels; ++l)
    for (std::int64_t j = 0; j < per_level; ++j)
      b.add_node(l == levels ? NodeKind::CoreSwitch : NodeKind::EdgeSwitch);

  auto switch_id = [&](int l, std::int64_t j) {
    return static_cast<NodeId>(n_servers + l * per_level + j);
  };
  for (std::int64_t s = 0; s < n_servers; ++s) {
    for (int l = 0; l <= levels; ++l) {
      // switch index: the server address with digit l removed
      const std::int64_t high = s / ipow(n, l + 1);
      const std::int64_t low = s % ipow(n, l);
      b.connect(static_cast<NodeId>(s), switch_id(l, high * ipow(n, l) + low), kServerLinkBps);
    }
  }
  return b.take();
}

NetworkGraph build_vl2(int n, int k) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("vl2 rack size must be even and >= 2");
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("vl2 degree must be even and >= 2");
  const int n_tor = k * k / 4;
  GraphBuilder b;
  for (int t = 0; t < n_tor; ++t)
    for (int s = 0; s < n; ++s) b.add_node(NodeKind::Server, kDefaultServerCaps);
  const NodeId tor0 = static_cast<NodeId>(b.g.kinds.size());
  for (int t = 0; t < n_tor; ++t) b.add_node(NodeKind::EdgeSwitch);
  const NodeId agg0 = static_cast<NodeId>(b.g.kinds.size());
  for (int a = 0; a < k; ++a) b.add_node(NodeKind::AggSwitch);
  const NodeId mid0 = static_cast<NodeId>(b.g.kinds.size());
  for (int c = 0; c < k / 2; ++c) b.add_node(NodeKind::CoreSwitch);

  for (int t = 0; t < n_tor; ++t)
    for (int s = 0; s < n; ++s) b.connect(t * n + s, tor0 + t, kServerLinkBps);
  for (int t = 0; t < n_tor; ++t) {
    b.connect(tor0 + t, agg0 + (2 * t) % k, kSwitchLinkBps);
    b.connect(tor0 + t, agg0 + (2 * t + 1) % k, kSwitchLinkBps);
  }
  for (int a = 0; a < k; ++a)
    for (int c = 0; c < k / 2; ++c) b.connect(agg0 + a, mid0 + c, kSwitchLinkBps);
  return b.take();
}

PathTable::PathTable(int node_count, int d) : n_(node_count), d_(d) {
  entries_.assign(static_cast<std::size_t>(n_) * n_, {});
}

const std::vector<Path>& PathTable::between(NodeId from, NodeId to) const {
  return entries_[static_cast<std::size_t>(from) * n_ + to];
}

void PathTable::set(NodeId from, NodeId to, std::vector<Path> paths) {
  entries_[static_cast<std::size_t>(from) * n_ + to] = std::move(paths);
}

namespace {

// Path ranking: fewer links first, then lexicographically smaller id sequence.
bool link_seq_less(const std::vector<LinkId>& a, const std::vector<LinkId>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// Lowest-ranked loop-free route from `from` to `to` that avoids the banned
// links and nodes. Dijkstra over the path ranking: extending a route always
// ranks it strictly higher, so the first settlement of a node is optimal.
std::optional<std::vector<LinkId>> shortest_route(const NetworkGraph& g, NodeId from, NodeId to,
                                                  const std::set<LinkId>& banned_links,
                                                  const std::vector<char>& banned_node) {
  struct Entry {
    std::vector<LinkId> links;
    NodeId tail;
  };
  auto worse = [](const Entry& a, const Entry& b) { return link_seq_less(b.links, a.links); };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  std::vector<char> settled(g.node_count(), 0);
  if (banned_node[from]) return std::nullopt;
  heap.push({{}, from});
  while (!heap.empty()) {
    Entry e = heap.top();
    heap.pop();
    if (settled[e.tail]) continue;
    settled[e.tail] = 1;
    if (e.tail == to) return e.links;
    for (LinkId lid : g.out_links[e.tail]) {
      const Link& l = g.links[lid];
      if (settled[l.dst] || banned_node[l.dst] || banned_links.count(lid)) continue;
      Entry next = e;
      next.links.push_back(lid);
      next.tail = l.dst;
      heap.push(std::move(next));
    }
  }
  return std::nullopt;
}

// Classic deviation search: grow the ranked list by banning, at every prefix
// of the last accepted route, the continuations already taken by accepted
// routes with the same prefix.
std::vector<std::vector<LinkId>> ranked_routes(const NetworkGraph& g, NodeId s, NodeId t, int d) {
  std::vector<std::vector<LinkId>> accepted;
  std::set<std::vector<LinkId>, decltype(&link_seq_less)> candidates(&link_seq_less);
  std::vector<char> no_ban(g.node_count(), 0);
  auto first = shortest_route(g, s, t, {}, no_ban);
  if (!first) return accepted;
  accepted.push_back(std::move(*first));
  while (static_cast<int>(accepted.size()) < d) {
    const std::vector<LinkId> prev = accepted.back();
    for (std::size_t i = 0; i < prev.size(); ++i) {
      std::set<LinkId> banned_links;
      for (const auto& a : accepted)
        if (a.size() > i && std::equal(prev.begin(), prev.begin() + i, a.begin()))
          banned_links.insert(a[i]);
      std::vector<char> banned_node(g.node_count(), 0);
      NodeId spur = s;
      for (std::size_t j = 0; j < i; ++j) {
        banned_node[spur] = 1;
        spur = g.links[prev[j]].dst;
      }
      auto tail = shortest_route(g, spur, t, banned_links, banned_node);
      if (!tail) continue;
      std::vector<LinkId> full(prev.begin(), prev.begin() + i);
      full.insert(full.end(), tail->begin(), tail->end());
      if (std::find(accepted.begin(), accepted.end(), full) == accepted.end())
        candidates.insert(std::move(full));
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return accepted;
}

}  // namespace

PathTable k_shortest_paths(const NetworkGraph& g, int d) {
  if (d < 1) throw std::invalid_argument("path count must be >= 1");
  PathTable table(g.node_count(), d);
  const std::vector<NodeId> sites = g.placement_sites();
  for (NodeId a : sites) {
    for (NodeId b : sites) {
      if (a == b) continue;
      std::vector<Path> paths;
      for (auto& seq : ranked_routes(g, a, b, d)) {
        Path p;
        p.src = a;
        p.dst = b;
        p.total_delay_ms = 0.0;
        for (LinkId l : seq) p.total_delay_ms += g.links[l].delay_ms;
        p.links = std::move(seq);
        paths.push_back(std::move(p));
      }
      table.set(a, b, std::move(paths));
    }
  }
  return table;
}

std::string graph_to_json(const NetworkGraph& g) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (int i = 0; i < g.node_count(); ++i)
    j["nodes"].push_back({{"id", i}, {"kind", to_string(g.kinds[i])}});
  j["links"] = nlohmann::json::array();
  for (const Link& l : g.links)
    j["links"].push_back({{"id", l.id},
                          {"src", l.src},
                          {"dst", l.dst},
                          {"bw_bps", l.bandwidth_bps},
                          {"delay_ms", l.delay_ms}});
  ResourceVector caps = g.servers.empty() ? ResourceVector{} : g.server_caps[g.servers.front()];
  j["server_caps"] = {{"vcpu", caps.vcpu}, {"mem_gb", caps.mem_gb}, {"gpu", caps.gpu}};
  return j.dump(1);
}

NetworkGraph graph_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  NetworkGraph g;
  ResourceVector caps{j.at("server_caps").at("vcpu").get<std::int64_t>(),
                      j.at("server_caps").at("mem_gb").get<std::int64_t>(),
                      j.at("server_caps").at("gpu").get<std::int64_t>()};
  const auto& nodes = j.at("nodes");
  g.kinds.resize(nodes.size());
  g.server_caps.resize(nodes.size());
  for (const auto& n : nodes) {
    const int id = n.at("id").get<int>();
    if (id < 0 || id >= static_cast<int>(nodes.size()))
      throw std::invalid_argument("node id out of range");
    g.kinds[id] = node_kind_from_string(n.at("kind").get<std::string>());
    g.server_caps[id] = g.kinds[id] == NodeKind::Server ? caps : ResourceVector{};
  }
  const auto& links = j.at("links");
  g.links.resize(links.size());
  for (const auto& l : links) {
    Link link{l.at("id").get<LinkId>(), l.at("src").get<NodeId>(), l.at("dst").get<NodeId>(),
              l.at("bw_bps").get<std::int64_t>(), l.at("delay_ms").get<double>()};
    if (link.id < 0 || link.id >= static_cast<int>(links.size()))
      throw std::invalid_argument("link id out of range");
    g.links[link.id] = link;
  }
  g.finalize();
  return g;
}

}  // namespace sfcsim
