#include "sfcsim/netstate.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace sfcsim {

void Weights::validate() const {
  if (server < 0 || link < 0 || bandwidth < 0)
    throw std::invalid_argument("objective weights must be nonnegative");
  if (std::fabs(server + link + bandwidth - 1.0) > 1e-9)
    throw std::invalid_argument("objective weights must sum to 1");
}

NetworkState::NetworkState(const NetworkGraph& g)
    : graph_(&g),
      residual_(g.server_caps),
      residual_bw_(g.link_count()),
      hosted_(g.node_count(), 0),
      flows_(g.link_count(), 0),
      power_(g.node_count(), PowerState::Off),
      idle_slots_(g.node_count(), 0) {
  for (int i = 0; i < g.link_count(); ++i) residual_bw_[i] = g.links[i].bandwidth_bps;
}

namespace {

// Walks the declared route and confirms it is a connected link chain from
// `from` to `to`. Malformed shapes throw; this is not a resource check.
void check_route_shape(const NetworkGraph& g, const EdgeRoute& r, NodeId from, NodeId to) {
  if (r.colocated) {
    if (from != to) throw MalformedPlacement("colocated route between distinct hosts");
    if (!r.links.empty()) throw MalformedPlacement("colocated route cannot carry links");
    return;
  }
  if (from == to) throw MalformedPlacement("routed edge between co-located hosts");
  if (r.links.empty()) throw MalformedPlacement("empty route between distinct hosts");
  NodeId at = from;
  for (LinkId lid : r.links) {
    if (lid < 0 || lid >= g.link_count()) throw MalformedPlacement("route link out of range");
    if (g.links[lid].src != at) throw MalformedPlacement("route links do not connect");
    at = g.links[lid].dst;
  }
  if (at != to) throw MalformedPlacement("route does not reach the destination host");
}

}  // namespace

std::vector<Violation> NetworkState::check_feasible(const ServiceRequest& s,
                                                    const Placement& p) const {
  const NetworkGraph& g = *graph_;
  if (p.vnf_to_node.size() != s.vnfs.size())
    throw MalformedPlacement("placement maps the wrong number of vnfs");
  if (p.edge_routes.size() != s.edges.size())
    throw MalformedPlacement("placement routes the wrong number of edges");
  for (NodeId v : p.vnf_to_node)
    if (v < 0 || v >= g.node_count()) throw MalformedPlacement("host id out of range");
  for (std::size_t i = 0; i < s.edges.size(); ++i)
    check_route_shape(g, p.edge_routes[i], p.vnf_to_node[s.edges[i].from],
                      p.vnf_to_node[s.edges[i].to]);

  std::vector<Violation> out;
  for (std::size_t i = 0; i < s.vnfs.size(); ++i) {
    const VnfSpec& v = s.vnfs[i];
    const NodeId host = p.vnf_to_node[i];
    if (is_endpoint(v.kind)) {
      const NodeId want = v.kind == VnfKind::Ingress ? s.ingress_node : s.egress_node;
      if (host != want)
        out.push_back({Violation::Kind::EndpointPin, host, -1,
                       std::string(to_string(v.kind)) + " must stay on its core switch"});
    } else if (!g.is_server(host)) {
      out.push_back({Violation::Kind::ComputeOnNonServer, host, -1,
                     std::string(to_string(v.kind)) + " mapped off the server pool"});
    }
  }
  // aggregated per-server demand vs residual
  std::map<NodeId, ResourceVector> need;
  for (std::size_t i = 0; i < s.vnfs.size(); ++i)
    if (!is_endpoint(s.vnfs[i].kind)) need[p.vnf_to_node[i]] += s.vnfs[i].demand;
  for (const auto& [node, demand] : need) {
    if (!g.is_server(node)) continue;  // already reported above
    if (!demand.fits_within(residual_[node]))
      out.push_back({Violation::Kind::ServerCapacity, node, -1, "insufficient server resources"});
  }
  // aggregated per-link bandwidth, counting every edge of this placement
  std::map<LinkId, std::int64_t> link_need;
  for (std::size_t i = 0; i < s.edges.size(); ++i)
    if (!p.edge_routes[i].colocated)
      for (LinkId l : p.edge_routes[i].links) link_need[l] += s.edges[i].bandwidth_bps;
  for (const auto& [link, bw] : link_need)
    if (bw > residual_bw_[link])
      out.push_back({Violation::Kind::LinkCapacity, -1, link, "insufficient link bandwidth"});
  const double delay = delay_of(g, s, p);
  if (delay > s.max_delay_ms)
    out.push_back({Violation::Kind::DelayBudget, -1, -1,
                   "chain delay " + std::to_string(delay) + " ms over budget"});
  return out;
}

void NetworkState::add_load(const ServiceRequest& s, const Placement& p, int sign) {
  for (std::size_t i = 0; i < s.vnfs.size(); ++i) {
    const NodeId host = p.vnf_to_node[i];
    if (sign > 0) {
      residual_[host] -= s.vnfs[i].demand;
      hosted_[host] += 1;
      if (graph_->is_server(host) && power_[host] != PowerState::Active) {
        if (power_[host] == PowerState::Off) ++wakes_;
        power_[host] = PowerState::Active;
        idle_slots_[host] = 0;
      }
    } else {
      residual_[host] += s.vnfs[i].demand;
      hosted_[host] -= 1;
      if (graph_->is_server(host) && hosted_[host] == 0) {
        power_[host] = PowerState::Idle;
        idle_slots_[host] = 0;
      }
    }
  }
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    if (p.edge_routes[i].colocated) continue;
    for (LinkId l : p.edge_routes[i].links) {
      residual_bw_[l] -= sign * s.edges[i].bandwidth_bps;
      flows_[l] += sign;
    }
  }
}

bool NetworkState::apply(const ServiceRequest& s, const Placement& p,
                         std::vector<Violation>* why) {
  if (applied_.count(s.id)) throw std::invalid_argument("service already applied");
  std::vector<Violation> v = check_feasible(s, p);
  if (!v.empty()) {
    if (why) *why = std::move(v);
    return false;
  }
  AppliedService rec;
  rec.placement = p;
  for (const VnfSpec& f : s.vnfs) rec.vnf_demands.push_back(f.demand);
  for (const ServiceEdge& e : s.edges) rec.edge_bw.push_back(e.bandwidth_bps);
  add_load(s, p, +1);
  applied_.emplace(s.id, std::move(rec));
  return true;
}

void NetworkState::release(int service_id) {
  auto it = applied_.find(service_id);
  if (it == applied_.end()) throw std::invalid_argument("release of unknown service");
  const AppliedService& rec = it->second;
  // undo with the recorded amounts; exact integer arithmetic restores the
  // pre-apply state bit for bit
  ServiceRequest ghost;
  ghost.id = service_id;
  ghost.vnfs.resize(rec.vnf_demands.size());
  for (std::size_t i = 0; i < rec.vnf_demands.size(); ++i) {
    ghost.vnfs[i].demand = rec.vnf_demands[i];
    ghost.vnfs[i].kind = VnfKind::Capture;  // demand bookkeeping only
  }
  ghost.edges.resize(rec.edge_bw.size());
  for (std::size_t i = 0; i < rec.edge_bw.size(); ++i) ghost.edges[i].bandwidth_bps = rec.edge_bw[i];
  add_load(ghost, rec.placement, -1);
  applied_.erase(it);
}

UtilizationReport NetworkState::utilization(const Weights& w) const {
  return utilization_with(w, {});
}

UtilizationReport NetworkState::utilization_with(const Weights& w, const LoadDelta& delta) const {
  const NetworkGraph& g = *graph_;
  auto extra_hosted = [&](NodeId n) -> int {
    auto it = std::lower_bound(delta.hosted.begin(), delta.hosted.end(), n,
                               [](const auto& kv, NodeId x) { return kv.first < x; });
    return it != delta.hosted.end() && it->first == n ? it->second : 0;
  };
  auto extra_bw = [&](LinkId l) -> const std::pair<LinkId, std::int64_t>* {
    auto it = std::lower_bound(delta.bw.begin(), delta.bw.end(), l,
                               [](const auto& kv, LinkId x) { return kv.first < x; });
    return it != delta.bw.end() && it->first == l ? &*it : nullptr;
  };
  int used_servers = 0;
  for (NodeId n : g.servers)
    if (hosted_[n] + extra_hosted(n) > 0) ++used_servers;
  int used_links = 0;
  double ratio_sum = 0.0;
  for (int l = 0; l < g.link_count(); ++l) {
    const auto* e = extra_bw(l);
    if (flows_[l] > 0 || e != nullptr) ++used_links;
    const std::int64_t used =
        (g.links[l].bandwidth_bps - residual_bw_[l]) + (e ? e->second : 0);
    ratio_sum += static_cast<double>(used) / static_cast<double>(g.links[l].bandwidth_bps);
  }
  UtilizationReport r;
  const int n_srv = static_cast<int>(g.servers.size());
  const int n_lnk = g.link_count();
  r.servers = n_srv ? static_cast<double>(used_servers) / n_srv : 0.0;
  r.links = n_lnk ? static_cast<double>(used_links) / n_lnk : 0.0;
  r.bandwidth = n_lnk ? ratio_sum / n_lnk : 0.0;
  r.total = w.server * r.servers + w.link * r.links + w.bandwidth * r.bandwidth;
  return r;
}

void NetworkState::advance_power(int off_after_idle_slots) {
  for (NodeId n : graph_->servers) {
    if (power_[n] != PowerState::Idle) continue;
    if (++idle_slots_[n] >= off_after_idle_slots) {
      power_[n] = PowerState::Off;
      idle_slots_[n] = 0;
    }
  }
}

int NetworkState::active_server_count() const {
  int c = 0;
  for (NodeId n : graph_->servers)
    if (power_[n] == PowerState::Active) ++c;
  return c;
}

std::vector<int> NetworkState::applied_service_ids() const {
  std::vector<int> ids;
  ids.reserve(applied_.size());
  for (const auto& [id, rec] : applied_) ids.push_back(id);
  return ids;
}

const Placement& NetworkState::placement_of(int id) const {
  auto it = applied_.find(id);
  if (it == applied_.end()) throw std::invalid_argument("placement of unknown service");
  return it->second.placement;
}

std::vector<NodeId> NetworkState::busy_servers() const {
  std::vector<NodeId> out;
  for (NodeId n : graph_->servers)
    if (hosted_[n] > 0) out.push_back(n);
  return out;
}

bool NetworkState::operator==(const NetworkState& o) const {
  return residual_ == o.residual_ && residual_bw_ == o.residual_bw_ && hosted_ == o.hosted_ &&
         flows_ == o.flows_ && power_ == o.power_ && idle_slots_ == o.idle_slots_ &&
         applied_ == o.applied_ && wakes_ == o.wakes_;
}

double delay_of(const NetworkGraph& g, const ServiceRequest& s, const Placement& p) {
  double total = 0.0;
  for (const VnfSpec& v : s.vnfs) total += v.compute_ms;
  for (const EdgeRoute& r : p.edge_routes)
    if (!r.colocated)
      for (LinkId l : r.links) total += g.links[l].delay_ms;
  return total;
}

std::string placement_to_json(const Placement& p) {
  nlohmann::json j;
  j["service_id"] = p.service_id;
  nlohmann::json nodes = nlohmann::json::object();
  for (std::size_t i = 0; i < p.vnf_to_node.size(); ++i)
    nodes[std::to_string(i)] = p.vnf_to_node[i];
  j["vnf_to_node"] = nodes;
  nlohmann::json routes = nlohmann::json::object();
  for (std::size_t i = 0; i < p.edge_routes.size(); ++i) {
    if (p.edge_routes[i].colocated)
      routes[std::to_string(i)] = "colocated";
    else
      routes[std::to_string(i)] = p.edge_routes[i].links;
  }
  j["edge_to_path"] = routes;
  return j.dump();
}

Placement placement_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Placement p;
  p.service_id = j.at("service_id").get<int>();
  const auto& nodes = j.at("vnf_to_node");
  p.vnf_to_node.resize(nodes.size());
  for (auto it = nodes.begin(); it != nodes.end(); ++it)
    p.vnf_to_node.at(std::stoul(it.key())) = it.value().get<NodeId>();
  const auto& routes = j.at("edge_to_path");
  p.edge_routes.resize(routes.size());
  for (auto it = routes.begin(); it != routes.end(); ++it) {
    EdgeRoute r;
    if (it.value().is_string() && it.value().get<std::string>() == "colocated")
      r.colocated = true;
    else
      r.links = it.value().get<std::vector<LinkId>>();
    p.edge_routes.at(std::stoul(it.key())) = std::move(r);
  }
  return p;
}

}  // namespace sfcsim
