#include "sfcsim/greedy.hpp"

#include <algorithm>
#include <map>

namespace sfcsim {

namespace {

// Tentative placement of the whole chain with every compute VNF on `server`.
// Returns nothing if resources, routing, or the delay budget rule it out.
std::optional<Placement> try_on_server(const ServiceRequest& s, NodeId server,
                                       const NetworkState& state, const PathTable& paths) {
  const NetworkGraph& g = state.graph();
  ResourceVector total;
  for (const VnfSpec& v : s.vnfs)
    if (!is_endpoint(v.kind)) total += v.demand;
  if (!total.fits_within(state.residual(server))) return std::nullopt;

  Placement p;
  p.service_id = s.id;
  p.vnf_to_node.resize(s.vnfs.size());
  for (std::size_t i = 0; i < s.vnfs.size(); ++i) {
    if (s.vnfs[i].kind == VnfKind::Ingress)
      p.vnf_to_node[i] = s.ingress_node;
    else if (s.vnfs[i].kind == VnfKind::Egress)
      p.vnf_to_node[i] = s.egress_node;
    else
      p.vnf_to_node[i] = server;
  }
  p.edge_routes.resize(s.edges.size());

  // Route edges as their head VNF comes up in dependency order; bandwidth
  // claimed by earlier edges of this same placement counts against residuals.
  std::map<LinkId, std::int64_t> claimed;
  std::vector<std::vector<int>> in_edges(s.vnfs.size());
  for (std::size_t e = 0; e < s.edges.size(); ++e) in_edges[s.edges[e].to].push_back(e);
  for (int f : topological_order(s)) {
    for (int e : in_edges[f]) {
      const NodeId from = p.vnf_to_node[s.edges[e].from];
      const NodeId to = p.vnf_to_node[s.edges[e].to];
      if (from == to) {
        p.edge_routes[e].colocated = true;
        continue;
      }
      const std::int64_t need = s.edges[e].bandwidth_bps;
      bool routed = false;
      for (const Path& cand : paths.between(from, to)) {
        bool ok = true;
        for (LinkId l : cand.links) {
          auto it = claimed.find(l);
          const std::int64_t held = it == claimed.end() ? 0 : it->second;
          if (state.residual_bw(l) - held < need) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        for (LinkId l : cand.links) claimed[l] += need;
        p.edge_routes[e].links = cand.links;
        routed = true;
        break;
      }
      if (!routed) return std::nullopt;
    }
  }
  if (delay_of(g, s, p) > s.max_delay_ms) return std::nullopt;
  return p;
}

LoadDelta delta_of(const ServiceRequest& s, const Placement& p) {
  std::map<NodeId, int> hosted;
  std::map<LinkId, std::int64_t> bw;
  for (NodeId n : p.vnf_to_node) hosted[n] += 1;
  for (std::size_t e = 0; e < s.edges.size(); ++e)
    if (!p.edge_routes[e].colocated)
      for (LinkId l : p.edge_routes[e].links) bw[l] += s.edges[e].bandwidth_bps;
  LoadDelta d;
  d.hosted.assign(hosted.begin(), hosted.end());
  d.bw.assign(bw.begin(), bw.end());
  return d;
}

}  // namespace

PlacementOutcome search(const ServiceRequest& s, const std::vector<NodeId>& candidates,
                        const NetworkState& state, const PathTable& paths, const Weights& w) {
  PlacementOutcome best;
  for (NodeId server : candidates) {
    if (!state.graph().is_server(server)) continue;
    auto p = try_on_server(s, server, state, paths);
    if (!p) continue;
    const double u = state.utilization_with(w, delta_of(s, *p)).total;
    if (u < best.objective) {  // candidates ascend, so ties keep the lowest id
      best.success = true;
      best.server = server;
      best.placement = std::move(*p);
      best.objective = u;
    }
  }
  if (best.success) {
    // internal accounting must agree with the ledger's verdict
    if (!state.check_feasible(s, *best.placement).empty())
      throw std::logic_error("search produced an infeasible placement");
  }
  return best;
}

std::vector<std::pair<int, PlacementOutcome>> greedy_place(
    const std::vector<const ServiceRequest*>& batch, NetworkState& state, const PathTable& paths,
    const Weights& w) {
  std::vector<std::pair<int, PlacementOutcome>> out;
  for (const ServiceRequest* s : batch) {
    const std::vector<NodeId> busy = state.busy_servers();
    std::vector<NodeId> rest;
    std::set_difference(state.graph().servers.begin(), state.graph().servers.end(), busy.begin(),
                        busy.end(), std::back_inserter(rest));
    PlacementOutcome got = search(*s, busy, state, paths, w);
    if (!got.success) got = search(*s, rest, state, paths, w);
    if (got.success) {
      if (!state.apply(*s, *got.placement))
        throw std::logic_error("feasible placement failed to apply");
    }
    out.emplace_back(s->id, std::move(got));
  }
  return out;
}

PlacerFn greedy_placer() {
  return [](const std::vector<const ServiceRequest*>& batch, NetworkState& state,
            const PathTable& paths, const Weights& w) {
    return greedy_place(batch, state, paths, w);
  };
}

}  // namespace sfcsim
