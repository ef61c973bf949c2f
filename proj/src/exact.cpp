#include "sfcsim/exact.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace sfcsim {
namespace {

// One branching decision. Steps follow batch order; within a service every
// VNF is assigned in dependency order, and each edge is routed immediately
// after its head VNF (the tail is assigned earlier by construction).
struct Step {
  enum Kind { Assign, Route } kind;
  int svc;
  int vnf;   // Assign only
  int edge;  // Route only
};

std::vector<Step> build_steps(const std::vector<const ServiceRequest*>& batch) {
  std::vector<Step> steps;
  for (int si = 0; si < static_cast<int>(batch.size()); ++si) {
    const ServiceRequest& s = *batch[si];
    std::vector<std::vector<int>> in_edges(s.vnfs.size());
    for (int e = 0; e < static_cast<int>(s.edges.size()); ++e)
      in_edges[s.edges[e].to].push_back(e);
    for (int f : topological_order(s)) {
      steps.push_back({Step::Assign, si, f, -1});
      for (int e : in_edges[f]) steps.push_back({Step::Route, si, -1, e});
    }
  }
  return steps;
}

// Shared mutable search state for both solvers. Resource arrays mirror
// NetworkState's integer ledgers; the leaf score runs the same per-link scan
// in the same order, so leaf values line up with utilization() measurements.
struct Search {
  const NetworkGraph& g;
  const PathTable& paths;
  const Weights& w;
  const std::vector<const ServiceRequest*>& batch;
  std::vector<Step> steps;

  std::vector<ResourceVector> residual;
  std::vector<std::int64_t> residual_bw;
  std::vector<int> hosted;
  std::vector<int> flows;

  // Aggregates for the cheap partial score.
  int used_servers = 0;
  int used_links = 0;
  std::vector<std::int64_t> cap_values;  // distinct link capacities, ascending
  std::vector<std::int64_t> cap_used;    // used bandwidth total per capacity class
  std::vector<int> cap_of_link;

  std::vector<std::vector<NodeId>> hosts;      // [svc][vnf]
  std::vector<std::vector<EdgeRoute>> routes;  // [svc][edge]
  std::vector<double> routed_delay;
  std::vector<double> compute_ms;

  bool has_best = false;
  double best_u = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, Placement>> best_placements;

  std::uint64_t nodes = 0;
  bool stopped = false;
  std::uint64_t max_nodes = ~std::uint64_t{0};
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
  bool prune = false;

  Search(const NetworkGraph& g_, const PathTable& paths_, const Weights& w_,
         const std::vector<const ServiceRequest*>& batch_, const NetworkState& state)
      : g(g_), paths(paths_), w(w_), batch(batch_), steps(build_steps(batch_)) {
    residual.resize(g.node_count());
    hosted.resize(g.node_count());
    for (NodeId n = 0; n < g.node_count(); ++n) {
      residual[n] = state.residual(n);
      hosted[n] = state.hosted_vnf_count(n);
    }
    residual_bw.resize(g.link_count());
    flows.resize(g.link_count());
    cap_of_link.resize(g.link_count());
    std::set<std::int64_t> caps;
    for (const Link& l : g.links) caps.insert(l.bandwidth_bps);
    cap_values.assign(caps.begin(), caps.end());
    cap_used.assign(cap_values.size(), 0);
    for (LinkId l = 0; l < g.link_count(); ++l) {
      residual_bw[l] = state.residual_bw(l);
      flows[l] = state.link_flow_count(l);
      const auto it = std::lower_bound(cap_values.begin(), cap_values.end(), g.links[l].bandwidth_bps);
      cap_of_link[l] = static_cast<int>(it - cap_values.begin());
      cap_used[cap_of_link[l]] += g.links[l].bandwidth_bps - residual_bw[l];
    }
    for (NodeId n : g.servers)
      if (hosted[n] > 0) ++used_servers;
    for (LinkId l = 0; l < g.link_count(); ++l)
      if (flows[l] > 0) ++used_links;

    hosts.resize(batch.size());
    routes.resize(batch.size());
    routed_delay.assign(batch.size(), 0.0);
    compute_ms.assign(batch.size(), 0.0);
    for (std::size_t si = 0; si < batch.size(); ++si) {
      hosts[si].assign(batch[si]->vnfs.size(), -1);
      routes[si].resize(batch[si]->edges.size());
      for (const VnfSpec& v : batch[si]->vnfs) compute_ms[si] += v.compute_ms;
    }
  }

  // Weighted score of the load committed so far. Grouping the bandwidth sum
  // by capacity class keeps this O(1)-ish per node; it matches the canonical
  // scan mathematically, so with the epsilon margin the bound never closes a
  // subtree holding a strictly better leaf.
  double partial_u() const {
    double ratio = 0.0;
    for (std::size_t i = 0; i < cap_values.size(); ++i)
      ratio += static_cast<double>(cap_used[i]) / static_cast<double>(cap_values[i]);
    const int n_srv = static_cast<int>(g.servers.size());
    const int n_lnk = g.link_count();
    const double rs = n_srv ? static_cast<double>(used_servers) / n_srv : 0.0;
    const double rl = n_lnk ? static_cast<double>(used_links) / n_lnk : 0.0;
    const double rb = n_lnk ? ratio / n_lnk : 0.0;
    return w.server * rs + w.link * rl + w.bandwidth * rb;
  }

  // Same arithmetic and iteration order as NetworkState::utilization.
  double canonical_u() const {
    int us = 0;
    for (NodeId n : g.servers)
      if (hosted[n] > 0) ++us;
    int ul = 0;
    double ratio_sum = 0.0;
    for (int l = 0; l < g.link_count(); ++l) {
      if (flows[l] > 0) ++ul;
      const std::int64_t used = g.links[l].bandwidth_bps - residual_bw[l];
      ratio_sum += static_cast<double>(used) / static_cast<double>(g.links[l].bandwidth_bps);
    }
    const int n_srv = static_cast<int>(g.servers.size());
    const int n_lnk = g.link_count();
    const double rs = n_srv ? static_cast<double>(us) / n_srv : 0.0;
    const double rl = n_lnk ? static_cast<double>(ul) / n_lnk : 0.0;
    const double rb = n_lnk ? ratio_sum / n_lnk : 0.0;
    return w.server * rs + w.link * rl + w.bandwidth * rb;
  }

  void place_vnf(int si, int vnf, NodeId node, const ResourceVector& demand) {
    residual[node] -= demand;
    hosted[node] += 1;
    if (g.is_server(node) && hosted[node] == 1) ++used_servers;
    hosts[si][vnf] = node;
  }

  void unplace_vnf(int si, int vnf, NodeId node, const ResourceVector& demand) {
    residual[node] += demand;
    hosted[node] -= 1;
    if (g.is_server(node) && hosted[node] == 0) --used_servers;
    hosts[si][vnf] = -1;
  }

  void take_path(int si, int edge, const Path& p, std::int64_t bw) {
    for (LinkId l : p.links) {
      residual_bw[l] -= bw;
      flows[l] += 1;
      if (flows[l] == 1) ++used_links;
      cap_used[cap_of_link[l]] += bw;
    }
    routed_delay[si] += p.total_delay_ms;
    routes[si][edge].colocated = false;
    routes[si][edge].links = p.links;
  }

  void drop_path(int si, int edge, const Path& p, std::int64_t bw) {
    for (LinkId l : p.links) {
      residual_bw[l] += bw;
      flows[l] -= 1;
      if (flows[l] == 0) --used_links;
      cap_used[cap_of_link[l]] -= bw;
    }
    routed_delay[si] -= p.total_delay_ms;
    routes[si][edge] = EdgeRoute{};
  }

  void record_leaf() {
    const double u = canonical_u();
    if (!has_best || u < best_u) {
      has_best = true;
      best_u = u;
      best_placements.clear();
      for (std::size_t si = 0; si < batch.size(); ++si)
        best_placements.push_back({batch[si]->id, Placement{batch[si]->id, hosts[si], routes[si]}});
    }
  }

  void solve(std::size_t idx) {
    if (stopped) return;
    ++nodes;
    if (nodes >= max_nodes) {
      stopped = true;
      return;
    }
    if ((nodes & 8191u) == 0 && std::chrono::steady_clock::now() >= deadline) {
      stopped = true;
      return;
    }
    if (prune && has_best && partial_u() > best_u + 1e-12) return;
    if (idx == steps.size()) {
      record_leaf();
      return;
    }
    const Step& st = steps[idx];
    const ServiceRequest& s = *batch[st.svc];
    if (st.kind == Step::Assign) {
      const VnfSpec& v = s.vnfs[st.vnf];
      if (is_endpoint(v.kind)) {
        const NodeId pin = v.kind == VnfKind::Ingress ? s.ingress_node : s.egress_node;
        place_vnf(st.svc, st.vnf, pin, v.demand);
        solve(idx + 1);
        unplace_vnf(st.svc, st.vnf, pin, v.demand);
        return;
      }
      for (NodeId srv : g.servers) {
        if (stopped) return;
        if (!v.demand.fits_within(residual[srv])) continue;
        place_vnf(st.svc, st.vnf, srv, v.demand);
        solve(idx + 1);
        unplace_vnf(st.svc, st.vnf, srv, v.demand);
      }
      return;
    }
    const ServiceEdge& e = s.edges[st.edge];
    const NodeId from = hosts[st.svc][e.from];
    const NodeId to = hosts[st.svc][e.to];
    if (from == to) {
      routes[st.svc][st.edge] = EdgeRoute{true, {}};
      solve(idx + 1);
      routes[st.svc][st.edge] = EdgeRoute{};
      return;
    }
    for (const Path& p : paths.between(from, to)) {
      if (stopped) return;
      bool fits = true;
      for (LinkId l : p.links)
        if (residual_bw[l] < e.bandwidth_bps) {
          fits = false;
          break;
        }
      if (!fits) continue;
      if (routed_delay[st.svc] + p.total_delay_ms + compute_ms[st.svc] > s.max_delay_ms)
        continue;  // later edges only add delay, so this branch is dead
      take_path(st.svc, st.edge, p, e.bandwidth_bps);
      solve(idx + 1);
      drop_path(st.svc, st.edge, p, e.bandwidth_bps);
    }
  }
};

double estimate_leaves(const std::vector<const ServiceRequest*>& batch, const NetworkGraph& g,
                       const PathTable& paths) {
  int max_paths = 1;
  const auto sites = g.placement_sites();
  for (NodeId a : sites)
    for (NodeId b : sites)
      if (a != b)
        max_paths = std::max(max_paths, static_cast<int>(paths.between(a, b).size()));
  double est = 1.0;
  for (const ServiceRequest* s : batch) {
    for (const VnfSpec& v : s->vnfs)
      if (!is_endpoint(v.kind)) est *= static_cast<double>(g.servers.size());
    for (std::size_t e = 0; e < s->edges.size(); ++e) est *= max_paths;
  }
  return est;
}

}  // namespace

ExactResult exact_place(const std::vector<const ServiceRequest*>& batch, const NetworkState& state,
                        const PathTable& paths, const Weights& w, const ExactConfig& cfg) {
  w.validate();
  Search s(state.graph(), paths, w, batch, state);
  s.max_nodes = cfg.max_nodes;
  s.prune = cfg.prune;
  s.deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(cfg.time_budget_s));

  // Incumbent from the greedy heuristic: any full greedy solution is an upper
  // bound, and its canonical score comes from the same measurement code.
  {
    NetworkState warm = state;
    auto outcomes = greedy_place(batch, warm, paths, w);
    bool all = !outcomes.empty();
    for (const auto& [id, out] : outcomes) all = all && out.success;
    if (all && !batch.empty()) {
      s.has_best = true;
      s.best_u = warm.utilization(w).total;
      for (const auto& [id, out] : outcomes) s.best_placements.push_back({id, *out.placement});
    }
  }

  s.solve(0);

  ExactResult r;
  r.nodes_explored = s.nodes;
  if (s.has_best) {
    r.u_total = s.best_u;
    r.placements = s.best_placements;
    r.optimal = !s.stopped;
  } else {
    r.infeasible = !s.stopped;
  }
  return r;
}

ExactResult brute_force_place(const std::vector<const ServiceRequest*>& batch,
                              const NetworkState& state, const PathTable& paths, const Weights& w,
                              std::uint64_t leaf_cap) {
  w.validate();
  const double est = estimate_leaves(batch, state.graph(), paths);
  if (est > static_cast<double>(leaf_cap))
    throw SearchSpaceTooLarge("estimated " + std::to_string(est) + " combinations exceed cap of " +
                              std::to_string(leaf_cap));
  Search s(state.graph(), paths, w, batch, state);
  // No bounding, no budget: every feasible combination is visited and scored.
  s.solve(0);
  ExactResult r;
  r.nodes_explored = s.nodes;
  if (s.has_best) {
    r.u_total = s.best_u;
    r.placements = s.best_placements;
    r.optimal = true;
  } else {
    r.infeasible = true;
  }
  return r;
}

PlacerFn exact_placer(ExactConfig cfg) {
  return [cfg](const std::vector<const ServiceRequest*>& batch, NetworkState& state,
               const PathTable& paths, const Weights& w) {
    std::vector<std::pair<int, PlacementOutcome>> outcomes;
    if (batch.empty()) return outcomes;
    ExactResult r = exact_place(batch, state, paths, w, cfg);
    if (r.placements.size() == batch.size()) {
      for (std::size_t i = 0; i < r.placements.size(); ++i) {
        const auto& [id, pl] = r.placements[i];
        if (!state.apply(*batch[i], pl))
          throw std::logic_error("exact solution rejected by the state it was solved against");
        PlacementOutcome out;
        out.success = true;
        out.placement = pl;
        out.objective = state.utilization(w).total;
        for (NodeId host : pl.vnf_to_node)
          if (state.graph().is_server(host)) {
            out.server = host;
            break;
          }
        outcomes.push_back({id, out});
      }
      return outcomes;
    }
    // No full joint solution within budget: fall back to the greedy batch so
    // the caller still gets per-service progress.
    return greedy_place(batch, state, paths, w);
  };
}

}  // namespace sfcsim
