// Acceptance gate: one check per shipping criterion, one printed line each.
// Returns the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sfcsim/cli.hpp"
#include "sfcsim/exact.hpp"
#include "sfcsim/greedy.hpp"
#include "sfcsim/lookahead.hpp"
#include "sfcsim/sim.hpp"

using namespace sfcsim;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ServiceRequest chain_between(int id, NodeId in, NodeId out) {
  const ChainTemplate ct = default_chain();
  ServiceRequest s;
  s.id = id;
  s.vnfs = ct.vnfs;
  s.edges = ct.edges;
  s.max_delay_ms = ct.max_delay_ms;
  s.ingress_node = in;
  s.egress_node = out;
  return s;
}

// The 50 seeded oracle instances: alternately one and two default chains on
// bcube(2,1). Two-chain instances pin the path choice (d=1) so the unpruned
// enumeration stays inside its leaf budget; single-chain instances keep the
// full d=8 path branching.
struct OracleInstance {
  std::vector<ServiceRequest> services;
  int d = 8;
};

OracleInstance oracle_instance(int i, const NetworkGraph& g) {
  std::mt19937_64 rng(1000 + i);
  OracleInstance inst;
  const int n = 1 + i % 2;
  inst.d = n == 1 ? 8 : 1;
  for (int j = 0; j < n; ++j) {
    const NodeId in = g.core_switches[rng() % g.core_switches.size()];
    NodeId out = in;
    while (out == in) out = g.core_switches[rng() % g.core_switches.size()];
    inst.services.push_back(chain_between(j, in, out));
  }
  return inst;
}

std::vector<const ServiceRequest*> ptrs(const std::vector<ServiceRequest>& v) {
  std::vector<const ServiceRequest*> b;
  for (const auto& s : v) b.push_back(&s);
  return b;
}

struct Criterion {
  bool pass = false;
  char detail[256] = "";
};

// 1 & 2 share the instance sweep; computed once.
void oracle_criteria(Criterion& c1, Criterion& c2) {
  const auto t0 = Clock::now();
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths8 = k_shortest_paths(g, 8);
  const PathTable paths1 = k_shortest_paths(g, 1);
  const Weights w;

  int value_matches = 0, dominance_holds = 0, feasible = 0;
  for (int i = 0; i < 50; ++i) {
    const OracleInstance inst = oracle_instance(i, g);
    const PathTable& paths = inst.d == 8 ? paths8 : paths1;

    NetworkState s_exact(g), s_brute(g), s_greedy(g);
    const ExactResult ex = exact_place(ptrs(inst.services), s_exact, paths, w);
    const ExactResult bf = brute_force_place(ptrs(inst.services), s_brute, paths, w);
    if (ex.optimal && bf.optimal && ex.u_total == bf.u_total &&
        ex.placements.size() == inst.services.size())
      ++value_matches;

    const auto gouts = greedy_place(ptrs(inst.services), s_greedy, paths, w);
    const bool greedy_ok =
        std::all_of(gouts.begin(), gouts.end(), [](const auto& o) { return o.second.success; });
    const double greedy_u = s_greedy.utilization(w).total;
    if (greedy_ok && greedy_u >= ex.u_total - 1e-12) ++dominance_holds;

    NetworkState replay_e(g), replay_g(g);
    bool ok = true;
    for (const auto& [id, pl] : ex.placements)
      ok = ok && replay_e.check_feasible(inst.services[id], pl).empty() &&
           replay_e.apply(inst.services[id], pl);
    for (const auto& [id, out] : gouts)
      ok = ok && replay_g.check_feasible(inst.services[id], *out.placement).empty() &&
           replay_g.apply(inst.services[id], *out.placement);
    if (ok) ++feasible;
  }
  const double dt = seconds_since(t0);

  c1.pass = value_matches == 50 && dt < 60.0;
  std::snprintf(c1.detail, sizeof(c1.detail),
                "exact value == brute-force value on %d/50 instances in %.2f s", value_matches,
                dt);
  c2.pass = dominance_holds == 50 && feasible == 50;
  std::snprintf(c2.detail, sizeof(c2.detail),
                "greedy >= exact on %d/50, all placements feasible on %d/50", dominance_holds,
                feasible);
}

Criterion m0_degeneracy() {
  Criterion c;
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  int identical_slots = 0, total_slots = 0;
  bool all_equal = true;

  for (std::uint64_t seed = 0; seed < 10 && all_equal; ++seed) {
    TraceConfig tc;
    tc.seed = seed;
    const Trace trace = generate_trace(tc, g.core_switches);
    std::map<int, const ServiceRequest*> by_id;
    for (const ServiceRequest& s : trace.services) by_id.emplace(s.id, &s);

    NetworkState via_lookahead(g), via_greedy(g);
    for (int t = 0; t < trace.horizon_slots && all_equal; ++t) {
      const PlanResult r =
          lookahead_allocate(via_lookahead, trace, t - 1, 0, greedy_placer(), paths, w);

      const std::vector<int> applied = via_greedy.applied_service_ids();
      const ServiceSets sets =
          classify_services(trace, t, std::set<int>(applied.begin(), applied.end()));
      std::vector<const ServiceRequest*> batch;
      for (int id : sets.active_ids)
        if (!via_greedy.has_service(id)) batch.push_back(by_id.at(id));
      const auto outs = greedy_place(batch, via_greedy, paths, w);

      bool same = r.committed.size() == outs.size() && via_lookahead == via_greedy;
      for (std::size_t i = 0; same && i < outs.size(); ++i) {
        same = r.committed[i].first == outs[i].first &&
               r.committed[i].second.success == outs[i].second.success &&
               r.committed[i].second.placement == outs[i].second.placement &&
               r.committed[i].second.objective == outs[i].second.objective;
      }
      all_equal = same;
      ++total_slots;
      if (same) ++identical_slots;

      for (NetworkState* st : {&via_lookahead, &via_greedy})
        for (int id : st->applied_service_ids())
          if (by_id.at(id)->end_slot <= t - 1) st->release(id);
      via_lookahead.advance_power(1);
      via_greedy.advance_power(1);
    }
  }
  c.pass = all_equal;
  std::snprintf(c.detail, sizeof(c.detail),
                "M=0 committed byte-identically to greedy on %d/%d slots across 10 seeds",
                identical_slots, total_slots);
  return c;
}

Criterion lookahead_benefit() {
  Criterion c;
  const auto t0 = Clock::now();
  const NetworkGraph g = build_fat_tree(4);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  const int reps = 30;

  double mean0 = 0.0, mean1 = 0.0;
  int improved_pairs = 0;
  for (int r = 0; r < reps; ++r) {
    TraceConfig tc;
    tc.k_obj = 100;
    tc.seed = 1 + static_cast<std::uint64_t>(r);
    const Trace trace = generate_trace(tc, g.core_switches);
    const double u0 = run_on(g, paths, trace, 0, greedy_placer(), w, 1).mean_u;
    const double u1 = run_on(g, paths, trace, 1, greedy_placer(), w, 1).mean_u;
    mean0 += u0;
    mean1 += u1;
    if (u1 < u0) ++improved_pairs;
  }
  mean0 /= reps;
  mean1 /= reps;
  const double improvement = (mean0 - mean1) / mean0 * 100.0;
  const double dt = seconds_since(t0);

  c.pass = mean1 < mean0 && improvement >= 5.0 && improvement <= 35.0 && dt < 300.0;
  std::snprintf(c.detail, sizeof(c.detail),
                "mean u: M=0 %.4f, M=1 %.4f; improvement %.2f%% (band 5-35%%), %d/%d pairs "
                "improved, %.1f s",
                mean0, mean1, improvement, improved_pairs, reps, dt);
  return c;
}

Criterion load_monotonicity() {
  Criterion c;
  ExperimentConfig base;
  base.topology.kind = "fat_tree";
  base.topology.a = 4;
  base.trace.seed = 500;
  std::vector<int> ks;
  for (int k = 10; k <= 100; k += 10) ks.push_back(k);
  const auto rows = sweep(base, ks, {0}, 5, 8);

  std::map<int, double> mean_by_k;
  for (const SweepRow& r : rows) mean_by_k[r.k_obj] = r.mean_u;
  int inversions = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i < ks.size(); ++i) {
    const double prev = mean_by_k[ks[i - 1]], cur = mean_by_k[ks[i]];
    if (cur < prev) {
      ++inversions;
      worst = std::max(worst, prev - cur);
    }
  }
  c.pass = inversions == 0 || (inversions == 1 && worst < 0.002);
  std::snprintf(c.detail, sizeof(c.detail),
                "mean u rises %.4f -> %.4f over K=10..100; %d inversions (worst %.5f)",
                mean_by_k[10], mean_by_k[100], inversions, worst);
  return c;
}

// Resource books only; power hysteresis (wake counter, Idle-not-Off after
// release) is intentional and exempt from the apply/release identity.
bool same_ledgers(const NetworkGraph& g, const NetworkState& a, const NetworkState& b) {
  if (a.applied_service_ids() != b.applied_service_ids()) return false;
  for (NodeId n = 0; n < g.node_count(); ++n)
    if (!(a.residual(n) == b.residual(n)) || a.hosted_vnf_count(n) != b.hosted_vnf_count(n))
      return false;
  for (LinkId l = 0; l < g.link_count(); ++l)
    if (a.residual_bw(l) != b.residual_bw(l) || a.link_flow_count(l) != b.link_flow_count(l))
      return false;
  return true;
}

Criterion constraint_suite() {
  Criterion c;
  const NetworkGraph g = build_fat_tree(4);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  NetworkState state(g);
  std::mt19937_64 rng(2024);

  std::map<int, std::pair<ServiceRequest, Placement>> live;
  int cases = 0, violations = 0, next_id = 0;

  const auto audit = [&]() {
    // Rebuild every ledger from the live set and compare against the state.
    std::vector<ResourceVector> used(g.node_count());
    std::vector<std::int64_t> used_bw(g.link_count(), 0);
    std::vector<int> hosted(g.node_count(), 0), flows(g.link_count(), 0);
    for (const auto& [id, sp] : live) {
      const auto& [svc, pl] = sp;
      for (std::size_t v = 0; v < svc.vnfs.size(); ++v) {
        used[pl.vnf_to_node[v]] += svc.vnfs[v].demand;
        ++hosted[pl.vnf_to_node[v]];
      }
      for (std::size_t e = 0; e < svc.edges.size(); ++e)
        if (!pl.edge_routes[e].colocated)
          for (LinkId l : pl.edge_routes[e].links) {
            used_bw[l] += svc.edges[e].bandwidth_bps;
            ++flows[l];
          }
      if (delay_of(g, svc, pl) > svc.max_delay_ms + 1e-9) ++violations;
    }
    for (NodeId n : g.servers) {
      ResourceVector sum = state.residual(n);
      sum += used[n];
      if (!(sum == g.server_caps[n])) ++violations;          // conservation
      if (!used[n].fits_within(g.server_caps[n])) ++violations;  // capacity
      if (state.hosted_vnf_count(n) != hosted[n]) ++violations;
      const ResourceVector& res = state.residual(n);
      if (res.vcpu < 0 || res.mem_gb < 0 || res.gpu < 0) ++violations;
    }
    for (LinkId l = 0; l < g.link_count(); ++l) {
      if (state.residual_bw(l) + used_bw[l] != g.links[l].bandwidth_bps) ++violations;
      if (used_bw[l] > g.links[l].bandwidth_bps) ++violations;
      if (state.residual_bw(l) < 0) ++violations;
      if (state.link_flow_count(l) != flows[l]) ++violations;
    }
    const UtilizationReport u = state.utilization(w);
    for (double x : {u.servers, u.links, u.bandwidth, u.total})
      if (x < 0.0 || x > 1.0) ++violations;
    if (u.total != w.server * u.servers + w.link * u.links + w.bandwidth * u.bandwidth)
      ++violations;
  };

  while (cases < 10'000) {
    const bool try_apply = live.empty() || rng() % 10 < 6;
    if (try_apply) {
      const NodeId in = g.core_switches[rng() % g.core_switches.size()];
      NodeId out = in;
      while (out == in) out = g.core_switches[rng() % g.core_switches.size()];
      ServiceRequest svc = chain_between(next_id, in, out);
      if (rng() % 4 == 0)  // occasionally much heavier flows
        for (ServiceEdge& e : svc.edges) e.bandwidth_bps *= 5;
      const auto out_pl = search(svc, g.servers, state, paths, w);
      if (out_pl.success) {
        const NetworkState before = state;
        if (!state.apply(svc, *out_pl.placement)) {
          ++violations;  // search promised feasibility
        } else {
          NetworkState undo = state;
          undo.release(next_id);
          if (!same_ledgers(g, undo, before)) ++violations;  // apply/release identity
          live.emplace(next_id, std::make_pair(svc, *out_pl.placement));
        }
        ++next_id;
      }
    } else {
      auto it = live.begin();
      std::advance(it, rng() % live.size());
      state.release(it->first);
      live.erase(it);
    }
    ++cases;
    audit();
  }
  c.pass = violations == 0;
  std::snprintf(c.detail, sizeof(c.detail),
                "%d randomized apply/release cases audited, %d violations", cases, violations);
  return c;
}

Criterion topology_forms() {
  Criterion c;
  const NetworkGraph ft = build_fat_tree(4);
  const NetworkGraph bc = build_bcube(2, 1);
  const NetworkGraph vl = build_vl2(4, 4);
  c.pass = ft.servers.size() == 16 && ft.link_count() == 96 && bc.servers.size() == 4 &&
           bc.link_count() == 16 && vl.servers.size() == 16 && vl.link_count() == 64;
  std::snprintf(c.detail, sizeof(c.detail),
                "fat-tree(4) %zu/%d, bcube(2,1) %zu/%d, vl2(4,4) %zu/%d servers/links",
                ft.servers.size(), ft.link_count(), bc.servers.size(), bc.link_count(),
                vl.servers.size(), vl.link_count());
  return c;
}

Criterion greedy_speed() {
  Criterion c;
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  std::vector<ServiceRequest> svcs;
  for (int i = 0; i < 8; ++i) svcs.push_back(chain_between(i, 6 + i % 2, 6 + (i + 1) % 2));
  NetworkState state(g);
  const auto t0 = Clock::now();
  const auto outs = greedy_place(ptrs(svcs), state, paths, w);
  const double dt = seconds_since(t0);
  const bool all = std::all_of(outs.begin(), outs.end(),
                               [](const auto& o) { return o.second.success; });
  c.pass = all && dt < 0.1;
  std::snprintf(c.detail, sizeof(c.detail), "8-service batch placed in %.4f s (budget 0.1 s)",
                dt);
  return c;
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Criterion cli_determinism() {
  Criterion c;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sfcsim_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const char* name) { return (dir / name).string(); };

  const auto cli = [](std::vector<const char*> args) {
    args.insert(args.begin(), "sfcsim");
    // Keep the CLI's own chatter out of the one-line-per-criterion report.
    std::ostringstream sink;
    auto* out = std::cout.rdbuf(sink.rdbuf());
    auto* err = std::cerr.rdbuf(sink.rdbuf());
    const int rc = run_cli(static_cast<int>(args.size()), args.data());
    std::cout.rdbuf(out);
    std::cerr.rdbuf(err);
    return rc;
  };

  const std::string topo = p("b21.json");
  bool ok = cli({"topo", "--kind", "bcube", "--n", "2", "--k", "1", "--out", topo.c_str()}) == 0;
  const std::string t1 = p("t1.json"), t2 = p("t2.json");
  for (const std::string& t : {t1, t2})
    ok = ok && cli({"trace", "--topology", topo.c_str(), "--k-obj", "6", "--seed", "13", "--out",
                    t.c_str()}) == 0;
  const bool traces_equal = file_bytes(t1) == file_bytes(t2) && !file_bytes(t1).empty();

  const std::string r1 = p("r1.csv"), r2 = p("r2.csv");
  for (const std::string& r : {r1, r2})
    ok = ok && cli({"run", "--topology", topo.c_str(), "--trace", t1.c_str(), "--m", "1",
                    "--out", r.c_str()}) == 0;
  const bool runs_equal = file_bytes(r1) == file_bytes(r2) && !file_bytes(r1).empty();

  c.pass = ok && traces_equal && runs_equal;
  std::snprintf(c.detail, sizeof(c.detail),
                "repeat invocations byte-identical: trace %s, run CSV %s",
                traces_equal ? "yes" : "NO", runs_equal ? "yes" : "NO");
  return c;
}

}  // namespace

int run_criteria() {
  Criterion crit[9];
  oracle_criteria(crit[0], crit[1]);
  crit[2] = m0_degeneracy();
  crit[3] = lookahead_benefit();
  crit[4] = load_monotonicity();
  crit[5] = constraint_suite();
  crit[6] = topology_forms();
  crit[7] = greedy_speed();
  crit[8] = cli_determinism();

  int failures = 0;
  for (int i = 0; i < 9; ++i) {
    std::printf("criterion %d: %s — %s\n", i + 1, crit[i].pass ? "PASS" : "FAIL",
                crit[i].detail);
    if (!crit[i].pass) ++failures;
  }
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures;
}
