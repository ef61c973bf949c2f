#include "sfcsim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "sfcsim/exact.hpp"

namespace sfcsim {

NetworkGraph build_topology(const TopologySpec& spec) {
  if (spec.kind == "fat_tree") return build_fat_tree(spec.a);
  if (spec.kind == "bcube") return build_bcube(spec.a, spec.b);
  if (spec.kind == "vl2") return build_vl2(spec.a, spec.b);
  throw std::invalid_argument("unknown topology kind: " + spec.kind);
}

std::string topology_label(const TopologySpec& spec) {
  if (spec.kind == "fat_tree") return "fat_tree(" + std::to_string(spec.a) + ")";
  return spec.kind + "(" + std::to_string(spec.a) + "," + std::to_string(spec.b) + ")";
}

RunSummary run_on(const NetworkGraph& g, const PathTable& paths, const Trace& trace,
                  int lookahead_slots, const PlacerFn& placer, const Weights& w,
                  int off_after_idle_slots) {
  NetworkState state(g);
  RunSummary sum;
  sum.slots.reserve(trace.horizon_slots);

  std::map<int, const ServiceRequest*> by_id;
  for (const ServiceRequest& s : trace.services) by_id.emplace(s.id, &s);
  std::set<int> placed_ids;  // currently applied or already served

  for (int t = 0; t < trace.horizon_slots; ++t) {
    SlotRecord rec;
    rec.slot = t;

    // Placement decisions for this slot happen during the previous one, while
    // services ending there still hold their hardware; the allocator sees that
    // stale state and only a lookahead pass may bank on the upcoming releases.
    for (int id : state.applied_service_ids())
      if (by_id.at(id)->end_slot == t - 1) ++rec.released;

    PlanResult plan = lookahead_allocate(state, trace, t - 1, lookahead_slots, placer, paths, w);

    for (int id : state.applied_service_ids())
      if (by_id.at(id)->end_slot <= t - 1) state.release(id);
    rec.placed = plan.placed;
    rec.unplaced = plan.unplaced;
    for (const auto& [id, out] : plan.committed)
      if (out.success) placed_ids.insert(id);
    sum.placed_total += plan.placed;

    state.advance_power(off_after_idle_slots);

    const UtilizationReport u = state.utilization(w);
    rec.u_servers = u.servers;
    rec.u_links = u.links;
    rec.u_bandwidth = u.bandwidth;
    rec.u_total = u.total;
    rec.active_servers = state.active_server_count();
    sum.slots.push_back(rec);

    sum.mean_u += rec.u_total;
    sum.peak_u = std::max(sum.peak_u, rec.u_total);
  }
  if (!sum.slots.empty()) sum.mean_u /= static_cast<double>(sum.slots.size());
  sum.wakes = state.wake_count();
  for (const ServiceRequest& s : trace.services)
    if (s.end_slot < trace.horizon_slots && !placed_ids.count(s.id)) ++sum.expired_unplaced;
  return sum;
}

RunSummary run(const ExperimentConfig& cfg) {
  cfg.weights.validate();
  const NetworkGraph g = build_topology(cfg.topology);
  const PathTable paths = k_shortest_paths(g, cfg.d);
  const Trace trace = generate_trace(cfg.trace, g.core_switches);
  const PlacerFn placer = cfg.placer == "exact" ? exact_placer() : greedy_placer();
  return run_on(g, paths, trace, cfg.lookahead, placer, cfg.weights, cfg.off_after_idle_slots);
}

void run_csv(std::ostream& os, const RunSummary& summary) {
  os << "slot,u_svr,u_link,u_bw,u_total,placed,released,unplaced,active_servers\n";
  os.precision(17);
  for (const SlotRecord& r : summary.slots)
    os << r.slot << ',' << r.u_servers << ',' << r.u_links << ',' << r.u_bandwidth << ','
       << r.u_total << ',' << r.placed << ',' << r.released << ',' << r.unplaced << ','
       << r.active_servers << '\n';
}

std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::vector<int>& k_obj_values,
                            const std::vector<int>& lookahead_values, int reps, int jobs) {
  base.weights.validate();
  if (reps < 1) throw std::invalid_argument("sweep needs at least one repetition");
  const NetworkGraph g = build_topology(base.topology);
  const PathTable paths = k_shortest_paths(g, base.d);
  const PlacerFn placer = base.placer == "exact" ? exact_placer() : greedy_placer();

  struct Task {
    int cell;  // index into rows
    int rep;
    const Trace* trace;
  };
  // One trace per (k_obj, rep): repetition r reuses seed base+r across every
  // cell, so the same arrival pattern meets every lookahead depth.
  std::vector<Trace> traces;
  std::vector<Task> tasks;
  std::vector<SweepRow> rows;
  for (int k : k_obj_values)
    for (int m : lookahead_values) {
      SweepRow row;
      row.topology = topology_label(base.topology);
      row.n_servers = static_cast<int>(g.servers.size());
      row.k_obj = k;
      row.lookahead = m;
      row.reps = reps;
      rows.push_back(row);
    }
  for (int r = 0; r < reps; ++r)
    for (std::size_t ki = 0; ki < k_obj_values.size(); ++ki) {
      TraceConfig tc = base.trace;
      tc.k_obj = k_obj_values[ki];
      tc.seed = base.trace.seed + static_cast<std::uint64_t>(r);
      traces.push_back(generate_trace(tc, g.core_switches));
    }
  for (int r = 0; r < reps; ++r)
    for (std::size_t ki = 0; ki < k_obj_values.size(); ++ki)
      for (std::size_t mi = 0; mi < lookahead_values.size(); ++mi)
        tasks.push_back({static_cast<int>(ki * lookahead_values.size() + mi), r,
                         &traces[r * k_obj_values.size() + ki]});

  std::vector<double> mean_of(tasks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& tk = tasks[i];
      RunSummary s = run_on(g, paths, *tk.trace, rows[tk.cell].lookahead, placer, base.weights,
                            base.off_after_idle_slots);
      mean_of[i] = s.mean_u;
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  std::vector<std::vector<double>> cell_means(rows.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) cell_means[tasks[i].cell].push_back(mean_of[i]);
  for (std::size_t c = 0; c < rows.size(); ++c) {
    double m = 0.0;
    for (double v : cell_means[c]) m += v;
    m /= static_cast<double>(cell_means[c].size());
    double var = 0.0;
    for (double v : cell_means[c]) var += (v - m) * (v - m);
    rows[c].mean_u = m;
    rows[c].std_u = cell_means[c].size() > 1
                        ? std::sqrt(var / static_cast<double>(cell_means[c].size() - 1))
                        : 0.0;
  }
  return rows;
}

void sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "topology,n_servers,k_obj,M,mean_u,std_u,reps\n";
  os.precision(17);
  for (const SweepRow& r : rows)
    os << r.topology << ',' << r.n_servers << ',' << r.k_obj << ',' << r.lookahead << ','
       << r.mean_u << ',' << r.std_u << ',' << r.reps << '\n';
}

}  // namespace sfcsim
