#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sfcsim/lookahead.hpp"

namespace sfcsim {

struct TopologySpec {
  std::string kind = "fat_tree";  // fat_tree | bcube | vl2
  int a = 4;                      // fat_tree: k; bcube: n; vl2: n
  int b = 0;                      // bcube: levels; vl2: k
};

NetworkGraph build_topology(const TopologySpec& spec);
std::string topology_label(const TopologySpec& spec);

struct ExperimentConfig {
  TopologySpec topology;
  TraceConfig trace;
  int lookahead = 0;              // planning slots beyond the commit slot
  int d = 8;                      // ranked paths kept per site pair
  Weights weights;
  int off_after_idle_slots = 1;   // idle slots before a server powers off
  std::string placer = "greedy";  // greedy | exact
};

struct SlotRecord {
  int slot = 0;
  double u_servers = 0.0;
  double u_links = 0.0;
  double u_bandwidth = 0.0;
  double u_total = 0.0;
  int placed = 0;     // commits that succeeded this slot
  int released = 0;   // services whose window ended before this slot
  int unplaced = 0;   // commit attempts that failed this slot (retried later)
  int active_servers = 0;
};

struct RunSummary {
  std::vector<SlotRecord> slots;
  double mean_u = 0.0;
  double peak_u = 0.0;
  int placed_total = 0;          // distinct services ever placed
  int expired_unplaced = 0;      // distinct services whose window passed unserved
  std::int64_t wakes = 0;
};

// One slot step: drop services whose window ended, commit this slot's batch
// through the planner, advance power bookkeeping, measure. Utilization is
// recorded after the slot's commits.
RunSummary run_on(const NetworkGraph& g, const PathTable& paths, const Trace& trace,
                  int lookahead_slots, const PlacerFn& placer, const Weights& w,
                  int off_after_idle_slots);

// Convenience wrapper: builds the topology, the path table and the trace from
// the config, then runs.
RunSummary run(const ExperimentConfig& cfg);

// slot,u_svr,u_link,u_bw,u_total,placed,released,unplaced,active_servers
void run_csv(std::ostream& os, const RunSummary& summary);

struct SweepRow {
  std::string topology;
  int n_servers = 0;
  int k_obj = 0;
  int lookahead = 0;
  double mean_u = 0.0;   // across repetitions, of the per-run mean utilization
  double std_u = 0.0;    // sample standard deviation across repetitions
  int reps = 0;
};

// Full cross of k_obj values and lookahead depths, `reps` repetitions each.
// Repetition r uses seed base seed + r for every cell, so cells are paired
// and lookahead deltas are comparable rep by rep. Runs spread over `jobs`
// threads; results are ordered (k_obj outer, lookahead inner) regardless.
std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::vector<int>& k_obj_values,
                            const std::vector<int>& lookahead_values, int reps, int jobs);

// topology,n_servers,k_obj,M,mean_u,std_u,reps
void sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace sfcsim
