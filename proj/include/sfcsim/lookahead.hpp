#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sfcsim/greedy.hpp"
#include "sfcsim/netstate.hpp"

namespace sfcsim {

// How one planning slot partitions the trace, given which services have
// already been committed to the real network.
struct ServiceSets {
  int slot = 0;
  std::vector<int> new_ids;       // start exactly at this slot
  std::vector<int> active_ids;    // window covers this slot
  std::vector<int> used_ids;      // active and already committed
  std::vector<int> ended_ids;     // committed, window closed before this slot
  std::vector<int> remain_ids;    // carried tentative placements, pinned here
  std::vector<int> allocate_ids;  // what the placer is asked to place here
};

/// Pure set arithmetic on the trace: fills new/active/used/ended (all
// ascending). remain/allocate belong to the planning loop and stay empty.
ServiceSets classify_services(const Trace& trace, int slot, const std::set<int>& committed);

struct PlanResult {
  int commit_slot = 0;
  // Final outcome per service due at the commit slot (arrivals plus retries),
  // ascending by id. With commit=false nothing is written back and this
  // stays empty.
  std::vector<std::pair<int, PlacementOutcome>> committed;
  int placed = 0;
  int unplaced = 0;
  // Diagnostics from the planning pass, farthest slot first.
  std::vector<ServiceSets> planned_sets;
  std::vector<std::pair<int, UtilizationReport>> planned_util;
  std::map<int, std::vector<Placement>> tentative;  // slot -> placements decided there
};

// Plans the upcoming slots and commits the batch due at current_slot+1.
//
// The decision is made during current_slot, so `state` still holds every
// service whose window closes at current_slot: their hardware frees up only
// at the boundary. That is the whole game. Without prediction
// (lookahead_slots = 0) the placer runs directly against that stale
// occupancy — servers that are full today but empty tomorrow turn the batch
// away. With lookahead the pass walks slot current+m for m = lookahead_slots
// down to 1, each iteration on a fresh clone of the real state: services
// whose window closes before the planned slot are released in the clone,
// tentative placements carried from farther slots are re-applied verbatim
// (falling back to replanning if they no longer fit), and the placer runs on
// whatever is active, uncommitted, and not yet carried. Placements decided
// at a service's own start slot drop out of the carried set afterwards, so
// closer slots only see load that actually overlaps them.
//
// Plans for slots past current+1 are advisory and are discarded; only the
// commit slot's batch is written to the real state. Committing a lookahead
// plan first releases the services the plan assumed gone (window closed by
// current_slot), then re-validates each placement there (with a fresh placer
// attempt as fallback) so divergence between plan and reality can never
// commit an infeasible placement. The lookahead_slots = 0 path touches no
// expired service; the caller sweeps those out after the boundary.
PlanResult lookahead_allocate(NetworkState& state, const Trace& trace, int current_slot,
                              int lookahead_slots, const PlacerFn& placer, const PathTable& paths,
                              const Weights& w, bool commit = true);

std::string plan_to_json(const PlanResult& r);

}  // namespace sfcsim
