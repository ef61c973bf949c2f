#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sfcsim/greedy.hpp"
#include "sfcsim/netstate.hpp"

namespace sfcsim {

struct ExactConfig {
  std::uint64_t max_nodes = 50'000'000;  // decision-tree nodes before giving up
  double time_budget_s = 60.0;
  bool prune = true;  // objective bounding; disabling never changes the optimum
};

struct ExactResult {
  bool optimal = false;    // full exploration finished with a best solution
  bool infeasible = false; // full exploration finished with no feasible solution
  std::vector<std::pair<int, Placement>> placements;  // batch order
  double u_total = std::numeric_limits<double>::infinity();
  std::uint64_t nodes_explored = 0;
};

// Joint optimum for a batch: depth-first branch and bound over every VNF's
// server assignment (ingress/egress stay pinned) and every inter-node edge's
// ranked path choice. The bound is the utilization already forced by the
// partial assignment — usage only ever grows, so a partial score at or above
// the incumbent closes the subtree. The incumbent starts from greedy_place
// whenever greedy finds a full solution. Branch order is fixed (batch order,
// dependency order, servers ascending, paths by rank), so node counts
// reproduce. Exceeding the budget returns the best so far with
// optimal=false; proving nothing fits sets infeasible.
ExactResult exact_place(const std::vector<const ServiceRequest*>& batch,
                        const NetworkState& state, const PathTable& paths, const Weights& w,
                        const ExactConfig& cfg = {});

struct SearchSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Independent oracle: plain nested enumeration of every server assignment and
// path combination, no objective bounding at all, scoring each complete
// feasible solution from scratch. Refuses instances whose combination count
// estimate exceeds leaf_cap. Same result contract as exact_place.
ExactResult brute_force_place(const std::vector<const ServiceRequest*>& batch,
                              const NetworkState& state, const PathTable& paths, const Weights& w,
                              std::uint64_t leaf_cap = 20'000'000);

// Batch placer backed by exact_place; when the joint solve proves nothing or
// runs out of budget without a full solution, the batch falls back to
// greedy_place so the simulation can still make partial progress.
PlacerFn exact_placer(ExactConfig cfg = {});

}  // namespace sfcsim
