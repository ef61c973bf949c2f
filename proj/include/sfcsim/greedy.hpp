#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "sfcsim/netstate.hpp"

namespace sfcsim {

struct PlacementOutcome {
  bool success = false;
  NodeId server = -1;  // representative host of the compute VNFs
  std::optional<Placement> placement;
  double objective = std::numeric_limits<double>::infinity();  // u_total after a
                                                               // hypothetical apply
};

// Single-server candidate scan: for every candidate, tentatively put every
// compute VNF on it (ingress/egress stay pinned to the service's core
// switches), route each inter-node edge over the first ranked path with
// enough residual bandwidth — counting bandwidth already claimed by earlier
// edges of this same tentative placement — and keep the candidate whose
// hypothetical total utilization is smallest. Ties go to the lowest id.
PlacementOutcome search(const ServiceRequest& s, const std::vector<NodeId>& candidates,
                        const NetworkState& state, const PathTable& paths, const Weights& w);

// Batch placement: services in batch order; each tries the busy servers
// first and falls back to the remaining (idle or off) ones, so chains pack
// onto machines that are already running. Successes are applied immediately,
// which is how a freshly chosen server becomes "busy" for the rest of the
// batch.
std::vector<std::pair<int, PlacementOutcome>> greedy_place(
    const std::vector<const ServiceRequest*>& batch, NetworkState& state, const PathTable& paths,
    const Weights& w);

using PlacerFn = std::function<std::vector<std::pair<int, PlacementOutcome>>(
    const std::vector<const ServiceRequest*>&, NetworkState&, const PathTable&, const Weights&)>;

PlacerFn greedy_placer();

}  // namespace sfcsim
