#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfcsim/services.hpp"
#include "sfcsim/topology.hpp"

namespace sfcsim {

struct Weights {
  double server = 1.0 / 3.0;
  double link = 1.0 / 3.0;
  double bandwidth = 1.0 / 3.0;
  // Nonnegative components summing to one (small tolerance for thirds).
  void validate() const;
};

struct UtilizationReport {
  double servers = 0.0;    // fraction of servers hosting at least one VNF
  double links = 0.0;      // fraction of directed links carrying traffic
  double bandwidth = 0.0;  // mean per-link bandwidth fraction in use
  double total = 0.0;      // weighted sum of the three
};

// Route chosen for one service edge: either both endpoints share a node, or
// a concrete link sequence from the source host to the destination host.
struct EdgeRoute {
  bool colocated = false;
  std::vector<LinkId> links;
  bool operator==(const EdgeRoute&) const = default;
};

struct Placement {
  int service_id = -1;
  std::vector<NodeId> vnf_to_node;    // index parallel to the service's vnfs
  std::vector<EdgeRoute> edge_routes; // index parallel to the service's edges
  bool operator==(const Placement&) const = default;
};

// Structurally broken placements (wrong shapes, routes that do not connect
// the chosen hosts) are reported via this exception; resource infeasibility
// is a data result, never an exception.
struct MalformedPlacement : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Violation {
  enum class Kind {
    ComputeOnNonServer,  // a demand-carrying VNF mapped off the server pool
    EndpointPin,         // ingress/egress not on the service's core switches
    ServerCapacity,
    LinkCapacity,
    DelayBudget,
  };
  Kind kind;
  NodeId node = -1;
  LinkId link = -1;
  std::string detail;
};

enum class PowerState { Active, Idle, Off };

// Extra hypothetical load laid over a state when scoring a candidate
// placement without mutating anything. Entries are (id, amount), sorted by
// id, unique. A bw entry marks the link as carrying traffic even at zero.
struct LoadDelta {
  std::vector<std::pair<NodeId, int>> hosted;
  std::vector<std::pair<LinkId, std::int64_t>> bw;
};

// Mutable allocation ledger over an immutable graph: per-server residual
// resources, per-link residual bandwidth, who hosts what, and power states.
// Copyable; copies share the graph, which must outlive them.
class NetworkState {
 public:
  explicit NetworkState(const NetworkGraph& g);

  const NetworkGraph& graph() const { return *graph_; }

  // Resource feasibility of a placement against current residuals: aggregated
  // per-server demand, per-link bandwidth including reuse of a link by several
  // edges of this same placement, endpoint pinning, and the delay budget.
  // Empty result means feasible. Throws MalformedPlacement on broken shapes.
  std::vector<Violation> check_feasible(const ServiceRequest& s, const Placement& p) const;

  // Commits a feasible placement; returns false (optionally with the
  // violations) and leaves the state untouched otherwise.
  bool apply(const ServiceRequest& s, const Placement& p, std::vector<Violation>* why = nullptr);

  // Returns every resource taken by apply; throws on unknown id.
  void release(int service_id);

  UtilizationReport utilization(const Weights& w) const;
  // Same measurement with hypothetical extra load. With an empty delta this
  // is exactly utilization(); the sums run in the same order either way, so
  // scoring a candidate equals measuring after apply, bit for bit.
  UtilizationReport utilization_with(const Weights& w, const LoadDelta& delta) const;

  // Power bookkeeping: a server turns Active when it first hosts a VNF, Idle
  // when its last VNF leaves, and Off after sitting idle for the given number
  // of slot boundaries. Off only feeds the wake counter, never utilization.
  void advance_power(int off_after_idle_slots);
  int active_server_count() const;
  std::int64_t wake_count() const { return wakes_; }

  const ResourceVector& residual(NodeId n) const { return residual_[n]; }
  std::int64_t residual_bw(LinkId l) const { return residual_bw_[l]; }
  int hosted_vnf_count(NodeId n) const { return hosted_[n]; }
  int link_flow_count(LinkId l) const { return flows_[l]; }
  PowerState power(NodeId n) const { return power_[n]; }

  bool has_service(int id) const { return applied_.count(id) != 0; }
  std::vector<int> applied_service_ids() const;
  const Placement& placement_of(int id) const;
  // Servers currently hosting at least one VNF, ascending.
  std::vector<NodeId> busy_servers() const;

  bool operator==(const NetworkState& o) const;

 private:
  struct AppliedService {
    Placement placement;
    std::vector<ResourceVector> vnf_demands;
    std::vector<std::int64_t> edge_bw;
    bool operator==(const AppliedService&) const = default;
  };

  void add_load(const ServiceRequest& s, const Placement& p, int sign);

  const NetworkGraph* graph_;
  std::vector<ResourceVector> residual_;
  std::vector<std::int64_t> residual_bw_;
  std::vector<int> hosted_;  // VNF count per node
  std::vector<int> flows_;   // routed service-edge count per link
  std::vector<PowerState> power_;
  std::vector<int> idle_slots_;
  std::map<int, AppliedService> applied_;
  std::int64_t wakes_ = 0;
};

// Chain latency under a placement: every VNF's compute time plus the delay
// of every routed edge; co-located edges contribute nothing.
double delay_of(const NetworkGraph& g, const ServiceRequest& s, const Placement& p);

std::string placement_to_json(const Placement& p);
Placement placement_from_json(const std::string& text);

}  // namespace sfcsim
