#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfcsim/topology.hpp"

namespace sfcsim {

enum class VnfKind {
  Ingress,
  NetworkReceiving,
  Capture,
  Tracking,
  Synchronization,
  Decoding,
  Egress,
};

const char* to_string(VnfKind k);
VnfKind vnf_kind_from_string(const std::string& s);
inline bool is_endpoint(VnfKind k) { return k == VnfKind::Ingress || k == VnfKind::Egress; }

struct VnfSpec {
  VnfKind kind = VnfKind::Ingress;
  ResourceVector demand;     // zero for Ingress/Egress
  double compute_ms = 0.0;   // processing time contribution to chain delay
  bool operator==(const VnfSpec&) const = default;
};

// Directed traffic dependency between two VNFs of the same chain,
// by index into the chain's vnf list.
struct ServiceEdge {
  int from = -1;
  int to = -1;
  std::int64_t bandwidth_bps = 0;
  bool operator==(const ServiceEdge&) const = default;
};

// Reusable chain shape (VNFs + edges + delay budget) without a time window.
struct ChainTemplate {
  std::vector<VnfSpec> vnfs;
  std::vector<ServiceEdge> edges;
  double max_delay_ms = 0.0;
};

// The downlink processing chain every generated service uses:
// Ingress -> NetworkReceiving -> Capture -> Tracking -> Synchronization
// -> Decoding -> Egress, 100 Mbps on every edge, 1800 ms budget.
ChainTemplate default_chain();

struct ServiceRequest {
  int id = -1;
  std::vector<VnfSpec> vnfs;
  std::vector<ServiceEdge> edges;  // must form a DAG over vnf indexes
  double max_delay_ms = 0.0;
  int start_slot = 0;
  int end_slot = 0;         // inclusive; resources release after this slot
  NodeId ingress_node = -1; // core switch carrying traffic in
  NodeId egress_node = -1;  // core switch carrying traffic out
  bool operator==(const ServiceRequest&) const = default;
};

struct Trace {
  int horizon_slots = 0;
  int slot_minutes = 10;
  std::uint64_t seed = 0;
  std::vector<ServiceRequest> services;  // sorted by start_slot, stable
};

struct TraceConfig {
  int k_obj = 30;               // tracked objects; each pass spawns one service
  double horizon_hours = 24.0;
  double period_min_lo = 90.0;  // orbital period range, minutes
  double period_min_hi = 110.0;
  int duration_slots_lo = 1;    // per-pass service duration range, slots
  int duration_slots_hi = 3;
  std::uint64_t seed = 0;
};

// Deterministic synthetic visibility schedule: every object gets a period and
// phase, every pass inside the horizon becomes one ServiceRequest running the
// default chain between two distinct core switches. Same config, same bytes.
Trace generate_trace(const TraceConfig& cfg, const std::vector<NodeId>& core_switches);

// Kahn's ordering with smallest-index-first tie break; throws on cycles.
std::vector<int> topological_order(const ServiceRequest& s);

// Structure checks (edge indexes in range, DAG, window sane, single
// ingress/egress at the ends). With a graph, also checks the attachment
// nodes are core switches. Throws std::invalid_argument on failure.
void validate_service(const ServiceRequest& s, const NetworkGraph* g = nullptr);

std::string trace_to_json(const Trace& t);
Trace trace_from_json(const std::string& text);
std::string service_to_json(const ServiceRequest& s);
ServiceRequest service_from_json(const std::string& text);

}  // namespace sfcsim
