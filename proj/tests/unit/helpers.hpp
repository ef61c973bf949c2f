#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>

#include "sfcsim/netstate.hpp"
#include "sfcsim/services.hpp"

namespace sfcsim::test {

// Resource books only: residuals, bandwidth, occupancy, applied services.
// Power state and the wake counter are deliberately excluded — release parks
// a server at Idle rather than rewinding it to Off, so full state equality is
// too strong for apply/release round trips.
inline bool same_ledgers(const NetworkGraph& g, const NetworkState& a, const NetworkState& b) {
  if (a.applied_service_ids() != b.applied_service_ids()) return false;
  for (NodeId n = 0; n < g.node_count(); ++n)
    if (!(a.residual(n) == b.residual(n)) || a.hosted_vnf_count(n) != b.hosted_vnf_count(n))
      return false;
  for (LinkId l = 0; l < g.link_count(); ++l)
    if (a.residual_bw(l) != b.residual_bw(l) || a.link_flow_count(l) != b.link_flow_count(l))
      return false;
  return true;
}

// One default-chain service between two attachment cores.
inline ServiceRequest make_service(int id, NodeId ingress, NodeId egress, int start = 0,
                                   int end = 0) {
  const ChainTemplate ct = default_chain();
  ServiceRequest s;
  s.id = id;
  s.vnfs = ct.vnfs;
  s.edges = ct.edges;
  s.max_delay_ms = ct.max_delay_ms;
  s.start_slot = start;
  s.end_slot = end;
  s.ingress_node = ingress;
  s.egress_node = egress;
  return s;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sfcsim::test
