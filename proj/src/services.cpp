#include "sfcsim/services.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace sfcsim {

const char* to_string(VnfKind k) {
  switch (k) {
    case VnfKind::Ingress: return "ingress";
    case VnfKind::NetworkReceiving: return "network_receiving";
    case VnfKind::Capture: return "capture";
    case VnfKind::Tracking: return "tracking";
    case VnfKind::Synchronization: return "synchronization";
    case VnfKind::Decoding: return "decoding";
    case VnfKind::Egress: return "egress";
  }
  return "?";
}

VnfKind vnf_kind_from_string(const std::string& s) {
  for (VnfKind k : {VnfKind::Ingress, VnfKind::NetworkReceiving, VnfKind::Capture,
                    VnfKind::Tracking, VnfKind::Synchronization, VnfKind::Decoding,
                    VnfKind::Egress})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown vnf kind: " + s);
}

ChainTemplate default_chain() {
  constexpr std::int64_t kEdgeBps = 100'000'000;
  ChainTemplate c;
  c.vnfs = {
      {VnfKind::Ingress, {0, 0, 0}, 0.0},
      {VnfKind::NetworkReceiving, {6, 9, 0}, 20.0},
      {VnfKind::Capture, {7, 11, 1}, 1500.0},
      {VnfKind::Tracking, {9, 12, 1}, 100.0},
      {VnfKind::Synchronization, {14, 12, 1}, 10.0},
      {VnfKind::Decoding, {3, 5, 1}, 25.0},
      {VnfKind::Egress, {0, 0, 0}, 0.0},
  };
  for (int i = 0; i + 1 < static_cast<int>(c.vnfs.size()); ++i)
    c.edges.push_back({i, i + 1, kEdgeBps});
  c.max_delay_ms = 1800.0;
  return c;
}

namespace {

// Bounded draws built directly on the raw engine output so results do not
// depend on the standard library's distribution implementations.
std::uint64_t draw_u64(std::mt19937_64& rng, std::uint64_t n) {  // uniform in [0, n)
  return rng() % n;
}

double draw_real(std::mt19937_64& rng, double lo, double hi) {  // uniform in [lo, hi)
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

}  // namespace

Trace generate_trace(const TraceConfig& cfg, const std::vector<NodeId>& core_switches) {
  if (cfg.k_obj < 1) throw std::invalid_argument("need at least one tracked object");
  if (core_switches.size() < 2)
    throw std::invalid_argument("need at least two core switches for ingress/egress");
  if (cfg.period_min_lo <= 0 || cfg.period_min_hi < cfg.period_min_lo)
    throw std::invalid_argument("bad period range");
  if (cfg.duration_slots_lo < 1 || cfg.duration_slots_hi < cfg.duration_slots_lo)
    throw std::invalid_argument("bad duration range");
  if (cfg.horizon_hours <= 0) throw std::invalid_argument("bad horizon");

  Trace t;
  t.slot_minutes = 10;
  t.horizon_slots = static_cast<int>(std::lround(cfg.horizon_hours * 60.0 / t.slot_minutes));
  t.seed = cfg.seed;
  const double horizon_min = t.horizon_slots * static_cast<double>(t.slot_minutes);
  const ChainTemplate chain = default_chain();
  std::mt19937_64 rng(cfg.seed);
  for (int obj = 0; obj < cfg.k_obj; ++obj) {
    const double period = draw_real(rng, cfg.period_min_lo, cfg.period_min_hi);
    const double phase = draw_real(rng, 0.0, period);
    int prev_end = -1;
    for (double at = phase; at < horizon_min; at += period) {
      int start = static_cast<int>(at / t.slot_minutes);
      const int dur = cfg.duration_slots_lo +
                      static_cast<int>(draw_u64(
                          rng, static_cast<std::uint64_t>(cfg.duration_slots_hi -
                                                          cfg.duration_slots_lo + 1)));
      if (start <= prev_end) start = prev_end + 1;  // passes of one object never overlap
      const int end = std::min(start + dur - 1, t.horizon_slots - 1);
      const std::size_t in_idx = draw_u64(rng, core_switches.size());
      std::size_t out_idx = draw_u64(rng, core_switches.size() - 1);
      if (out_idx >= in_idx) ++out_idx;  // skip the ingress pick; endpoints stay distinct
      const NodeId in = core_switches[in_idx];
      const NodeId out = core_switches[out_idx];
      if (start >= t.horizon_slots || start > end) continue;
      ServiceRequest s;
      s.vnfs = chain.vnfs;
      s.edges = chain.edges;
      s.max_delay_ms = chain.max_delay_ms;
      s.start_slot = start;
      s.end_slot = end;
      s.ingress_node = in;
      s.egress_node = out;
      t.services.push_back(std::move(s));
      prev_end = end;
    }
  }
  std::stable_sort(t.services.begin(), t.services.end(),
                   [](const ServiceRequest& a, const ServiceRequest& b) {
                     return a.start_slot < b.start_slot;
                   });
  // Ids follow arrival order, so id-sorted batches are chronological and a
  // low id always means an earlier (or equally early) start.
  for (std::size_t i = 0; i < t.services.size(); ++i) t.services[i].id = static_cast<int>(i);
  return t;
}

std::vector<int> topological_order(const ServiceRequest& s) {
  const int n = static_cast<int>(s.vnfs.size());
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> succ(n);
  for (const ServiceEdge& e : s.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n || e.from == e.to)
      throw std::invalid_argument("edge endpoint out of range");
    succ[e.from].push_back(e.to);
    ++indegree[e.to];
  }
  std::set<int> ready;
  for (int i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.insert(i);
  std::vector<int> order;
  while (!ready.empty()) {
    const int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int w : succ[v])
      if (--indegree[w] == 0) ready.insert(w);
  }
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("service edges contain a cycle");
  return order;
}

void validate_service(const ServiceRequest& s, const NetworkGraph* g) {
  if (s.vnfs.size() < 2) throw std::invalid_argument("chain needs at least ingress and egress");
  if (s.vnfs.front().kind != VnfKind::Ingress || s.vnfs.back().kind != VnfKind::Egress)
    throw std::invalid_argument("chain must start with ingress and end with egress");
  for (std::size_t i = 1; i + 1 < s.vnfs.size(); ++i)
    if (is_endpoint(s.vnfs[i].kind))
      throw std::invalid_argument("interior vnf cannot be ingress or egress");
  for (const ServiceEdge& e : s.edges)
    if (e.bandwidth_bps < 0) throw std::invalid_argument("negative edge bandwidth");
  topological_order(s);  // throws on bad endpoints or cycles
  if (s.start_slot < 0 || s.end_slot < s.start_slot)
    throw std::invalid_argument("bad service window");
  if (s.ingress_node == s.egress_node)
    throw std::invalid_argument("ingress and egress must differ");
  if (g) {
    for (NodeId v : {s.ingress_node, s.egress_node}) {
      if (v < 0 || v >= g->node_count() || g->kinds[v] != NodeKind::CoreSwitch)
        throw std::invalid_argument("attachment node is not a core switch");
    }
  }
}

static nlohmann::json service_json(const ServiceRequest& s) {
  nlohmann::json vnfs = nlohmann::json::array();
  for (const VnfSpec& v : s.vnfs)
    vnfs.push_back({{"kind", to_string(v.kind)},
                    {"vcpu", v.demand.vcpu},
                    {"mem_gb", v.demand.mem_gb},
                    {"gpu", v.demand.gpu},
                    {"compute_ms", v.compute_ms}});
  nlohmann::json edges = nlohmann::json::array();
  for (const ServiceEdge& e : s.edges)
    edges.push_back({{"from", e.from}, {"to", e.to}, {"bw_bps", e.bandwidth_bps}});
  return {{"id", s.id},
          {"start_slot", s.start_slot},
          {"end_slot", s.end_slot},
          {"ingress", s.ingress_node},
          {"egress", s.egress_node},
          {"vnfs", vnfs},
          {"edges", edges},
          {"max_delay_ms", s.max_delay_ms}};
}

static ServiceRequest service_from_obj(const nlohmann::json& j) {
  ServiceRequest s;
  s.id = j.at("id").get<int>();
  s.start_slot = j.at("start_slot").get<int>();
  s.end_slot = j.at("end_slot").get<int>();
  s.ingress_node = j.at("ingress").get<NodeId>();
  s.egress_node = j.at("egress").get<NodeId>();
  s.max_delay_ms = j.at("max_delay_ms").get<double>();
  for (const auto& v : j.at("vnfs")) {
    VnfSpec spec;
    spec.kind = vnf_kind_from_string(v.at("kind").get<std::string>());
    spec.demand = {v.at("vcpu").get<std::int64_t>(), v.at("mem_gb").get<std::int64_t>(),
                   v.at("gpu").get<std::int64_t>()};
    spec.compute_ms = v.at("compute_ms").get<double>();
    s.vnfs.push_back(spec);
  }
  for (const auto& e : j.at("edges"))
    s.edges.push_back(
        {e.at("from").get<int>(), e.at("to").get<int>(), e.at("bw_bps").get<std::int64_t>()});
  return s;
}

std::string trace_to_json(const Trace& t) {
  nlohmann::json j;
  j["horizon_slots"] = t.horizon_slots;
  j["slot_minutes"] = t.slot_minutes;
  j["seed"] = t.seed;
  j["services"] = nlohmann::json::array();
  for (const ServiceRequest& s : t.services) j["services"].push_back(service_json(s));
  return j.dump();
}

Trace trace_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Trace t;
  t.horizon_slots = j.at("horizon_slots").get<int>();
  t.slot_minutes = j.at("slot_minutes").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& s : j.at("services")) t.services.push_back(service_from_obj(s));
  return t;
}

std::string service_to_json(const ServiceRequest& s) { return service_json(s).dump(); }

ServiceRequest service_from_json(const std::string& text) {
  return service_from_obj(nlohmann::json::parse(text));
}

}  // namespace sfcsim
