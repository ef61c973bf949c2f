#include <set>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "sfcsim/lookahead.hpp"
#include "sfcsim/topology.hpp"

using namespace sfcsim;
using sfcsim::test::make_service;

namespace {

Trace toy_trace(std::vector<ServiceRequest> services, int horizon) {
  Trace t;
  t.horizon_slots = horizon;
  t.services = std::move(services);
  return t;
}

std::vector<const ServiceRequest*> ptrs(const std::vector<ServiceRequest>& v, int lo, int hi) {
  std::vector<const ServiceRequest*> b;
  for (int i = lo; i < hi; ++i) b.push_back(&v[i]);
  return b;
}

}  // namespace

TEST_CASE("classify_services set arithmetic") {
  std::vector<ServiceRequest> svcs{
      make_service(0, 6, 7, 0, 2),
      make_service(1, 7, 6, 1, 1),
      make_service(2, 6, 7, 2, 3),
      make_service(3, 7, 6, 3, 3),
  };
  const Trace t = toy_trace(svcs, 4);
  const ServiceSets at2 = classify_services(t, 2, {0, 1});
  CHECK(at2.new_ids == std::vector<int>{2});
  CHECK(at2.active_ids == std::vector<int>{0, 2});
  CHECK(at2.used_ids == std::vector<int>{0});
  CHECK(at2.ended_ids == std::vector<int>{1});

  const ServiceSets at0 = classify_services(t, 0, {});
  CHECK(at0.new_ids == std::vector<int>{0});
  CHECK(at0.active_ids == std::vector<int>{0});
  CHECK(at0.used_ids.empty());
  CHECK(at0.ended_ids.empty());
}

TEST_CASE("a lookahead pass reuses hardware the myopic pass believes is taken") {
  // Fill all four bcube servers with two chains each. Chains 0-3 (servers 0
  // and 1) end at slot 0; chains 4-7 run on. Two arrivals due at slot 1 fit
  // only if the allocator understands servers 0 and 1 are about to clear.
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  std::vector<ServiceRequest> svcs;
  for (int i = 0; i < 8; ++i) svcs.push_back(make_service(i, 6 + i % 2, 6 + (i + 1) % 2, 0, i < 4 ? 0 : 2));
  svcs.push_back(make_service(8, 6, 7, 1, 1));
  svcs.push_back(make_service(9, 7, 6, 1, 1));
  const Trace trace = toy_trace(svcs, 3);

  NetworkState seeded(g);
  for (const auto& [id, out] : greedy_place(ptrs(svcs, 0, 8), seeded, paths, w))
    REQUIRE(out.success);

  SUBCASE("myopic: both arrivals bounce off the stale occupancy") {
    NetworkState state = seeded;
    const PlanResult r = lookahead_allocate(state, trace, 0, 0, greedy_placer(), paths, w);
    CHECK(r.commit_slot == 1);
    CHECK(r.placed == 0);
    CHECK(r.unplaced == 2);
    CHECK(state.has_service(0));  // expired services are the caller's sweep
  }

  SUBCASE("one slot of foresight places both") {
    NetworkState state = seeded;
    const PlanResult r = lookahead_allocate(state, trace, 0, 1, greedy_placer(), paths, w);
    CHECK(r.placed == 2);
    CHECK(r.unplaced == 0);
    REQUIRE(r.committed.size() == 2);
    CHECK(r.committed[0].second.server == 0);
    CHECK(r.committed[1].second.server == 0);
    // Committing banked on the boundary: the cleared chains are gone...
    for (int id : {0, 1, 2, 3}) CHECK_FALSE(state.has_service(id));
    // ...the survivors and the new arrivals are in place.
    for (int id : {4, 5, 6, 7, 8, 9}) CHECK(state.has_service(id));
  }
}

TEST_CASE("with nothing ending and nothing new, M=1 commits exactly like M=0") {
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  std::vector<ServiceRequest> svcs;
  for (int i = 0; i < 4; ++i) svcs.push_back(make_service(i, 6 + i % 2, 6 + (i + 1) % 2, 1, 2));
  const Trace trace = toy_trace(svcs, 3);

  NetworkState a(g), b(g);
  const PlanResult r0 = lookahead_allocate(a, trace, 0, 0, greedy_placer(), paths, w);
  const PlanResult r1 = lookahead_allocate(b, trace, 0, 1, greedy_placer(), paths, w);
  REQUIRE(r0.committed.size() == r1.committed.size());
  for (std::size_t i = 0; i < r0.committed.size(); ++i) {
    CHECK(r0.committed[i].first == r1.committed[i].first);
    CHECK(r0.committed[i].second.success == r1.committed[i].second.success);
    CHECK(*r0.committed[i].second.placement == *r1.committed[i].second.placement);
  }
  CHECK(a == b);
}

TEST_CASE("M=0 commits byte-identically to running the placer by hand") {
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  TraceConfig cfg;
  cfg.k_obj = 6;
  cfg.seed = 11;
  const Trace trace = generate_trace(cfg, g.core_switches);

  NetworkState via_lookahead(g), via_greedy(g);
  std::map<int, const ServiceRequest*> by_id;
  for (const ServiceRequest& s : trace.services) by_id.emplace(s.id, &s);

  for (int t = 0; t < trace.horizon_slots; ++t) {
    const PlanResult r = lookahead_allocate(via_lookahead, trace, t - 1, 0, greedy_placer(), paths, w);

    const std::vector<int> applied = via_greedy.applied_service_ids();
    const ServiceSets sets =
        classify_services(trace, t, std::set<int>(applied.begin(), applied.end()));
    std::vector<const ServiceRequest*> batch;
    for (int id : sets.active_ids)
      if (!via_greedy.has_service(id)) batch.push_back(by_id.at(id));
    const auto outs = greedy_place(batch, via_greedy, paths, w);

    REQUIRE(r.committed.size() == outs.size());
    for (std::size_t i = 0; i < outs.size(); ++i) {
      CHECK(r.committed[i].first == outs[i].first);
      CHECK(r.committed[i].second.success == outs[i].second.success);
      if (outs[i].second.success)
        CHECK(*r.committed[i].second.placement == *outs[i].second.placement);
    }
    CHECK(via_lookahead == via_greedy);

    for (NetworkState* st : {&via_lookahead, &via_greedy})
      for (int id : st->applied_service_ids())
        if (by_id.at(id)->end_slot <= t - 1) st->release(id);
    via_lookahead.advance_power(1);
    via_greedy.advance_power(1);
  }
}

TEST_CASE("dry runs never touch the real state") {
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  std::vector<ServiceRequest> svcs;
  for (int i = 0; i < 4; ++i) svcs.push_back(make_service(i, 6 + i % 2, 6 + (i + 1) % 2, 1, 2));
  const Trace trace = toy_trace(svcs, 4);

  for (int m : {0, 1, 2}) {
    NetworkState state(g);
    const NetworkState before = state;
    const PlanResult r = lookahead_allocate(state, trace, 0, m, greedy_placer(), paths, w, false);
    CHECK(state == before);
    CHECK(r.committed.empty());
    CHECK(r.placed == 0);
  }
}

TEST_CASE("planning walks the window farthest slot first") {
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  std::vector<ServiceRequest> svcs;
  for (int i = 0; i < 3; ++i) svcs.push_back(make_service(i, 6, 7, i + 1, i + 1));
  const Trace trace = toy_trace(svcs, 5);

  NetworkState state(g);
  const PlanResult r = lookahead_allocate(state, trace, 0, 3, greedy_placer(), paths, w, false);
  REQUIRE(r.planned_sets.size() == 3);
  CHECK(r.planned_sets[0].slot == 3);
  CHECK(r.planned_sets[1].slot == 2);
  CHECK(r.planned_sets[2].slot == 1);
  CHECK(r.planned_sets[2].allocate_ids == std::vector<int>{0});
  CHECK(r.planned_util.size() == 3);
}

TEST_CASE("slots past the horizon are not planned") {
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  const Trace trace = toy_trace({make_service(0, 6, 7, 0, 0)}, 2);
  NetworkState state(g);
  const PlanResult r =
      lookahead_allocate(state, trace, 1, 4, greedy_placer(), paths, w);
  CHECK(r.committed.empty());
  CHECK(r.planned_sets.empty());  // slots 2..5 all beyond the 2-slot horizon
}

TEST_CASE("plan JSON carries the commit and the planned slots") {
  const NetworkGraph g = build_bcube(2, 1);
  const PathTable paths = k_shortest_paths(g, 8);
  const Weights w;
  std::vector<ServiceRequest> svcs{make_service(0, 6, 7, 1, 2), make_service(1, 7, 6, 2, 2)};
  const Trace trace = toy_trace(svcs, 3);
  NetworkState state(g);
  const PlanResult r = lookahead_allocate(state, trace, 0, 2, greedy_placer(), paths, w);
  const auto j = nlohmann::json::parse(plan_to_json(r));
  CHECK(j["commit_slot"] == 1);
  CHECK(j["placed"] == 1);
  REQUIRE(j["committed"].size() == 1);
  CHECK(j["committed"][0]["service_id"] == 0);
  CHECK(j["committed"][0]["success"] == true);
  REQUIRE(j["planned_slots"].size() == 2);
  CHECK(j["planned_slots"][0]["slot"] == 2);
  CHECK(j["planned_slots"][1]["slot"] == 1);
}
