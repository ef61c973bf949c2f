#include "sfcsim/lookahead.hpp"

#include <algorithm>

#include "json.hpp"

namespace sfcsim {

ServiceSets classify_services(const Trace& trace, int slot, const std::set<int>& committed) {
  ServiceSets sets;
  sets.slot = slot;
  for (const ServiceRequest& s : trace.services) {
    if (s.start_slot == slot) sets.new_ids.push_back(s.id);
    if (s.start_slot <= slot && slot <= s.end_slot) {
      sets.active_ids.push_back(s.id);
      if (committed.count(s.id)) sets.used_ids.push_back(s.id);
    }
    if (committed.count(s.id) && s.end_slot < slot) sets.ended_ids.push_back(s.id);
  }
  for (auto* v : {&sets.new_ids, &sets.active_ids, &sets.used_ids, &sets.ended_ids})
    std::sort(v->begin(), v->end());
  return sets;
}

namespace {

std::map<int, const ServiceRequest*> index_by_id(const Trace& trace) {
  std::map<int, const ServiceRequest*> m;
  for (const ServiceRequest& s : trace.services) m.emplace(s.id, &s);
  return m;
}

std::vector<const ServiceRequest*> to_batch(const std::vector<int>& ids,
                                            const std::map<int, const ServiceRequest*>& by_id) {
  std::vector<const ServiceRequest*> batch;
  for (int id : ids) batch.push_back(by_id.at(id));
  return batch;
}

}  // namespace

PlanResult lookahead_allocate(NetworkState& state, const Trace& trace, int current_slot,
                              int lookahead_slots, const PlacerFn& placer, const PathTable& paths,
                              const Weights& w, bool commit) {
  PlanResult res;
  const int commit_slot = current_slot + 1;
  res.commit_slot = commit_slot;
  const auto by_id = index_by_id(trace);
  const std::vector<int> applied = state.applied_service_ids();
  const std::set<int> committed_ids(applied.begin(), applied.end());

  auto due_now = [&]() {  // arrivals at the commit slot plus in-window retries
    ServiceSets sets = classify_services(trace, commit_slot, committed_ids);
    std::vector<int> ids;
    std::set_difference(sets.active_ids.begin(), sets.active_ids.end(), sets.used_ids.begin(),
                        sets.used_ids.end(), std::back_inserter(ids));
    return ids;
  };

  if (lookahead_slots == 0) {
    const std::vector<int> ids = due_now();
    if (commit) {
      res.committed = placer(to_batch(ids, by_id), state, paths, w);
    } else {
      NetworkState scratch = state;
      placer(to_batch(ids, by_id), scratch, paths, w);
    }
    for (const auto& [id, out] : res.committed) out.success ? ++res.placed : ++res.unplaced;
    return res;
  }

  std::map<int, Placement> carried;  // tentative placements pinned at closer slots
  std::map<int, Placement> final_plan;
  for (int m = lookahead_slots; m >= 1; --m) {
    const int slot = current_slot + m;
    if (slot >= trace.horizon_slots) continue;
    NetworkState plan = state;
    ServiceSets sets = classify_services(trace, slot, committed_ids);
    for (int id : sets.ended_ids)
      if (plan.has_service(id)) plan.release(id);
    // re-apply what farther slots already decided; what no longer fits is
    // replanned here instead
    std::vector<int> replan;
    for (auto it = carried.begin(); it != carried.end();) {
      if (plan.apply(*by_id.at(it->first), it->second)) {
        ++it;
      } else {
        replan.push_back(it->first);
        it = carried.erase(it);
      }
    }
    std::vector<int> to_place;
    for (int id : sets.active_ids)
      if (!committed_ids.count(id) && !carried.count(id)) to_place.push_back(id);
    for (int id : replan)
      if (!std::binary_search(to_place.begin(), to_place.end(), id)) to_place.push_back(id);
    std::sort(to_place.begin(), to_place.end());
    for (const auto& [id, pl] : carried) sets.remain_ids.push_back(id);
    sets.allocate_ids = to_place;
    auto outcomes = placer(to_batch(to_place, by_id), plan, paths, w);
    for (const auto& [id, out] : outcomes)
      if (out.success) {
        carried[id] = *out.placement;
        res.tentative[slot].push_back(*out.placement);
      }
    res.planned_sets.push_back(sets);
    res.planned_util.emplace_back(slot, plan.utilization(w));
    if (m == 1)  // the commit slot's full picture: pinned carries + fresh outcomes
      final_plan = carried;
    // placements decided at their own start slot stop mattering earlier in time
    std::erase_if(carried,
                  [&](const auto& kv) { return by_id.at(kv.first)->start_slot == slot; });
  }

  if (!commit) return res;
  // The plan counted on the boundary releases; make them real before writing
  // anything back.
  for (int id : applied)
    if (by_id.at(id)->end_slot <= current_slot) state.release(id);
  for (int id : due_now()) {
    const ServiceRequest& svc = *by_id.at(id);
    PlacementOutcome out;
    auto it = final_plan.find(id);
    if (it != final_plan.end() && state.apply(svc, it->second)) {
      out.success = true;
      out.placement = it->second;
      for (std::size_t i = 0; i < svc.vnfs.size(); ++i)
        if (!is_endpoint(svc.vnfs[i].kind)) {
          out.server = it->second.vnf_to_node[i];
          break;
        }
      out.objective = state.utilization(w).total;
    } else {
      // plan missing or stale; try again against reality
      auto fresh = placer({&svc}, state, paths, w);
      out = std::move(fresh.front().second);
    }
    out.success ? ++res.placed : ++res.unplaced;
    res.committed.emplace_back(id, std::move(out));
  }
  return res;
}

std::string plan_to_json(const PlanResult& r) {
  nlohmann::json j;
  j["commit_slot"] = r.commit_slot;
  j["placed"] = r.placed;
  j["unplaced"] = r.unplaced;
  nlohmann::json committed = nlohmann::json::array();
  for (const auto& [id, out] : r.committed) {
    nlohmann::json e{{"service_id", id}, {"success", out.success}};
    if (out.success) {
      e["server"] = out.server;
      e["objective"] = out.objective;
      e["placement"] = nlohmann::json::parse(placement_to_json(*out.placement));
    }
    committed.push_back(e);
  }
  j["committed"] = committed;
  nlohmann::json slots = nlohmann::json::array();
  for (std::size_t i = 0; i < r.planned_sets.size(); ++i) {
    const ServiceSets& s = r.planned_sets[i];
    slots.push_back({{"slot", s.slot},
                     {"new", s.new_ids},
                     {"active", s.active_ids},
                     {"used", s.used_ids},
                     {"ended", s.ended_ids},
                     {"remain", s.remain_ids},
                     {"allocate", s.allocate_ids},
                     {"planned_u_total", r.planned_util[i].second.total}});
  }
  j["planned_slots"] = slots;
  return j.dump();
}

}  // namespace sfcsim
