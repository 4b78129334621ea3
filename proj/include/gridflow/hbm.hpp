#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridflow/device.hpp"
#include "gridflow/floorplan.hpp"
#include "gridflow/graph.hpp"

// Binding of HBM-driving tasks to physical channel ids.
//
// The floorplanner already treated HBM demand as a slot resource, so every
// task with hbm_required >= 1 sits in a slot with channels attached. What is
// left is picking concrete ids: partial bindings are honored verbatim,
// declared access groups must land inside one crossbar-connected hardware
// group (found by exact backtracking over the group-to-hardware-group
// assignment), and everything else takes the lowest free id of its slot.

namespace gridflow {

inline std::map<std::string, int> bind_hbm_channels(
    const Floorplan& fp, const TaskGraph& graph, const DeviceGrid& device,
    const std::map<std::string, int>& partial,
    const std::vector<std::vector<std::string>>& access_groups = {}) {
  std::map<std::string, int> binding;

  std::vector<const Task*> clients;
  for (const auto& t : graph.tasks) {
    if (t.hbm_required == 0) continue;
    if (t.hbm_required > 1)
      fail(ErrorKind::InvalidInput,
           "task '" + t.name +
               "' requires multiple HBM channels; split it into one task per channel");
    clients.push_back(&t);
  }
  std::sort(clients.begin(), clients.end(),
            [](const Task* a, const Task* b) { return a->name < b->name; });

  // slot -> channel-id pool
  std::map<SlotCoord, std::vector<int>> slot_ids;
  std::set<int> all_ids;
  for (const auto* t : clients) {
    SlotCoord c = fp.at(t->name);
    if (!slot_ids.count(c)) {
      slot_ids[c] = device.hbm_channel_ids(c.row, c.col);
      for (int id : slot_ids[c]) all_ids.insert(id);
    }
  }

  std::set<int> used;
  for (const auto& [name, id] : partial) {
    const Task* t = graph.find_task(name);
    if (!t || t->hbm_required < 1)
      fail(ErrorKind::InvalidInput,
           "partial binding names '" + name + "', which needs no HBM channel");
    const auto& ids = slot_ids.at(fp.at(name));
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
      fail(ErrorKind::Infeasible,
           "partial binding conflicts with floorplan: channel " +
               std::to_string(id) + " is not attributed to the slot of '" +
               name + "'");
    if (!used.insert(id).second)
      fail(ErrorKind::InvalidInput,
           "partial bindings reuse channel " + std::to_string(id));
    binding[name] = id;
  }

  // hardware groups restricted to ids of one slot
  auto hw_groups_of_slot = [&](SlotCoord c) {
    std::vector<std::vector<int>> out;
    const auto& ids = slot_ids.at(c);
    std::set<int> id_set(ids.begin(), ids.end());
    std::set<int> grouped;
    for (const auto& grp : device.hbm_groups) {
      std::vector<int> here;
      for (int id : grp)
        if (id_set.count(id)) {
          here.push_back(id);
          grouped.insert(id);
        }
      if (!here.empty()) out.push_back(here);
    }
    for (int id : ids)
      if (!grouped.count(id)) out.push_back({id});  // ungrouped: singleton
    return out;
  };

  // declared access groups, keyed per slot
  struct GroupReq {
    std::vector<std::string> members;  // sorted, unbound members only at solve
    SlotCoord slot;
  };
  std::vector<GroupReq> reqs;
  std::set<std::string> in_group;
  for (const auto& members : access_groups) {
    if (members.empty()) continue;
    GroupReq rq;
    for (const auto& name : members) {
      const Task* t = graph.find_task(name);
      if (!t || t->hbm_required < 1)
        fail(ErrorKind::InvalidInput,
             "HBM access group names '" + name + "', which needs no channel");
      if (!in_group.insert(name).second)
        fail(ErrorKind::InvalidInput,
             "task '" + name + "' appears in two HBM access groups");
      rq.members.push_back(name);
    }
    std::sort(rq.members.begin(), rq.members.end());
    rq.slot = fp.at(rq.members.front());
    for (const auto& name : rq.members)
      if (!(fp.at(name) == rq.slot))
        fail(ErrorKind::Infeasible,
             "group unsatisfiable: members of an HBM access group are "
             "floorplanned into different slots");
    reqs.push_back(std::move(rq));
  }
  std::sort(reqs.begin(), reqs.end(), [](const GroupReq& a, const GroupReq& b) {
    return a.members.front() < b.members.front();
  });

  // per slot: exact search assigning each group to one hardware group
  std::map<SlotCoord, std::vector<int>> slot_reqs;
  for (size_t i = 0; i < reqs.size(); ++i)
    slot_reqs[reqs[i].slot].push_back(static_cast<int>(i));

  for (auto& [slot, req_idx] : slot_reqs) {
    auto hw = hw_groups_of_slot(slot);
    // free ids per hardware group, and the forced hw group of pinned members
    auto free_in = [&](const std::vector<int>& grp) {
      int n = 0;
      for (int id : grp)
        if (!used.count(id)) ++n;
      return n;
    };
    std::vector<int> forced(req_idx.size(), -1);
    std::vector<int> need(req_idx.size(), 0);
    for (size_t k = 0; k < req_idx.size(); ++k) {
      const GroupReq& rq = reqs[req_idx[k]];
      for (const auto& name : rq.members) {
        auto it = binding.find(name);
        if (it == binding.end()) {
          ++need[k];
          continue;
        }
        int hg = -1;
        for (size_t g = 0; g < hw.size(); ++g)
          if (std::find(hw[g].begin(), hw[g].end(), it->second) != hw[g].end())
            hg = static_cast<int>(g);
        if (forced[k] >= 0 && forced[k] != hg)
          fail(ErrorKind::Infeasible,
               "group unsatisfiable: partial bindings span hardware groups");
        forced[k] = hg;
      }
    }
    std::vector<int> remaining(hw.size());
    for (size_t g = 0; g < hw.size(); ++g) remaining[g] = free_in(hw[g]);
    std::vector<int> chosen(req_idx.size(), -1);
    // depth-first, lowest hardware-group index first: the first complete
    // assignment is the deterministic one
    auto search = [&](auto&& self, size_t k) -> bool {
      if (k == req_idx.size()) return true;
      for (size_t g = 0; g < hw.size(); ++g) {
        if (forced[k] >= 0 && static_cast<size_t>(forced[k]) != g) continue;
        if (remaining[g] < need[k]) continue;
        chosen[k] = static_cast<int>(g);
        remaining[g] -= need[k];
        if (self(self, k + 1)) return true;
        remaining[g] += need[k];
        chosen[k] = -1;
      }
      return false;
    };
    if (!search(search, 0))
      fail(ErrorKind::Infeasible,
           "group unsatisfiable: no hardware group packing fits in slot (" +
               std::to_string(slot.row) + "," + std::to_string(slot.col) + ")");
    for (size_t k = 0; k < req_idx.size(); ++k) {
      const GroupReq& rq = reqs[req_idx[k]];
      const auto& grp = hw[chosen[k]];
      for (const auto& name : rq.members) {
        if (binding.count(name)) continue;
        int pick = -1;
        for (int id : grp)
          if (!used.count(id)) {
            pick = id;
            break;
          }
        if (pick < 0)
          fail(ErrorKind::Internal, "hbm group packing lost channels");
        used.insert(pick);
        binding[name] = pick;
      }
    }
  }

  // ungrouped clients: lowest free id of their slot
  for (const auto* t : clients) {
    if (binding.count(t->name)) continue;
    const auto& ids = slot_ids.at(fp.at(t->name));
    int pick = -1;
    for (int id : ids)
      if (!used.count(id)) {
        pick = id;
        break;
      }
    if (pick < 0)
      fail(ErrorKind::Infeasible,
           "channel exhausted in slot (" +
               std::to_string(fp.at(t->name).row) + "," +
               std::to_string(fp.at(t->name).col) + ") for task '" + t->name +
               "'");
    used.insert(pick);
    binding[t->name] = pick;
  }
  return binding;
}

}  // namespace gridflow
