#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridflow/cooptimize.hpp"
#include "gridflow/device.hpp"
#include "gridflow/graph.hpp"
#include "gridflow/options.hpp"
#include "gridflow/sweep.hpp"

// Project file ingestion and artifact emission. The project format is JSON;
// unknown fields are collected as diagnostics, which strict mode turns into
// rejections and lenient mode into warnings (the two sets are identical by
// construction). All emitted artifacts are byte-deterministic.

namespace gridflow {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Project {
  TaskGraph graph;
  DeviceGrid device;
  Options options;
};

namespace detail {

inline std::pair<int, int> line_column(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline void check_keys(const json& obj, const std::set<std::string>& known,
                       const std::string& context,
                       std::vector<std::string>& unknown) {
  if (!obj.is_object()) return;
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      unknown.push_back("unknown field '" + it.key() + "' in " + context);
}

inline ResourceVector parse_area(const json& j, const std::string& context,
                                 std::vector<std::string>& unknown) {
  ResourceVector r;
  if (j.is_null()) return r;
  if (!j.is_object())
    fail(ErrorKind::InvalidInput, context + " must be an object");
  std::set<std::string> known(ResourceVector::kTypeNames.begin(),
                              ResourceVector::kTypeNames.end());
  check_keys(j, known, context, unknown);
  for (int i = 0; i < ResourceVector::kNumTypes; ++i) {
    const char* key = ResourceVector::kTypeNames[i];
    if (!j.contains(key)) continue;
    const json& v = j.at(key);
    if (v.is_number_float()) {
      // fractional estimates are rounded up: conservative capacity checks
      double d = v.get<double>();
      r[i] = static_cast<count_t>(std::ceil(d - 1e-9));
    } else {
      r[i] = v.get<count_t>();
    }
  }
  return r;
}

inline DeviceGrid parse_device(const json& j,
                               std::vector<std::string>& unknown) {
  if (j.is_string()) {
    auto preset = device_preset(j.get<std::string>());
    if (!preset)
      fail(ErrorKind::InvalidInput,
           "unknown device preset '" + j.get<std::string>() + "'");
    return *preset;
  }
  if (!j.is_object())
    fail(ErrorKind::InvalidInput, "device must be a preset name or an object");
  check_keys(j, {"rows", "cols", "slots", "schedule", "hbm_groups"}, "device",
             unknown);
  DeviceGrid g;
  g.rows = j.at("rows").get<int>();
  g.cols = j.at("cols").get<int>();
  if (g.rows < 1 || g.cols < 1)
    fail(ErrorKind::InvalidInput, "device grid dimensions must be positive");
  g.slots.resize(static_cast<size_t>(g.rows) * g.cols);
  std::vector<bool> seen(g.slots.size(), false);
  for (const json& js : j.at("slots")) {
    check_keys(js, {"row", "col", "capacity", "max_util", "max_util_override"},
               "device slot", unknown);
    int r = js.at("row").get<int>();
    int c = js.at("col").get<int>();
    if (r < 0 || r >= g.rows || c < 0 || c >= g.cols)
      fail(ErrorKind::InvalidInput, "slot coordinates out of the grid");
    Slot& s = g.slot(r, c);
    s.row = r;
    s.col = c;
    s.capacity = parse_area(js.at("capacity"), "slot capacity", unknown);
    if (js.contains("max_util")) s.max_util = js.at("max_util").get<double>();
    if (js.contains("max_util_override")) {
      const json& jo = js.at("max_util_override");
      std::set<std::string> known(ResourceVector::kTypeNames.begin(),
                                  ResourceVector::kTypeNames.end());
      check_keys(jo, known, "max_util_override", unknown);
      for (int i = 0; i < ResourceVector::kNumTypes; ++i)
        if (jo.contains(ResourceVector::kTypeNames[i]))
          s.max_util_override[i] =
              jo.at(ResourceVector::kTypeNames[i]).get<double>();
    }
    seen[static_cast<size_t>(r) * g.cols + c] = true;
  }
  for (bool b : seen)
    if (!b) fail(ErrorKind::InvalidInput, "device slot array is incomplete");
  if (j.contains("schedule")) {
    for (const json& jd : j.at("schedule")) {
      check_keys(jd, {"axis", "split"}, "schedule directive", unknown);
      PartitionDirective d;
      std::string axis = jd.at("axis").get<std::string>();
      if (axis == "H" || axis == "horizontal") d.axis = Axis::Horizontal;
      else if (axis == "V" || axis == "vertical") d.axis = Axis::Vertical;
      else fail(ErrorKind::InvalidInput, "directive axis must be H or V");
      if (jd.contains("split")) {
        d.split_a = jd.at("split").at(0).get<int>();
        d.split_b = jd.at("split").at(1).get<int>();
      }
      g.schedule.push_back(d);
    }
  }
  if (j.contains("hbm_groups"))
    for (const json& jg : j.at("hbm_groups"))
      g.hbm_groups.push_back(jg.get<std::vector<int>>());
  return g;
}

}  // namespace detail

// Table-driven resource delta for channels marked async_mmap: dropping the
// buffered AXI adapter saves 15 BRAM18K on the owning (source) task.
inline ResourceVector async_mmap_delta() {
  ResourceVector d;
  d.bram18k = 15;
  return d;
}

inline Project parse_project_json(const std::string& text, bool strict,
                                  std::vector<std::string>* warnings_out = nullptr) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte);
    fail(ErrorKind::InvalidInput,
         "project parse error at line " + std::to_string(line) + ", column " +
             std::to_string(col) + ": " + e.what());
  }
  std::vector<std::string> unknown;
  detail::check_keys(j, {"graph", "device", "options"}, "project", unknown);
  if (!j.contains("graph") || !j.contains("device"))
    fail(ErrorKind::InvalidInput, "project needs 'graph' and 'device'");

  Project p;
  const json& jg = j.at("graph");
  detail::check_keys(jg, {"tasks", "channels"}, "graph", unknown);
  for (const json& jt : jg.at("tasks")) {
    detail::check_keys(jt, {"name", "area", "fixed_slot", "group", "actor"},
                       "task", unknown);
    Task t;
    t.name = jt.at("name").get<std::string>();
    if (jt.contains("area"))
      t.area = detail::parse_area(jt.at("area"), "task '" + t.name + "' area",
                                  unknown);
    if (jt.contains("fixed_slot")) {
      detail::check_keys(jt.at("fixed_slot"), {"row", "col"}, "fixed_slot",
                         unknown);
      t.fixed_slot = SlotCoord{jt.at("fixed_slot").at("row").get<int>(),
                               jt.at("fixed_slot").at("col").get<int>()};
    }
    if (jt.contains("group")) t.group = jt.at("group").get<std::string>();
    if (jt.contains("actor")) {
      const json& ja = jt.at("actor");
      detail::check_keys(ja, {"ii", "latency", "firings", "kind"}, "actor",
                         unknown);
      ActorSpec a;
      if (ja.contains("ii")) a.ii = ja.at("ii").get<count_t>();
      if (ja.contains("latency")) a.latency = ja.at("latency").get<count_t>();
      if (ja.contains("firings")) a.firings = ja.at("firings").get<count_t>();
      if (ja.contains("kind")) {
        std::string k = ja.at("kind").get<std::string>();
        if (k == "joined") a.kind = ActorSpec::Kind::Joined;
        else if (k == "detached") a.kind = ActorSpec::Kind::Detached;
        else fail(ErrorKind::InvalidInput, "actor kind must be joined|detached");
      }
      t.actor = a;
    }
    p.graph.tasks.push_back(std::move(t));
  }
  for (const json& jc : jg.at("channels")) {
    detail::check_keys(jc,
                       {"id", "src", "dst", "width", "capacity", "lat",
                        "balance", "per_crossing", "async_mmap"},
                       "channel", unknown);
    Channel c;
    c.id = jc.at("id").get<std::string>();
    c.src = jc.at("src").get<std::string>();
    c.dst = jc.at("dst").get<std::string>();
    if (jc.contains("width")) c.width = jc.at("width").get<count_t>();
    if (jc.contains("capacity")) c.capacity = jc.at("capacity").get<count_t>();
    if (jc.contains("lat")) c.lat = jc.at("lat").get<count_t>();
    if (jc.contains("balance")) c.balance = jc.at("balance").get<count_t>();
    if (jc.contains("per_crossing"))
      c.per_crossing_override = jc.at("per_crossing").get<count_t>();
    if (jc.contains("async_mmap")) c.async_mmap = jc.at("async_mmap").get<bool>();
    p.graph.channels.push_back(std::move(c));
  }

  // async_mmap channels shave the AXI buffer off the owning task's area
  auto index = p.graph.task_index_map();
  for (const auto& c : p.graph.channels) {
    if (!c.async_mmap) continue;
    auto it = index.find(c.src);
    if (it != index.end())
      p.graph.tasks[it->second].area =
          p.graph.tasks[it->second].area.minus_clamped(async_mmap_delta());
  }
  for (auto& t : p.graph.tasks) t.hbm_required = t.area.hbm_ch;

  p.device = detail::parse_device(j.at("device"), unknown);

  if (j.contains("options")) {
    const json& jo = j.at("options");
    detail::check_keys(jo,
                       {"max_util", "per_crossing", "sweep",
                        "timeout_threshold", "hbm_partial", "same_slot_groups",
                        "hbm_access_groups", "time_limit",
                        "max_feedback_rounds", "seed", "jobs"},
                       "options", unknown);
    Options& o = p.options;
    if (jo.contains("max_util")) o.max_util = jo.at("max_util").get<double>();
    if (jo.contains("per_crossing"))
      o.per_crossing = jo.at("per_crossing").get<count_t>();
    if (jo.contains("sweep"))
      o.sweep_range = jo.at("sweep").get<std::vector<double>>();
    if (jo.contains("timeout_threshold"))
      o.timeout_threshold = jo.at("timeout_threshold").get<count_t>();
    if (jo.contains("hbm_partial"))
      for (auto it = jo.at("hbm_partial").begin();
           it != jo.at("hbm_partial").end(); ++it)
        o.hbm_partial[it.key()] = it.value().get<int>();
    if (jo.contains("same_slot_groups"))
      o.same_slot_groups =
          jo.at("same_slot_groups").get<std::vector<std::vector<std::string>>>();
    if (jo.contains("hbm_access_groups"))
      o.hbm_access_groups =
          jo.at("hbm_access_groups").get<std::vector<std::vector<std::string>>>();
    if (jo.contains("time_limit"))
      o.time_limit_seconds = jo.at("time_limit").get<double>();
    if (jo.contains("max_feedback_rounds"))
      o.max_feedback_rounds = jo.at("max_feedback_rounds").get<int>();
    if (jo.contains("seed")) o.seed = jo.at("seed").get<std::uint64_t>();
    if (jo.contains("jobs")) o.jobs = jo.at("jobs").get<int>();
  }

  if (!unknown.empty()) {
    if (strict) {
      std::string msg = "strict mode: unknown fields present:";
      for (const auto& u : unknown) msg += "\n  " + u;
      fail(ErrorKind::InvalidInput, msg);
    }
    if (warnings_out)
      warnings_out->insert(warnings_out->end(), unknown.begin(), unknown.end());
  }

  auto violations = validate_graph(p.graph);
  if (!violations.empty()) {
    std::string msg = "project graph is invalid:";
    for (const auto& v : violations) msg += "\n  [" + v.code + "] " + v.message;
    fail(ErrorKind::InvalidInput, msg);
  }
  require_valid(p.device);
  for (const auto& t : p.graph.tasks)
    if (t.fixed_slot && !p.device.in_bounds(*t.fixed_slot))
      fail(ErrorKind::InvalidInput,
           "task '" + t.name + "' fixed outside the device grid");
  return p;
}

inline Project load_project(const std::string& path, bool strict = false,
                            std::vector<std::string>* warnings_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorKind::InvalidInput, "cannot open project file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_project_json(ss.str(), strict, warnings_out);
}

// ---------------------------------------------------------------------------
// emission

struct SolutionDocument {
  const TaskGraph* graph = nullptr;  // lat/balance already written
  const DeviceGrid* device = nullptr;
  const Floorplan* floorplan = nullptr;
  count_t overhead_bits = 0;
  int rounds = 0;
  const std::map<std::string, int>* hbm_binding = nullptr;
};

inline ordered_json emit_floorplan_json(const SolutionDocument& doc) {
  const TaskGraph& graph = *doc.graph;
  const DeviceGrid& device = *doc.device;
  const Floorplan& fp = *doc.floorplan;
  ordered_json j;
  j["device"] = {{"rows", device.rows}, {"cols", device.cols}};
  j["cost"] = fp.cost;
  j["overhead_bits"] = doc.overhead_bits;
  j["feedback_rounds"] = doc.rounds;

  ordered_json jt = ordered_json::object();
  std::vector<std::string> names;
  for (const auto& t : graph.tasks) names.push_back(t.name);
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    SlotCoord c = fp.at(name);
    jt[name] = {{"row", c.row}, {"col", c.col}};
  }
  j["tasks"] = std::move(jt);

  ordered_json jc = ordered_json::object();
  std::vector<const Channel*> chans;
  for (const auto& c : graph.channels) chans.push_back(&c);
  std::sort(chans.begin(), chans.end(),
            [](const Channel* a, const Channel* b) { return a->id < b->id; });
  for (const Channel* c : chans)
    jc[c->id] = {{"lat", c->lat}, {"balance", c->balance}};
  j["channels"] = std::move(jc);

  ordered_json js = ordered_json::array();
  for (const auto& [coord, used] : fp.util) {
    ordered_json e;
    e["row"] = coord.row;
    e["col"] = coord.col;
    ordered_json ju = ordered_json::object();
    ordered_json jr = ordered_json::object();
    const ResourceVector& cap = device.slot(coord.row, coord.col).capacity;
    for (int i = 0; i < ResourceVector::kNumTypes; ++i) {
      ju[ResourceVector::kTypeNames[i]] = used[i];
      if (cap[i] > 0)
        jr[ResourceVector::kTypeNames[i]] =
            static_cast<double>(used[i]) / static_cast<double>(cap[i]);
    }
    e["used"] = std::move(ju);
    e["ratio"] = std::move(jr);
    js.push_back(std::move(e));
  }
  j["slot_util"] = std::move(js);

  if (doc.hbm_binding && !doc.hbm_binding->empty()) {
    ordered_json jb = ordered_json::object();
    for (const auto& [task, ch] : *doc.hbm_binding) jb[task] = ch;
    j["hbm_binding"] = std::move(jb);
  }
  return j;
}

inline ordered_json emit_candidates_json(const TaskGraph& graph,
                                         const DeviceGrid& device,
                                         const SweepResult& sweep) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& cand : sweep.candidates) {
    SolutionDocument doc;
    doc.graph = &graph;
    doc.device = &device;
    doc.floorplan = &cand.floorplan;
    ordered_json e = emit_floorplan_json(doc);
    e.erase("overhead_bits");
    e.erase("feedback_rounds");
    e.erase("channels");
    ordered_json out;
    out["max_util"] = cand.max_util;
    out["max_slot_util"] = cand.max_slot_util;
    out.update(e);
    arr.push_back(std::move(out));
  }
  j["candidates"] = std::move(arr);
  ordered_json failures = ordered_json::array();
  for (const auto& f : sweep.failures)
    failures.push_back({{"max_util", f.max_util}, {"reason", f.reason}});
  j["failures"] = std::move(failures);
  return j;
}

// Vivado-style constraints: one pblock per occupied slot, one
// add_cells_to_pblock per task, and comment hints carrying pipeline depths.
inline std::string emit_constraints_tcl(const SolutionDocument& doc) {
  const TaskGraph& graph = *doc.graph;
  const Floorplan& fp = *doc.floorplan;
  std::ostringstream os;
  os << "# floorplan constraints (" << doc.device->rows << " rows x "
     << doc.device->cols << " cols)\n";
  std::map<SlotCoord, std::vector<std::string>> members;
  for (const auto& t : graph.tasks) members[fp.at(t.name)].push_back(t.name);
  for (auto& [coord, names] : members) {
    std::sort(names.begin(), names.end());
    std::string pb = "pblock_X" + std::to_string(coord.col) + "Y" +
                     std::to_string(coord.row);
    os << "create_pblock " << pb << "\n";
    for (const auto& name : names)
      os << "add_cells_to_pblock [get_pblocks " << pb
         << "] [get_cells -hierarchical " << name << "]\n";
  }
  std::vector<const Channel*> chans;
  for (const auto& c : graph.channels)
    if (c.lat + c.balance > 0) chans.push_back(&c);
  std::sort(chans.begin(), chans.end(),
            [](const Channel* a, const Channel* b) { return a->id < b->id; });
  for (const Channel* c : chans)
    os << "# pipeline " << c->id << " depth " << (c->lat + c->balance)
       << " spread evenly between slots\n";
  return os.str();
}

// Re-parses an emitted tcl file back into task -> slot assignments; the
// repo's own consistency check for the constraint writer.
inline std::map<std::string, SlotCoord> parse_constraints_tcl(
    const std::string& text) {
  std::map<std::string, SlotCoord> out;
  std::istringstream is(text);
  std::string line;
  const std::string marker = "add_cells_to_pblock [get_pblocks pblock_X";
  while (std::getline(is, line)) {
    size_t at = line.find(marker);
    if (at == std::string::npos) continue;
    size_t p = at + marker.size();
    size_t y = line.find('Y', p);
    size_t close = line.find(']', p);
    int col = std::stoi(line.substr(p, y - p));
    int row = std::stoi(line.substr(y + 1, close - y - 1));
    const std::string cells = "[get_cells -hierarchical ";
    size_t c0 = line.find(cells);
    size_t c1 = line.rfind(']');
    std::string name = line.substr(c0 + cells.size(), c1 - c0 - cells.size());
    out[name] = SlotCoord{row, col};
  }
  return out;
}

}  // namespace gridflow
