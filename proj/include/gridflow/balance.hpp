#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "gridflow/graph.hpp"

// Latency balancing of reconvergent paths.
//
// Every task gets an integer potential S, constrained per channel (i -> j)
// by S_i - S_j >= lat; the channel's balancing latency is the slack
// S_i - S_j - lat, and the objective is to minimize the width-weighted sum
// of slacks. That is a system of difference constraints, solved exactly
// through its min-cost-flow dual: one flow arc per constraint, node supply
// equal to the potential's objective coefficient, successive shortest path
// augmentation, and the final node potentials are the optimal S.
//
// An infeasible system means a directed cycle with positive total latency;
// Bellman-Ford finds it and the cycle is reported as a witness.
//
// Among equal-overhead optima the solver canonicalizes to the
// lexicographically smallest balance vector in channel-id order: channels
// are visited in sorted id order and each balance is pinned to the smallest
// value that keeps the overhead optimal (binary search over an added upper
// bound constraint, re-solving the flow).

namespace gridflow {

struct SdcSolution {
  std::vector<count_t> potential;            // per task index, anchored at 0
  std::map<std::string, count_t> balances;   // per channel id
  count_t overhead = 0;                      // sum of balance * width
};

struct SdcResult {
  bool feasible = false;
  SdcSolution solution;
  std::vector<std::string> infeasible_cycle;  // channel ids, in cycle order
};

namespace detail {

// S_u - S_v >= bound
struct DiffArc {
  int u = 0;
  int v = 0;
  count_t bound = 0;
  int channel = -1;  // original channel index, -1 for canonicalization arcs
};

struct DiffSystem {
  int n = 0;
  std::vector<DiffArc> arcs;
  std::vector<count_t> node_cost;  // objective: minimize sum cost * S

  // Bellman-Ford feasibility. Returns potentials, or the arc indices of a
  // violated (positive-bound) cycle.
  bool feasible_potentials(std::vector<count_t>& dist,
                           std::vector<int>& cycle_arcs) const {
    dist.assign(n, 0);
    std::vector<int> pred_arc(n, -1);
    int relaxed_node = -1;
    for (int pass = 0; pass <= n; ++pass) {
      relaxed_node = -1;
      for (size_t ai = 0; ai < arcs.size(); ++ai) {
        const DiffArc& a = arcs[ai];
        if (dist[a.u] - a.bound < dist[a.v]) {
          dist[a.v] = dist[a.u] - a.bound;
          pred_arc[a.v] = static_cast<int>(ai);
          relaxed_node = a.v;
        }
      }
      if (relaxed_node < 0) return true;
    }
    // walk predecessors n times to land inside the cycle, then collect it
    int x = relaxed_node;
    for (int i = 0; i < n; ++i) x = arcs[pred_arc[x]].u;
    cycle_arcs.clear();
    int y = x;
    do {
      int ai = pred_arc[y];
      cycle_arcs.push_back(ai);
      y = arcs[ai].u;
    } while (y != x);
    std::reverse(cycle_arcs.begin(), cycle_arcs.end());
    return false;
  }

  // Exact minimum of sum node_cost * S via the min-cost-flow dual.
  // Returns false when the difference constraints are infeasible.
  bool solve_min(std::vector<count_t>& potentials,
                 std::vector<int>* cycle_arcs = nullptr) const {
    std::vector<count_t> pot;
    std::vector<int> cyc;
    if (!feasible_potentials(pot, cyc)) {
      if (cycle_arcs) *cycle_arcs = cyc;
      return false;
    }
    // residual graph: forward arc u->v cost -bound cap inf, backward cost +bound
    struct Edge {
      int to;
      count_t cap;
      count_t cost;
      int twin;
    };
    std::vector<std::vector<Edge>> adj(n);
    constexpr count_t kInf = std::numeric_limits<count_t>::max() / 4;
    for (const DiffArc& a : arcs) {
      adj[a.u].push_back({a.v, kInf, -a.bound, static_cast<int>(adj[a.v].size())});
      adj[a.v].push_back({a.u, 0, a.bound, static_cast<int>(adj[a.u].size()) - 1});
    }
    std::vector<count_t> excess(node_cost.begin(), node_cost.end());
    std::vector<count_t> dist(n);
    std::vector<std::pair<int, int>> via(n);  // (node, edge index into adj[node])

    while (true) {
      int src = -1;
      for (int v = 0; v < n; ++v)
        if (excess[v] > 0) {
          src = v;
          break;
        }
      if (src < 0) break;
      // Dijkstra over reduced costs from src
      dist.assign(n, kInf);
      dist[src] = 0;
      via.assign(n, {-1, -1});
      using Item = std::pair<count_t, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      pq.push({0, src});
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d != dist[u]) continue;
        for (size_t ei = 0; ei < adj[u].size(); ++ei) {
          const Edge& e = adj[u][ei];
          if (e.cap <= 0) continue;
          count_t nd = d + e.cost + pot[u] - pot[e.to];
          if (nd < dist[e.to]) {
            dist[e.to] = nd;
            via[e.to] = {u, static_cast<int>(ei)};
            pq.push({nd, e.to});
          }
        }
      }
      int sink = -1;
      for (int v = 0; v < n; ++v) {
        if (excess[v] >= 0 || dist[v] >= kInf) continue;
        if (sink < 0 || dist[v] < dist[sink]) sink = v;
      }
      if (sink < 0)
        fail(ErrorKind::Internal, "difference-constraint dual has no route");
      count_t push = std::min(excess[src], -excess[sink]);
      for (int v = sink; v != src;) {  // residual bottleneck caps the push
        auto [u, ei] = via[v];
        push = std::min(push, adj[u][ei].cap);
        v = u;
      }
      for (int v = sink; v != src;) {
        auto [u, ei] = via[v];
        Edge& e = adj[u][ei];
        e.cap -= push;
        adj[v][e.twin].cap += push;
        v = u;
      }
      excess[src] -= push;
      excess[sink] += push;
      for (int v = 0; v < n; ++v)
        pot[v] += std::min(dist[v], dist[sink]);
    }
    potentials = std::move(pot);
    return true;
  }
};

}  // namespace detail

inline SdcResult solve_sdc(const TaskGraph& graph) {
  SdcResult result;
  auto index = graph.task_index_map();
  int n = static_cast<int>(graph.tasks.size());

  detail::DiffSystem sys;
  sys.n = n;
  sys.node_cost.assign(n, 0);
  for (size_t ci = 0; ci < graph.channels.size(); ++ci) {
    const Channel& ch = graph.channels[ci];
    if (ch.lat < 0)
      fail(ErrorKind::InvalidInput, "channel '" + ch.id + "' has negative lat");
    int u = index.at(ch.src);
    int v = index.at(ch.dst);
    sys.arcs.push_back({u, v, ch.lat, static_cast<int>(ci)});
    sys.node_cost[u] += ch.width;
    sys.node_cost[v] -= ch.width;
  }

  std::vector<count_t> S;
  std::vector<int> cycle;
  if (!sys.solve_min(S, &cycle)) {
    result.feasible = false;
    for (int ai : cycle)
      result.infeasible_cycle.push_back(graph.channels[sys.arcs[ai].channel].id);
    return result;
  }
  count_t opt = 0;
  for (int v = 0; v < n; ++v) opt += sys.node_cost[v] * S[v];

  // canonicalize: channels in sorted id order, each balance pinned as low
  // as the optimum allows
  std::vector<int> order(graph.channels.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return graph.channels[a].id < graph.channels[b].id;
  });
  for (int ci : order) {
    const Channel& ch = graph.channels[ci];
    int u = index.at(ch.src);
    int v = index.at(ch.dst);
    count_t cur = S[u] - S[v] - ch.lat;
    if (cur < 0) fail(ErrorKind::Internal, "negative balance from SDC solve");
    count_t pinned = cur;
    if (cur > 0) {
      // smallest t with: constraints + (balance <= t) still reach opt
      count_t lo = 0, hi = cur - 1;
      std::vector<count_t> best_S;
      while (lo <= hi) {
        count_t mid = lo + (hi - lo) / 2;
        sys.arcs.push_back({v, u, -(ch.lat + mid), -1});
        std::vector<count_t> cand;
        bool ok = sys.solve_min(cand);
        if (ok) {
          count_t val = 0;
          for (int x = 0; x < n; ++x) val += sys.node_cost[x] * cand[x];
          ok = val == opt;
        }
        sys.arcs.pop_back();
        if (ok) {
          pinned = mid;
          best_S = std::move(cand);
          hi = mid - 1;
        } else {
          lo = mid + 1;
        }
      }
      if (!best_S.empty()) S = std::move(best_S);
    }
    sys.arcs.push_back({v, u, -(ch.lat + pinned), -1});
  }

  // anchor one potential per weakly-connected component to zero
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> undirected(n);
  for (const auto& ch : graph.channels) {
    int u = index.at(ch.src);
    int v = index.at(ch.dst);
    undirected[u].push_back(v);
    undirected[v].push_back(u);
  }
  for (int v = 0; v < n; ++v) {
    if (comp[v] >= 0) continue;
    count_t anchor = S[v];
    std::vector<int> stack = {v};
    comp[v] = v;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      S[x] -= anchor;
      for (int y : undirected[x])
        if (comp[y] < 0) {
          comp[y] = v;
          stack.push_back(y);
        }
    }
  }

  result.feasible = true;
  result.solution.potential = S;
  count_t lat_bits = 0;
  for (const auto& ch : graph.channels) {
    count_t b = S[index.at(ch.src)] - S[index.at(ch.dst)] - ch.lat;
    if (b < 0) fail(ErrorKind::Internal, "balance went negative after anchoring");
    result.solution.balances[ch.id] = b;
    result.solution.overhead += b * ch.width;
    lat_bits += ch.lat * ch.width;
  }
  // objective value and overhead differ by the constant lat * width term
  if (result.solution.overhead + lat_bits != opt)
    fail(ErrorKind::Internal, "SDC canonicalization changed the overhead");
  return result;
}

struct BalanceOutcome {
  bool feasible = false;
  TaskGraph graph;          // balances written when feasible
  count_t overhead_bits = 0;
  std::vector<std::string> cycle;  // witness when infeasible
};

// Writes solve_sdc balances into a copy of the graph.
inline BalanceOutcome balance_latency(const TaskGraph& graph) {
  BalanceOutcome out;
  SdcResult r = solve_sdc(graph);
  if (!r.feasible) {
    out.feasible = false;
    out.cycle = std::move(r.infeasible_cycle);
    return out;
  }
  out.feasible = true;
  out.graph = graph;
  for (auto& ch : out.graph.channels) ch.balance = r.solution.balances.at(ch.id);
  out.overhead_bits = r.solution.overhead;
  return out;
}

}  // namespace gridflow
