#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gridflow/error.hpp"
#include "gridflow/resources.hpp"

// Exact solver for 0/1 integer linear programs.
//
// The search is depth-first implicit enumeration over the declared variable
// order, value 0 before value 1, with bound propagation on the constraint
// rows and an incremental objective lower bound. Pruning only discards
// subtrees that cannot strictly improve the incumbent, which makes the last
// improving leaf the lexicographically smallest optimal assignment under the
// declared order -- the documented tie-break.
//
// A presolve pass recognizes absolute-difference gadgets (rows of the form
// x_p - x_m - x_t <= 0 where x_t is a 2-row penalty variable). Partition
// objectives are built almost entirely from such gadgets, and charging their
// penalty to the undecided endpoint gives the frontier bound that makes
// graph-cut instances tractable.

namespace gridflow::ilp {

struct Term {
  int var = 0;
  count_t coef = 0;
};

enum class Rel { Le, Ge, Eq };

struct Constraint {
  std::vector<Term> terms;
  Rel rel = Rel::Le;
  count_t rhs = 0;
};

struct IlpProblem {
  std::vector<std::string> var_names;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;
  count_t objective_offset = 0;
  std::optional<double> time_limit_seconds = 300.0;

  int num_vars() const { return static_cast<int>(var_names.size()); }

  int add_var(std::string name) {
    var_names.push_back(std::move(name));
    return num_vars() - 1;
  }

  void add_constraint(std::vector<Term> terms, Rel rel, count_t rhs) {
    constraints.push_back({std::move(terms), rel, rhs});
  }

  void add_objective_term(int var, count_t coef) {
    if (coef != 0) objective.push_back({var, coef});
  }
};

enum class Status { Optimal, Infeasible, TimedOut };

struct IlpOutcome {
  Status status = Status::Infeasible;
  std::vector<std::uint8_t> assignment;  // present iff Optimal
  count_t objective_value = 0;           // includes the offset
};

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::TimedOut: return "timed-out";
  }
  return "?";
}

// Evaluates a full assignment against the problem; used by callers that want
// an independent feasibility check of a solver result.
inline bool satisfies(const IlpProblem& p,
                      const std::vector<std::uint8_t>& x) {
  for (const auto& c : p.constraints) {
    count_t lhs = 0;
    for (const auto& t : c.terms) lhs += t.coef * x[t.var];
    if (c.rel == Rel::Le && lhs > c.rhs) return false;
    if (c.rel == Rel::Ge && lhs < c.rhs) return false;
    if (c.rel == Rel::Eq && lhs != c.rhs) return false;
  }
  return true;
}

inline count_t evaluate_objective(const IlpProblem& p,
                                  const std::vector<std::uint8_t>& x) {
  count_t v = p.objective_offset;
  for (const auto& t : p.objective) v += t.coef * x[t.var];
  return v;
}

namespace detail {

struct Row {
  std::vector<Term> terms;
  count_t rhs = 0;
  count_t min_activity = 0;  // with unfixed vars at their cheapest value
  count_t max_abs_coef = 0;
  int unfixed = 0;
};

class Solver {
public:
  explicit Solver(const IlpProblem& p, bool enable_block_bound = true)
      : problem_(p), n_(p.num_vars()), block_bound_(enable_block_bound) {
    build();
  }

  IlpOutcome run() {
    IlpOutcome out;
    deadline_.reset();
    if (problem_.time_limit_seconds)
      deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(
                                         *problem_.time_limit_seconds));
    timed_out_ = false;
    if (block_bound_) prepare_block_bounds();
    if (!conflict_at_root_ && !timed_out_) propagate_root();
    if (conflict_at_root_) {
      out.status = Status::Infeasible;
      return out;
    }
    if (timed_out_) {
      out.status = Status::TimedOut;
      return out;
    }
    dfs(0);
    if (timed_out_) {
      out.status = Status::TimedOut;
      return out;
    }
    if (!have_incumbent_) {
      out.status = Status::Infeasible;
      return out;
    }
    out.status = Status::Optimal;
    out.assignment = best_assignment_;
    out.objective_value = best_value_;
    return out;
  }

private:
  using Clock = std::chrono::steady_clock;

  enum class TrailKind : std::uint8_t { Fix, Charge };
  struct TrailEntry {
    TrailKind kind;
    int a = 0;      // var (Fix) or gadget row (Charge)
    count_t b = 0;  // previous charge amount
    int c = 0;      // previous charged var
    int d = 0;      // previous charged value
  };

  struct Gadget {
    int plus = 0;
    int minus = 0;
    int aux = 0;
    count_t weight = 0;  // objective coefficient of aux
    // current frontier charge
    int charged_var = -1;
    int charged_val = 0;
    count_t charged = 0;
  };

  const IlpProblem& problem_;
  int n_;
  bool block_bound_;
  std::vector<Row> rows_;
  std::vector<bool> row_is_gadget_;
  std::vector<std::vector<Term>> columns_;    // var -> (row, coef)
  std::vector<std::vector<int>> var_gadgets_;  // var -> gadget indices
  std::vector<count_t> obj_coef_;
  std::vector<Gadget> gadgets_;
  std::vector<std::int8_t> value_;  // -1 unfixed
  std::vector<count_t> pen_[2];     // pen_[b][v]: entailed cost if v := b

  count_t fixed_obj_ = 0;     // objective over fixed vars
  count_t neg_slack_ = 0;     // negative coefs of unfixed vars in touched blocks
  count_t frontier_ = 0;      // sum over unfixed v of min(pen0, pen1)
  bool conflict_at_root_ = false;
  bool have_incumbent_ = false;
  count_t best_value_ = 0;
  std::vector<std::uint8_t> best_assignment_;
  std::vector<TrailEntry> trail_;
  std::vector<int> pending_;  // propagation queue
  std::optional<Clock::time_point> deadline_;
  bool timed_out_ = false;
  std::uint64_t nodes_ = 0;

  // Block bound: variables group into blocks connected by non-gadget rows.
  // For an untouched block (no variable fixed) the exact minimum of its
  // internal subproblem, computed once up front, is an admissible bound on
  // whatever the search will eventually pay there. Without it, subtrees
  // that misassign one region look cheap merely because the other regions
  // have not been entered yet.
  std::vector<int> block_of_;         // var -> block id
  std::vector<count_t> block_v_;      // block -> internal minimum
  std::vector<count_t> block_negs_;   // block -> sum of negative coefs
  std::vector<int> block_touched_;    // block -> number of fixed vars
  count_t untouched_v_sum_ = 0;       // sum of block_v_ over untouched blocks

  void build() {
    value_.assign(n_, -1);
    columns_.resize(n_);
    var_gadgets_.resize(n_);
    obj_coef_.assign(n_, 0);
    pen_[0].assign(n_, 0);
    pen_[1].assign(n_, 0);
    for (const auto& t : problem_.objective) {
      check_var(t.var);
      obj_coef_[t.var] += t.coef;
    }
    for (int v = 0; v < n_; ++v)
      if (obj_coef_[v] < 0) neg_slack_ += obj_coef_[v];

    auto add_row = [&](const std::vector<Term>& terms, count_t rhs,
                       bool negate) {
      Row row;
      row.rhs = negate ? -rhs : rhs;
      for (const auto& t : terms) {
        check_var(t.var);
        if (t.coef == 0) continue;
        count_t c = negate ? -t.coef : t.coef;
        row.terms.push_back({t.var, c});
        row.min_activity += std::min<count_t>(0, c);
        row.max_abs_coef = std::max(row.max_abs_coef, std::abs(c));
        ++row.unfixed;
      }
      int idx = static_cast<int>(rows_.size());
      for (const auto& t : row.terms) columns_[t.var].push_back({idx, t.coef});
      rows_.push_back(std::move(row));
    };
    for (const auto& c : problem_.constraints) {
      if (c.rel == Rel::Le || c.rel == Rel::Eq) add_row(c.terms, c.rhs, false);
      if (c.rel == Rel::Ge || c.rel == Rel::Eq) add_row(c.terms, c.rhs, true);
    }
    detect_gadgets();
    // neutral block state: one pre-touched block, classic bound bookkeeping
    block_of_.assign(n_, 0);
    block_v_ = {0};
    block_negs_ = {0};
    block_touched_ = {1};
    untouched_v_sum_ = 0;
  }

  // Root propagation: rows that force values with nothing fixed yet
  // (e.g. single-variable bounds) and immediate contradictions.
  void propagate_root() {
    for (size_t r = 0; r < rows_.size(); ++r)
      if (!propagate_row(static_cast<int>(r))) {
        conflict_at_root_ = true;
        return;
      }
    if (!drain_pending()) conflict_at_root_ = true;
  }

  void prepare_block_bounds() {
    std::vector<int> parent(n_);
    for (int i = 0; i < n_; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (size_t r = 0; r < rows_.size(); ++r) {
      if (row_is_gadget_[r] || rows_[r].terms.empty()) continue;
      for (size_t i = 1; i < rows_[r].terms.size(); ++i)
        parent[find(rows_[r].terms[i].var)] = find(rows_[r].terms[0].var);
    }
    std::vector<int> block_id(n_, -1);
    int nblocks = 0;
    for (int v = 0; v < n_; ++v) {
      int root = find(v);
      if (block_id[root] < 0) block_id[root] = nblocks++;
      block_id[v] = block_id[root];
    }
    // only worth the bookkeeping when several row-bearing blocks exist
    std::vector<int> rows_in_block(nblocks, 0);
    for (size_t r = 0; r < rows_.size(); ++r)
      if (!row_is_gadget_[r] && !rows_[r].terms.empty())
        ++rows_in_block[block_id[rows_[r].terms[0].var]];
    int nontrivial = 0;
    for (int c : rows_in_block)
      if (c > 0) ++nontrivial;
    if (nontrivial <= 1) return;

    std::vector<std::vector<int>> block_vars(nblocks);
    for (int v = 0; v < n_; ++v) block_vars[block_id[v]].push_back(v);
    std::vector<std::vector<int>> block_gadgets(nblocks);
    std::vector<bool> aux_internal(n_, false);
    for (size_t gi = 0; gi < gadgets_.size(); ++gi) {
      const Gadget& g = gadgets_[gi];
      if (block_id[g.plus] == block_id[g.minus])
        block_gadgets[block_id[g.plus]].push_back(static_cast<int>(gi));
    }

    block_of_ = block_id;
    block_negs_.assign(nblocks, 0);
    block_v_.assign(nblocks, 0);
    block_touched_.assign(nblocks, 0);
    for (int v = 0; v < n_; ++v)
      block_negs_[block_id[v]] += std::min<count_t>(0, obj_coef_[v]);

    for (int b = 0; b < nblocks; ++b) {
      if (block_vars[b].size() <= 1 && rows_in_block[b] == 0) {
        block_v_[b] = block_negs_[b];
        continue;
      }
      // exact internal minimum: block rows plus gadgets fully inside,
      // cross-block gadget rows dropped (a pure relaxation)
      IlpProblem sub;
      std::vector<int> to_sub(n_, -1);
      for (int v : block_vars[b]) {
        to_sub[v] = sub.add_var(problem_.var_names[v]);
        sub.add_objective_term(to_sub[v], obj_coef_[v]);
      }
      for (int gi : block_gadgets[b]) {
        const Gadget& g = gadgets_[gi];
        if (to_sub[g.aux] < 0) {
          to_sub[g.aux] = sub.add_var(problem_.var_names[g.aux]);
          sub.add_objective_term(to_sub[g.aux], obj_coef_[g.aux]);
        }
      }
      for (size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].terms.empty()) continue;
        bool inside = true;
        for (const auto& t : rows_[r].terms)
          if (to_sub[t.var] < 0) inside = false;
        if (!inside) continue;
        std::vector<Term> terms;
        for (const auto& t : rows_[r].terms)
          terms.push_back({to_sub[t.var], t.coef});
        sub.add_constraint(std::move(terms), Rel::Le, rows_[r].rhs);
      }
      if (deadline_) {
        double left = std::chrono::duration<double>(*deadline_ - Clock::now())
                          .count();
        if (left <= 0) {
          timed_out_ = true;
          return;
        }
        sub.time_limit_seconds = left;
      } else {
        sub.time_limit_seconds.reset();
      }
      Solver inner(sub, /*enable_block_bound=*/false);
      IlpOutcome out = inner.run();
      if (out.status == Status::Infeasible) {
        conflict_at_root_ = true;
        return;
      }
      if (out.status == Status::TimedOut) {
        timed_out_ = true;
        return;
      }
      block_v_[b] = out.objective_value;  // sub has no offset
    }
    neg_slack_ = 0;
    untouched_v_sum_ = 0;
    for (int b = 0; b < nblocks; ++b) untouched_v_sum_ += block_v_[b];
  }

  void check_var(int v) const {
    if (v < 0 || v >= n_)
      fail(ErrorKind::InvalidInput, "ILP references an undeclared variable");
  }

  // A gadget row has shape x_p - x_m - x_t <= 0 with distinct vars. The aux
  // slot goes to a variable with positive objective weight appearing in
  // exactly two rows; anything ambiguous is skipped (only weakens the bound).
  void detect_gadgets() {
    row_is_gadget_.assign(rows_.size(), false);
    std::vector<int> row_count(n_, 0);
    for (const auto& row : rows_)
      for (const auto& t : row.terms) ++row_count[t.var];
    for (size_t r = 0; r < rows_.size(); ++r) {
      const Row& row = rows_[r];
      if (row.rhs != 0 || row.terms.size() != 3) continue;
      int plus = -1, m1 = -1, m2 = -1;
      bool shape = true;
      for (const auto& t : row.terms) {
        if (t.coef == 1 && plus < 0) plus = t.var;
        else if (t.coef == -1 && m1 < 0) m1 = t.var;
        else if (t.coef == -1 && m2 < 0) m2 = t.var;
        else shape = false;
      }
      if (!shape || plus < 0 || m1 < 0 || m2 < 0) continue;
      auto is_aux = [&](int v) {
        return obj_coef_[v] > 0 && row_count[v] == 2;
      };
      int aux, minus;
      if (is_aux(m2) && !is_aux(m1)) aux = m2, minus = m1;
      else if (is_aux(m1) && !is_aux(m2)) aux = m1, minus = m2;
      else if (is_aux(m1) && is_aux(m2)) aux = std::max(m1, m2), minus = std::min(m1, m2);
      else continue;
      Gadget g;
      g.plus = plus;
      g.minus = minus;
      g.aux = aux;
      g.weight = obj_coef_[aux];
      int idx = static_cast<int>(gadgets_.size());
      gadgets_.push_back(g);
      var_gadgets_[plus].push_back(idx);
      var_gadgets_[minus].push_back(idx);
      var_gadgets_[aux].push_back(idx);
      row_is_gadget_[r] = true;
    }
  }

  count_t lower_bound() const {
    return problem_.objective_offset + fixed_obj_ + neg_slack_ + frontier_ +
           untouched_v_sum_;
  }

  bool fixed(int v) const { return value_[v] >= 0; }

  // -- trail helpers ---------------------------------------------------

  void set_charge(int gi, int var, int val, count_t amount) {
    Gadget& g = gadgets_[gi];
    if (g.charged_var == var && g.charged_val == val && g.charged == amount)
      return;
    trail_.push_back({TrailKind::Charge, gi, g.charged, g.charged_var,
                      g.charged_val});
    if (g.charged_var >= 0 && !fixed(g.charged_var))
      adjust_pen(g.charged_var, g.charged_val, -g.charged);
    g.charged_var = var;
    g.charged_val = val;
    g.charged = amount;
    if (var >= 0 && !fixed(var)) adjust_pen(var, val, amount);
  }

  void adjust_pen(int var, int val, count_t delta) {
    count_t before = std::min(pen_[0][var], pen_[1][var]);
    pen_[val][var] += delta;
    count_t after = std::min(pen_[0][var], pen_[1][var]);
    frontier_ += after - before;
  }

  // Re-derive the frontier charge a gadget row should carry given current
  // fixings: with p=1 and m,t open, m:=0 would entail t=1; with m=0 and p,t
  // open, p:=1 would entail t=1.
  void refresh_gadget(int gi) {
    const Gadget& g = gadgets_[gi];
    if (!fixed(g.aux)) {
      if (fixed(g.plus) && value_[g.plus] == 1 && !fixed(g.minus)) {
        set_charge(gi, g.minus, 0, g.weight);
        return;
      }
      if (fixed(g.minus) && value_[g.minus] == 0 && !fixed(g.plus)) {
        set_charge(gi, g.plus, 1, g.weight);
        return;
      }
    }
    set_charge(gi, -1, 0, 0);
  }

  bool fix(int v, int val) {
    if (fixed(v)) return value_[v] == val;
    trail_.push_back({TrailKind::Fix, v, 0, 0, 0});
    int blk = block_of_[v];
    if (block_touched_[blk]++ == 0) {
      // block enters the search: swap its exact bound for live bookkeeping
      untouched_v_sum_ -= block_v_[blk];
      neg_slack_ += block_negs_[blk];
    }
    // remove v's pending frontier contribution
    frontier_ -= std::min(pen_[0][v], pen_[1][v]);
    value_[v] = static_cast<std::int8_t>(val);
    fixed_obj_ += obj_coef_[v] * val;
    if (obj_coef_[v] < 0) neg_slack_ -= obj_coef_[v];
    bool ok = true;
    for (const auto& t : columns_[v]) {
      Row& row = rows_[t.var];
      row.min_activity += t.coef * val - std::min<count_t>(0, t.coef);
      --row.unfixed;
      if (row.min_activity > row.rhs) ok = false;
    }
    for (int gi : var_gadgets_[v]) refresh_gadget(gi);
    if (!ok) return false;
    for (const auto& t : columns_[v])
      if (!propagate_row(t.var)) return false;
    return true;
  }

  // Bound propagation on one <= row: force any unfixed variable whose wrong
  // value would overshoot the rhs.
  bool propagate_row(int r) {
    Row& row = rows_[r];
    count_t slack = row.rhs - row.min_activity;
    if (slack < 0) return false;
    if (row.unfixed == 0 || row.max_abs_coef <= slack) return true;
    for (const auto& t : row.terms) {
      if (fixed(t.var)) continue;
      if (t.coef > slack) pending_.push_back(~t.var);        // force 0
      else if (-t.coef > slack) pending_.push_back(t.var);   // force 1
    }
    return true;
  }

  bool drain_pending() {
    while (!pending_.empty()) {
      int code = pending_.back();
      pending_.pop_back();
      int v = code >= 0 ? code : ~code;
      int val = code >= 0 ? 1 : 0;
      if (fixed(v)) {
        if (value_[v] != val) return false;
        continue;
      }
      if (!fix(v, val)) return false;
    }
    return true;
  }

  void undo_to(size_t mark) {
    while (trail_.size() > mark) {
      TrailEntry e = trail_.back();
      trail_.pop_back();
      if (e.kind == TrailKind::Fix) {
        int v = e.a;
        int val = value_[v];
        for (const auto& t : columns_[v]) {
          Row& row = rows_[t.var];
          row.min_activity -= t.coef * val - std::min<count_t>(0, t.coef);
          ++row.unfixed;
        }
        fixed_obj_ -= obj_coef_[v] * val;
        if (obj_coef_[v] < 0) neg_slack_ += obj_coef_[v];
        value_[v] = -1;
        frontier_ += std::min(pen_[0][v], pen_[1][v]);
        int blk = block_of_[v];
        if (--block_touched_[blk] == 0) {
          neg_slack_ -= block_negs_[blk];
          untouched_v_sum_ += block_v_[blk];
        }
      } else {
        Gadget& g = gadgets_[e.a];
        if (g.charged_var >= 0 && !fixed(g.charged_var))
          adjust_pen(g.charged_var, g.charged_val, -g.charged);
        g.charged = e.b;
        g.charged_var = e.c;
        g.charged_val = e.d;
        if (g.charged_var >= 0 && !fixed(g.charged_var))
          adjust_pen(g.charged_var, g.charged_val, g.charged);
      }
    }
  }

  bool out_of_time() {
    if (!deadline_) return false;
    if ((nodes_ & 0xFFF) == 0 && Clock::now() > *deadline_) timed_out_ = true;
    return timed_out_;
  }

  void record_incumbent() {
    count_t v = problem_.objective_offset + fixed_obj_;
    if (have_incumbent_ && v >= best_value_) return;
    have_incumbent_ = true;
    best_value_ = v;
    best_assignment_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) best_assignment_[i] = value_[i] == 1;
  }

  void dfs(int from) {
    ++nodes_;
    if (out_of_time()) return;
    if (have_incumbent_ && lower_bound() >= best_value_) return;
    int v = from;
    while (v < n_ && fixed(v)) ++v;
    if (v == n_) {
      record_incumbent();
      return;
    }
    for (int val : {0, 1}) {
      size_t mark = trail_.size();
      pending_.clear();
      if (fix(v, val) && drain_pending()) dfs(v + 1);
      undo_to(mark);
      if (timed_out_) return;
    }
  }
};

}  // namespace detail

namespace detail {

inline IlpOutcome solve_single(const IlpProblem& problem) {
  Solver solver(problem);
  return solver.run();
}

}  // namespace detail

// Exact, deterministic solve. Among equal-objective optima the returned
// assignment is the lexicographically smallest under declared variable order.
//
// Variables that never share a constraint row are independent, so the
// instance first splits into connected components solved separately; the
// later partitioning iterations are block-diagonal in exactly this way and
// would otherwise multiply each region's search space into the others'.
// Per-block lexicographic minima compose into the global one because the
// optimum set of a separable objective is the product of the block optima.
inline IlpOutcome solve(const IlpProblem& problem) {
  int n = problem.num_vars();
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : problem.constraints) {
    for (const auto& t : c.terms)
      if (t.var < 0 || t.var >= n)
        fail(ErrorKind::InvalidInput, "ILP references an undeclared variable");
    for (size_t i = 1; i < c.terms.size(); ++i)
      parent[find(c.terms[i].var)] = find(c.terms[0].var);
  }
  std::vector<std::vector<int>> blocks;
  {
    std::vector<int> block_of(n, -1);
    for (int v = 0; v < n; ++v) {
      int root = find(v);
      if (block_of[root] < 0) {
        block_of[root] = static_cast<int>(blocks.size());
        blocks.emplace_back();
      }
      blocks[block_of[root]].push_back(v);
    }
  }
  if (blocks.size() <= 1) return detail::solve_single(problem);

  std::vector<count_t> obj_coef(n, 0);
  for (const auto& t : problem.objective) {
    if (t.var < 0 || t.var >= n)
      fail(ErrorKind::InvalidInput, "ILP references an undeclared variable");
    obj_coef[t.var] += t.coef;
  }
  std::vector<int> row_block;  // constraint -> block
  row_block.reserve(problem.constraints.size());
  std::vector<int> block_of_var(n, 0);
  for (size_t b = 0; b < blocks.size(); ++b)
    for (int v : blocks[b]) block_of_var[v] = static_cast<int>(b);
  for (const auto& c : problem.constraints)
    row_block.push_back(c.terms.empty() ? -1
                                        : block_of_var[c.terms[0].var]);

  IlpOutcome out;
  out.status = Status::Optimal;
  out.assignment.assign(n, 0);
  out.objective_value = problem.objective_offset;
  // constraints with no terms: vacuous or plainly impossible
  for (size_t ci = 0; ci < problem.constraints.size(); ++ci) {
    if (row_block[ci] >= 0) continue;
    const auto& c = problem.constraints[ci];
    bool ok = c.rel == Rel::Le ? 0 <= c.rhs
              : c.rel == Rel::Ge ? 0 >= c.rhs
                                 : c.rhs == 0;
    if (!ok) {
      out.status = Status::Infeasible;
      out.assignment.clear();
      return out;
    }
  }

  std::vector<int> block_rows(blocks.size(), 0);
  for (int rb : row_block)
    if (rb >= 0) ++block_rows[rb];

  auto deadline_total = problem.time_limit_seconds;
  auto started = std::chrono::steady_clock::now();
  for (size_t b = 0; b < blocks.size(); ++b) {
    const auto& vars = blocks[b];
    if (vars.size() == 1 && block_rows[b] == 0) {
      // unconstrained singleton: objective sign decides, ties to 0
      if (obj_coef[vars[0]] < 0) {
        out.assignment[vars[0]] = 1;
        out.objective_value += obj_coef[vars[0]];
      }
      continue;
    }
    IlpProblem sub;
    std::vector<int> to_sub(n, -1);
    for (int v : vars) to_sub[v] = sub.add_var(problem.var_names[v]);
    for (size_t ci = 0; ci < problem.constraints.size(); ++ci) {
      if (row_block[ci] != static_cast<int>(b)) continue;
      const auto& c = problem.constraints[ci];
      std::vector<Term> terms;
      terms.reserve(c.terms.size());
      for (const auto& t : c.terms) terms.push_back({to_sub[t.var], t.coef});
      sub.add_constraint(std::move(terms), c.rel, c.rhs);
    }
    for (int v : vars) sub.add_objective_term(to_sub[v], obj_coef[v]);
    if (deadline_total) {
      double used = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - started)
                        .count();
      sub.time_limit_seconds = std::max(0.0, *deadline_total - used);
    } else {
      sub.time_limit_seconds.reset();
    }
    IlpOutcome sub_out = detail::solve_single(sub);
    if (sub_out.status != Status::Optimal) {
      out.status = sub_out.status;
      out.assignment.clear();
      out.objective_value = 0;
      return out;
    }
    for (int v : vars) out.assignment[v] = sub_out.assignment[to_sub[v]];
    out.objective_value += sub_out.objective_value;
  }
  return out;
}

// Debug dump in the LP text format, for cross-checking instances against
// external solvers.
inline void write_lp(const IlpProblem& p, std::ostream& os) {
  auto name = [&](int v) {
    return p.var_names[v].empty() ? "x" + std::to_string(v) : p.var_names[v];
  };
  os << "Minimize\n obj:";
  for (const auto& t : p.objective) {
    os << (t.coef >= 0 ? " + " : " - ") << std::abs(t.coef) << " " << name(t.var);
  }
  if (p.objective_offset != 0)
    os << (p.objective_offset >= 0 ? " + " : " - ") << std::abs(p.objective_offset);
  os << "\nSubject To\n";
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    os << " c" << i << ":";
    if (c.terms.empty()) os << " 0";
    for (const auto& t : c.terms)
      os << (t.coef >= 0 ? " + " : " - ") << std::abs(t.coef) << " " << name(t.var);
    switch (c.rel) {
      case Rel::Le: os << " <= "; break;
      case Rel::Ge: os << " >= "; break;
      case Rel::Eq: os << " = "; break;
    }
    os << c.rhs << "\n";
  }
  os << "Binaries\n";
  for (int v = 0; v < p.num_vars(); ++v) os << " " << name(v);
  os << "\nEnd\n";
}

}  // namespace gridflow::ilp
