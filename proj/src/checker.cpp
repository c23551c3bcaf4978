#include "sliced/checker.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "sliced/error.hpp"

namespace sliced {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Verified: return "Verified";
    case Outcome::Falsified: return "Falsified";
    case Outcome::BoundExhausted: return "BoundExhausted";
    case Outcome::CapExceeded: return "CapExceeded";
  }
  return "?";
}

bool is_invariant_form(const Expr& f) {
  return f.op == Op::Globally && !f.args[0].is_temporal();
}

bool is_liveness_form(const Expr& f) {
  return f.op == Op::Globally && f.args[0].op == Op::Finally && !f.args[0].args[0].is_temporal();
}

namespace {

bool has_temporal(const Expr& e) {
  if (e.is_temporal()) return true;
  return std::any_of(e.args.begin(), e.args.end(), has_temporal);
}

SearchSpace machine_space(const CompositeMachine& m) {
  SearchSpace space;
  for (const MachineVar& v : m.vars()) space.domains.push_back(v.domain);
  space.initial = m.initial_states();
  space.successors = [&m](const std::vector<long>& s, std::vector<std::vector<long>>& out) {
    out = m.successors(s);
  };
  return space;
}

Trace trace_of(const CompositeMachine& m, const BfsResult& r, const std::vector<std::size_t>& path,
               TraceKind kind, std::optional<std::size_t> loop_start = std::nullopt) {
  std::vector<State> states;
  for (std::size_t i : path) {
    State s = r.state(i);
    s.resize(m.vars().size());
    states.push_back(std::move(s));
  }
  return m.make_trace(states, kind, loop_start);
}

Expr state_predicate(const CompositeMachine& m, const Expr& e) {
  if (has_temporal(e)) {
    throw Error(ErrorKind::UnsupportedConstruct, "nested temporal operator in '" + print_expr(e) + "'");
  }
  return m.resolve(e);
}

}  // namespace

Verdict check_invariant(const CompositeMachine& m, const Assertion& a, const CheckOptions& options) {
  if (!is_invariant_form(a.formula)) {
    throw Error(ErrorKind::UnsupportedConstruct, "not of the form G p: " + print_expr(a.formula));
  }
  Expr p = state_predicate(m, a.formula.args[0]);
  BfsResult r = bfs(
      machine_space(m), [&](const std::vector<long>& s) { return m.eval(p, s) == 0; },
      {options.cap, options.backend, false});
  Verdict v;
  v.stats = r.stats;
  switch (r.stop) {
    case BfsResult::Stop::Goal:
      v.outcome = Outcome::Falsified;
      v.trace = trace_of(m, r, r.path_to(*r.goal), TraceKind::Counterexample);
      break;
    case BfsResult::Stop::Cap: v.outcome = Outcome::CapExceeded; break;
    case BfsResult::Stop::Exhausted: v.outcome = Outcome::Verified; break;
  }
  return v;
}

Verdict check_liveness_bounded(const CompositeMachine& m, const Assertion& a, long bound,
                               const CheckOptions& options) {
  if (!is_liveness_form(a.formula)) {
    throw Error(ErrorKind::UnsupportedConstruct, "not of the form G F q: " + print_expr(a.formula));
  }
  if (bound < 1) throw Error(ErrorKind::Semantic, "liveness bound must be at least 1");
  Expr q = state_predicate(m, a.formula.args[0].args[0]);
  BfsResult r = bfs(machine_space(m), nullptr, {options.cap, options.backend, true});
  Verdict v;
  v.stats = r.stats;
  v.bound = bound;
  if (r.stop == BfsResult::Stop::Cap) {
    v.outcome = Outcome::CapExceeded;
    return v;
  }

  const std::size_t n = r.size();
  std::vector<char> bad(n);
  for (std::size_t i = 0; i < n; ++i) bad[i] = m.eval(q, r.state(i)) == 0;

  // Tarjan over the subgraph of states where q fails.
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, none), low(n, 0), comp(n, none);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, comps = 0;
  struct Frame {
    std::size_t node;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (!bad[root] || index[root] != none) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& out = r.edges[f.node];
      if (f.edge < out.size()) {
        std::size_t w = out[f.edge++];
        if (!bad[w]) continue;
        if (index[w] == none) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      std::size_t node = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[node]);
      if (low[node] == index[node]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = comps;
        } while (w != node);
        ++comps;
      }
    }
  }
  std::vector<std::size_t> comp_size(comps, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] != none) ++comp_size[comp[i]];
  }
  std::vector<std::size_t> cyclic;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] == none) continue;
    bool self = std::binary_search(r.edges[i].begin(), r.edges[i].end(), i);
    if (comp_size[comp[i]] > 1 || self) cyclic.push_back(i);
  }
  if (cyclic.empty()) {
    v.outcome = Outcome::Verified;
    return v;
  }
  std::stable_sort(cyclic.begin(), cyclic.end(),
                   [&](std::size_t x, std::size_t y) { return r.depth[x] < r.depth[y]; });

  // Shortest cycle through each candidate inside its component.
  std::size_t best_len = none, best_node = none;
  std::vector<std::size_t> best_cycle;
  std::vector<std::size_t> prev(n, none);
  for (std::size_t start : cyclic) {
    if (best_len != none && r.depth[start] + 1 >= best_len) break;
    std::vector<std::size_t> touched;
    std::deque<std::size_t> queue{start};
    prev[start] = start;
    touched.push_back(start);
    bool closed = false;
    std::size_t closing = none;
    while (!queue.empty() && !closed) {
      std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t w : r.edges[u]) {
        if (comp[w] != comp[start]) continue;
        if (w == start) {
          closed = true;
          closing = u;
          break;
        }
        if (prev[w] != none) continue;
        prev[w] = u;
        touched.push_back(w);
        queue.push_back(w);
      }
    }
    if (closed) {
      std::vector<std::size_t> cycle;
      for (std::size_t at = closing; at != start; at = prev[at]) cycle.push_back(at);
      cycle.push_back(start);
      std::reverse(cycle.begin(), cycle.end());
      std::size_t len = r.depth[start] + cycle.size();
      if (len < best_len) {
        best_len = len;
        best_node = start;
        best_cycle = cycle;
      }
    }
    for (std::size_t t : touched) prev[t] = none;
  }
  if (best_len == none || best_len > static_cast<std::size_t>(bound)) {
    v.outcome = Outcome::BoundExhausted;
    return v;
  }
  std::vector<std::size_t> path = r.path_to(best_node);
  path.insert(path.end(), best_cycle.begin() + 1, best_cycle.end());
  v.outcome = Outcome::Falsified;
  v.trace = trace_of(m, r, path, TraceKind::Counterexample, r.depth[best_node]);
  return v;
}

Verdict find_plan(const CompositeMachine& m, const Assertion& a, const PlanOptions& options) {
  if (!is_invariant_form(a.formula)) {
    throw Error(ErrorKind::UnsupportedConstruct, "plan assertion must be G(!goal): " + print_expr(a.formula));
  }
  Expr never = state_predicate(m, a.formula.args[0]);
  std::optional<Expr> keep;
  if (options.keep) keep = state_predicate(m, *options.keep);
  const std::size_t nv = m.vars().size();

  SearchSpace space;
  for (const MachineVar& v : m.vars()) space.domains.push_back(v.domain);
  if (options.toggle_guard) {
    for (std::size_t i = 0; i < nv; ++i) space.domains.push_back({0, 1});
  }
  for (State s : m.initial_states()) {
    if (keep && !m.eval(*keep, s)) continue;
    if (options.toggle_guard) s.resize(2 * nv, 0);
    space.initial.push_back(std::move(s));
  }
  space.successors = [&](const std::vector<long>& ext, std::vector<std::vector<long>>& out) {
    out.clear();
    State s(ext.begin(), ext.begin() + static_cast<long>(nv));
    auto opts = m.options(s, m.evaluate_defines(s));
    std::vector<long> cursor(options.toggle_guard ? 2 * nv : nv, 0);
    std::function<void(std::size_t)> expand = [&](std::size_t i) {
      if (i == nv) {
        State next(cursor.begin(), cursor.begin() + static_cast<long>(nv));
        if (keep && !m.eval(*keep, next)) return;
        out.push_back(cursor);
        return;
      }
      for (const Option& o : opts[i]) {
        bool user = o.kind == ChoiceKind::UserAction;
        if (options.toggle_guard) {
          if (user && ext[nv + i]) continue;
          cursor[nv + i] = user ? 1 : 0;
        }
        cursor[i] = o.value;
        expand(i + 1);
      }
    };
    expand(0);
  };
  BfsResult r = bfs(
      space,
      [&](const std::vector<long>& ext) {
        State s(ext.begin(), ext.begin() + static_cast<long>(nv));
        return m.eval(never, s) == 0;
      },
      {options.cap, options.backend, false});
  Verdict v;
  v.stats = r.stats;
  switch (r.stop) {
    case BfsResult::Stop::Goal:
      v.outcome = Outcome::Falsified;
      v.trace = trace_of(m, r, r.path_to(*r.goal), TraceKind::Plan);
      break;
    case BfsResult::Stop::Cap: v.outcome = Outcome::CapExceeded; break;
    case BfsResult::Stop::Exhausted: v.outcome = Outcome::Verified; break;
  }
  return v;
}

Verdict check(const CompositeMachine& m, const Assertion& a, const CheckOptions& options) {
  if (is_liveness_form(a.formula)) return check_liveness_bounded(m, a, options.bound, options);
  return check_invariant(m, a, options);
}

}  // namespace sliced
