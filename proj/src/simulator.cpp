#include "sliced/simulator.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "sliced/error.hpp"

namespace sliced {

namespace {

Column var_column(const MachineVar& v) { return {v.name, v.labels, v.boolean, true}; }

std::string describe(const MachineVar& v, long value) { return format_value(var_column(v), value); }

}  // namespace

Trace simulate(const CompositeMachine& m, const Script& script, std::size_t horizon) {
  const auto& vars = m.vars();
  for (const auto& [step, assignment] : script) {
    for (const auto& [name, value] : assignment) {
      if (!m.find_var(name)) {
        throw Error(ErrorKind::UnknownVariable,
                    "script step " + std::to_string(step) + ": '" + name + "' is not a state variable");
      }
    }
  }
  auto scripted = [&](std::size_t step, const std::string& name) -> std::optional<long> {
    auto s = script.find(step);
    if (s == script.end()) return std::nullopt;
    auto it = s->second.find(name);
    if (it == s->second.end()) return std::nullopt;
    return it->second;
  };

  State s(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const MachineVar& v = vars[i];
    if (auto value = scripted(0, v.name)) {
      if (!std::binary_search(v.initial.begin(), v.initial.end(), *value)) {
        throw Error(ErrorKind::ScriptConflict,
                    "step 0: " + v.name + " cannot start as " + describe(v, *value));
      }
      s[i] = *value;
    } else if (v.initial.size() == 1) {
      s[i] = v.initial.front();
    } else {
      throw Error(ErrorKind::UnresolvedChoice, "step 0: initial value of " + v.name + " is not scripted");
    }
  }

  std::vector<State> path{s};
  for (std::size_t k = 1; k <= horizon; ++k) {
    const State& cur = path.back();
    auto opts = m.options(cur, m.evaluate_defines(cur));
    State next(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const MachineVar& v = vars[i];
      auto has = [&](long value) {
        return std::any_of(opts[i].begin(), opts[i].end(), [&](const Option& o) { return o.value == value; });
      };
      if (auto value = scripted(k, v.name)) {
        if (!has(*value)) {
          throw Error(ErrorKind::ScriptConflict,
                      "step " + std::to_string(k) + ": " + v.name + " cannot become " + describe(v, *value));
        }
        next[i] = *value;
      } else if (opts[i].size() == 1) {
        next[i] = opts[i].front().value;
      } else if (has(cur[i])) {
        next[i] = cur[i];
      } else {
        throw Error(ErrorKind::UnresolvedChoice,
                    "step " + std::to_string(k) + ": " + v.name + " has " + std::to_string(opts[i].size()) +
                        " options and the script picks none");
      }
    }
    path.push_back(std::move(next));
  }
  return m.make_trace(path, TraceKind::Simulation);
}

Script parse_script(const std::string& json_text, const CompositeMachine& m) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Syntax, std::string("script: ") + e.what());
  }
  const nlohmann::json& steps = doc.contains("steps") ? doc["steps"] : doc;
  if (!steps.is_object()) throw Error(ErrorKind::Semantic, "script: expected an object of steps");
  Script script;
  for (const auto& [key, assignment] : steps.items()) {
    std::size_t step = 0;
    try {
      step = static_cast<std::size_t>(std::stoul(key));
    } catch (...) {
      throw Error(ErrorKind::Semantic, "script: step key '" + key + "' is not an index");
    }
    if (!assignment.is_object()) throw Error(ErrorKind::Semantic, "script: step " + key + " is not an object");
    for (const auto& [name, value] : assignment.items()) {
      auto idx = m.find_var(name);
      if (!idx) throw Error(ErrorKind::UnknownVariable, "script: '" + name + "' is not a state variable");
      Column col = var_column(m.vars()[*idx]);
      std::optional<long> parsed;
      if (value.is_boolean()) {
        parsed = value.get<bool>() ? 1 : 0;
      } else if (value.is_number_integer()) {
        parsed = value.get<long>();
      } else if (value.is_string()) {
        parsed = parse_value(col, value.get<std::string>());
      }
      if (!parsed) throw Error(ErrorKind::Semantic, "script: bad value for '" + name + "' at step " + key);
      script[step][name] = *parsed;
    }
  }
  return script;
}

Script extract_script(const CompositeMachine& m, const Trace& t) {
  const auto& vars = m.vars();
  std::vector<std::size_t> col(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto c = t.column_index(vars[i].name);
    if (!c) throw Error(ErrorKind::UnknownVariable, "trace lacks variable '" + vars[i].name + "'");
    col[i] = *c;
  }
  Script script;
  State prev;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    State s(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) s[i] = t.steps[k][col[i]];
    if (k == 0) {
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].initial.size() > 1) script[0][vars[i].name] = s[i];
      }
    } else {
      auto opts = m.options(prev, m.evaluate_defines(prev));
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (opts[i].size() > 1) script[k][vars[i].name] = s[i];
      }
    }
    prev = std::move(s);
  }
  return script;
}

namespace {

// How one trace column is read off a machine state.
struct Probe {
  std::size_t column = 0;
  Expr expr;  // linked against m
  const std::vector<std::string>* machine_labels = nullptr;
};

long trace_value(const Trace& t, std::size_t step, const Probe& p) {
  long raw = t.steps[step][p.column];
  const Column& c = t.columns[p.column];
  if (!c.labels.empty() && p.machine_labels && !p.machine_labels->empty()) {
    const std::string& label = c.labels.at(static_cast<std::size_t>(raw));
    auto it = std::find(p.machine_labels->begin(), p.machine_labels->end(), label);
    if (it == p.machine_labels->end()) return -1;
    return it - p.machine_labels->begin();
  }
  return raw;
}

}  // namespace

ReplicationReport replay(const CompositeMachine& m, const Trace& t, const std::vector<MergeRecord>& merges,
                         std::size_t cap) {
  ReplicationReport r;
  r.steps = t.steps.size();
  if (t.steps.empty()) throw Error(ErrorKind::Semantic, "empty trace");

  std::vector<MergeRecord> records = merges.empty() ? m.merges : merges;
  std::vector<Probe> probes;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    const std::string& name = t.columns[c].name;
    Probe p;
    p.column = c;
    if (auto v = m.find_var(name)) {
      p.expr = Expr::var(*v, name);
      p.machine_labels = &m.vars()[*v].labels;
    } else if (auto d = m.find_define(name)) {
      p.expr = Expr::define(*d, name);
    } else {
      bool mapped = false;
      for (const MergeRecord& rec : records) {
        if (name != rec.merged + ".draw") continue;
        std::vector<Expr> parts;
        for (const std::string& sink : rec.sinks) parts.push_back(Expr::ref(sink + ".draw"));
        Expr sum = parts.size() == 1 ? parts.front() : Expr::nary(Op::Add, parts);
        p.expr = m.resolve(sum);
        mapped = true;
      }
      if (!mapped) {
        r.unmapped_columns.push_back(name);
        continue;
      }
    }
    probes.push_back(std::move(p));
  }
  r.compared_columns = probes.size();

  bool full = std::all_of(m.vars().begin(), m.vars().end(),
                          [&](const MachineVar& v) { return t.column_index(v.name).has_value(); });

  auto matches = [&](const State& s, const std::vector<long>& defines, std::size_t step) {
    for (const Probe& p : probes) {
      if (eval_expr(p.expr, s, defines) != trace_value(t, step, p)) return false;
    }
    return true;
  };

  std::vector<State> path;
  if (full) {
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      State s(m.vars().size());
      for (const Probe& p : probes) {
        if (p.expr.op == Op::Var) s[static_cast<std::size_t>(p.expr.value)] = trace_value(t, k, p);
      }
      bool legal = k == 0 ? m.is_initial(s) : m.is_successor(path.back(), s);
      if (!legal) {
        r.illegal_step = k;
        return r;
      }
      path.push_back(std::move(s));
    }
    Trace relabelled = m.make_trace(path, t.kind);
    Trace sim = simulate(m, extract_script(m, relabelled), t.steps.size() - 1);
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      const State& s = path[k];
      State simulated(m.vars().size());
      for (std::size_t i = 0; i < m.vars().size(); ++i) {
        simulated[i] = sim.steps[k][*sim.column_index(m.vars()[i].name)];
      }
      std::vector<long> defines = m.evaluate_defines(simulated);
      for (const Probe& p : probes) {
        long expected = trace_value(t, k, p);
        long actual = eval_expr(p.expr, simulated, defines);
        if (expected != actual) r.mismatches.push_back({k, t.columns[p.column].name, expected, actual});
      }
      (void)s;
    }
    r.simulation = std::move(sim);
    r.replicated = r.mismatches.empty();
    return r;
  }

  // Layered search for a path agreeing with every mapped column.
  std::vector<std::map<State, std::size_t>> levels;  // state -> parent position in previous level
  std::vector<std::vector<const State*>> order;
  std::size_t total = 0;
  levels.emplace_back();
  order.emplace_back();
  for (const State& s : m.initial_states()) {
    if (!matches(s, m.evaluate_defines(s), 0)) continue;
    auto [it, inserted] = levels[0].emplace(s, 0);
    if (inserted) order[0].push_back(&it->first);
  }
  if (order[0].empty()) {
    r.illegal_step = 0;
    return r;
  }
  for (std::size_t k = 1; k < t.steps.size(); ++k) {
    levels.emplace_back();
    order.emplace_back();
    for (std::size_t pi = 0; pi < order[k - 1].size(); ++pi) {
      for (const State& next : m.successors(*order[k - 1][pi])) {
        if (!matches(next, m.evaluate_defines(next), k)) continue;
        auto [it, inserted] = levels[k].emplace(next, pi);
        if (inserted) {
          order[k].push_back(&it->first);
          if (++total > cap) throw Error(ErrorKind::Semantic, "replay search exceeded the state cap");
        }
      }
    }
    if (order[k].empty()) {
      r.illegal_step = k;
      return r;
    }
  }
  std::size_t at = 0;
  path.assign(t.steps.size(), {});
  for (std::size_t k = t.steps.size(); k-- > 0;) {
    const State& s = *order[k][at];
    path[k] = s;
    at = levels[k].at(s);
  }
  r.simulation = m.make_trace(path, TraceKind::Simulation);
  r.replicated = true;
  return r;
}

std::string format_report(const ReplicationReport& r) {
  std::ostringstream out;
  if (r.illegal_step) {
    out << "IllegalStep: state 1." << (*r.illegal_step + 1) << " is not reachable from the previous state\n";
  }
  out << "steps: " << r.steps << "\n";
  out << "compared columns: " << r.compared_columns << "\n";
  if (!r.unmapped_columns.empty()) {
    out << "unmapped columns:";
    for (const std::string& c : r.unmapped_columns) out << " " << c;
    out << "\n";
  }
  for (const Mismatch& mm : r.mismatches) {
    out << "mismatch at state 1." << (mm.step + 1) << ": " << mm.column << " expected " << mm.expected
        << " got " << mm.actual << "\n";
  }
  out << (r.replicated ? "replicated\n" : "not replicated\n");
  return out.str();
}

}  // namespace sliced
