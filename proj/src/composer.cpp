#include "sliced/composer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "sliced/error.hpp"

namespace sliced {

CyclicClock clock_config(const std::set<long>& periods) {
  if (periods.empty()) throw Error(ErrorKind::MissingClock, "no periods to derive a clock from");
  long tick = 0;
  long cycle = 1;
  for (long p : periods) {
    if (p <= 0) throw Error(ErrorKind::Semantic, "period " + std::to_string(p) + " is not positive");
    tick = std::gcd(tick, p);
    cycle = std::lcm(cycle, p);
  }
  return {tick, cycle};
}

namespace {

std::string channel_name(const Connection& c) {
  if (!c.line.empty()) return c.line;
  return c.source + "_" + c.sink + "_chan";
}

// Splits every capacity-annotated connection into producer -> channel -> consumer.
void insert_channels(std::vector<Instance>& instances, std::vector<Connection>& connections) {
  std::vector<Connection> out;
  for (const Connection& c : connections) {
    if (!c.capacity) {
      out.push_back(c);
      continue;
    }
    Instance chan = instantiate(channel_spec(), channel_name(c), {{"top", *c.capacity + 1}});
    chan.pseudo = true;
    instances.push_back(chan);
    out.push_back({c.source, c.source_port, chan.name, 1, c.line, std::nullopt});
    out.push_back({chan.name, 1, c.sink, c.sink_port, c.line, std::nullopt});
  }
  connections = std::move(out);
}

}  // namespace

CompositeMachine compose(std::vector<Instance> instances, std::vector<Connection> connections,
                         ComposeOptions options) {
  CompositeMachine m;
  m.source_instances_ = instances;
  m.source_connections_ = connections;
  m.options_ = options;

  insert_channels(instances, connections);

  std::stable_sort(instances.begin(), instances.end(),
                   [](const Instance& a, const Instance& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!m.instance_index_.emplace(instances[i].name, i).second) {
      throw Error(ErrorKind::DuplicateName, "instance '" + instances[i].name + "' declared twice");
    }
  }
  for (const Connection& c : connections) {
    if (!m.instance_index_.count(c.source)) {
      throw Error(ErrorKind::UnknownInstance, "connection source '" + c.source + "'");
    }
    if (!m.instance_index_.count(c.sink)) {
      throw Error(ErrorKind::UnknownInstance, "connection sink '" + c.sink + "'");
    }
  }

  // Upstream drivers.
  std::map<std::string, const Connection*> driver;
  for (const Connection& c : connections) {
    auto [it, inserted] = driver.emplace(c.sink, &c);
    if (!inserted && (it->second->source != c.source || it->second->source_port != c.source_port)) {
      throw Error(ErrorKind::MultipleDrivers, "instance '" + c.sink + "' is driven by both '" +
                                                  it->second->source + "' and '" + c.source + "'");
    }
  }

  // Free environment inputs for unbound upstream references.
  std::vector<Instance> env;
  for (const Instance& inst : instances) {
    auto fields = upstream_fields(*inst.spec);
    if (fields.empty() || driver.count(inst.name)) continue;
    Instance e = instantiate(environment_spec({fields.begin(), fields.end()}), inst.name + "_input", {});
    e.pseudo = true;
    connections.push_back({e.name, 1, inst.name, 1, "", std::nullopt});
    env.push_back(std::move(e));
  }
  for (Instance& e : env) instances.push_back(std::move(e));
  std::stable_sort(instances.begin(), instances.end(),
                   [](const Instance& a, const Instance& b) { return a.name < b.name; });
  m.instance_index_.clear();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!m.instance_index_.emplace(instances[i].name, i).second) {
      throw Error(ErrorKind::DuplicateName, "instance '" + instances[i].name + "' declared twice");
    }
  }

  m.wiring_.assign(instances.size(), {});
  {
    std::vector<const Connection*> sorted;
    for (const Connection& c : connections) sorted.push_back(&c);
    std::stable_sort(sorted.begin(), sorted.end(), [](const Connection* a, const Connection* b) {
      return std::tie(a->source, a->source_port, a->sink) < std::tie(b->source, b->source_port, b->sink);
    });
    std::set<std::pair<std::string, std::string>> seen;
    for (const Connection* c : sorted) {
      std::size_t src = m.instance_index_.at(c->source);
      std::size_t dst = m.instance_index_.at(c->sink);
      if (!seen.insert({c->source, c->sink}).second) continue;
      m.wiring_[dst].upstream = src;
      m.wiring_[src].downstream.push_back(dst);
    }
  }

  // Clock.
  std::set<long> periods;
  std::set<long> deadlines;
  for (Instance& inst : instances) {
    if (auto it = options.timing.find(inst.name); it != options.timing.end()) inst.period = it->second;
    if (inst.period) periods.insert(*inst.period);
    if (inst.deadline) deadlines.insert(*inst.deadline);
  }
  if (!periods.empty()) {
    CyclicClock c = clock_config(periods);
    for (long d : deadlines) c.tick = std::gcd(c.tick, d);
    m.clock_ = c;
  }

  // Variables and defines.
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    for (const VarSpec& v : inst.spec->vars) {
      MachineVar mv;
      mv.name = inst.name + "." + v.name;
      mv.instance = i;
      mv.local = v.name;
      mv.domain = var_domain(inst, v);
      mv.initial = var_initial(inst, v);
      mv.labels = v.domain.labels;
      mv.boolean = v.domain.boolean;
      m.var_index_.emplace(mv.name, m.vars_.size());
      m.vars_.push_back(std::move(mv));
      m.free_kind_.push_back(v.free_kind);
    }
    for (const OutputSpec& o : inst.spec->outputs) {
      MachineDefine d;
      d.name = inst.name + "." + o.name;
      d.instance = i;
      d.local = o.name;
      m.define_index_.emplace(d.name, m.defines_.size());
      m.defines_.push_back(std::move(d));
    }
  }
  if (m.clock_) {
    MachineVar clock;
    clock.name = "clock";
    clock.is_clock = true;
    for (long t = 0; t < m.clock_->cycle; t += m.clock_->tick) clock.domain.push_back(t);
    clock.initial = {0};
    m.var_index_.emplace(clock.name, m.vars_.size());
    m.vars_.push_back(std::move(clock));
    m.free_kind_.push_back(ChoiceKind::Deterministic);
  }

  auto field_binding = [&](std::size_t target, const std::string& field,
                           const std::string& where) -> std::optional<NameBinding> {
    const std::string key = instances[target].name + "." + field;
    if (auto it = m.var_index_.find(key); it != m.var_index_.end()) {
      const MachineVar& v = m.vars_[it->second];
      return NameBinding{Expr::var(it->second, key), v.labels.empty() ? nullptr : &v.labels};
    }
    if (auto it = m.define_index_.find(key); it != m.define_index_.end()) {
      return NameBinding{Expr::define(it->second, key), nullptr};
    }
    throw Error(ErrorKind::UnboundInput,
                where + ": '" + instances[target].name + "' provides no field '" + field + "'");
  };

  m.arms_.resize(m.vars_.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    const Wiring& w = m.wiring_[i];
    LinkContext ctx;
    ctx.arity = w.downstream.size();
    ctx.local = [&](const std::string& name) -> std::optional<NameBinding> {
      const std::string key = inst.name + "." + name;
      if (auto it = m.var_index_.find(key); it != m.var_index_.end()) {
        const MachineVar& v = m.vars_[it->second];
        return NameBinding{Expr::var(it->second, key), v.labels.empty() ? nullptr : &v.labels};
      }
      if (auto it = m.define_index_.find(key); it != m.define_index_.end()) {
        return NameBinding{Expr::define(it->second, key), nullptr};
      }
      if (auto it = inst.params.find(name); it != inst.params.end()) {
        return NameBinding{Expr::integer(it->second), nullptr};
      }
      if (name == "clock" && m.clock_) {
        return NameBinding{Expr::var(m.var_index_.at("clock"), "clock"), nullptr};
      }
      return std::nullopt;
    };
    ctx.upstream = [&](const std::string& field) -> std::optional<NameBinding> {
      if (!w.upstream) return std::nullopt;
      return field_binding(*w.upstream, field, inst.name);
    };
    ctx.downstream = [&](std::size_t k, const std::string& field) -> std::optional<NameBinding> {
      if (k == 0 || k > w.downstream.size()) return std::nullopt;
      return field_binding(w.downstream[k - 1], field, inst.name);
    };
    for (const OutputSpec& o : inst.spec->outputs) {
      std::size_t idx = m.define_index_.at(inst.name + "." + o.name);
      m.defines_[idx].expr = link_expr(o.expr, ctx, nullptr, m.defines_[idx].name);
    }
    for (const VarSpec& v : inst.spec->vars) {
      std::size_t idx = m.var_index_.at(inst.name + "." + v.name);
      const auto* labels = v.domain.labels.empty() ? nullptr : &v.domain.labels;
      for (const Transition& t : v.transitions) {
        LinkedArm arm;
        arm.guard = link_expr(t.guard, ctx, nullptr, m.vars_[idx].name);
        for (const Target& target : t.targets) {
          arm.values.push_back(link_expr(target.value, ctx, labels, m.vars_[idx].name));
          arm.kinds.push_back(target.kind);
        }
        m.arms_[idx].push_back(std::move(arm));
      }
    }
  }

  // Defines in dependency order.
  {
    std::vector<int> mark(m.defines_.size(), 0);
    std::vector<std::size_t> stack;
    std::function<void(std::size_t)> visit = [&](std::size_t d) {
      if (mark[d] == 2) return;
      if (mark[d] == 1) {
        std::string cycle;
        auto from = std::find(stack.begin(), stack.end(), d);
        for (auto it = from; it != stack.end(); ++it) cycle += m.defines_[*it].name + " -> ";
        cycle += m.defines_[d].name;
        throw Error(ErrorKind::CombinationalCycle, cycle);
      }
      mark[d] = 1;
      stack.push_back(d);
      std::function<void(const Expr&)> deps = [&](const Expr& e) {
        if (e.op == Op::Define) visit(static_cast<std::size_t>(e.value));
        for (const Expr& a : e.args) deps(a);
      };
      deps(m.defines_[d].expr);
      stack.pop_back();
      mark[d] = 2;
      m.define_order_.push_back(d);
    };
    for (std::size_t d = 0; d < m.defines_.size(); ++d) visit(d);
  }

  // Boolean typing of defines, in dependency order.
  for (std::size_t d : m.define_order_) {
    m.defines_[d].boolean = is_boolean_expr(m.defines_[d].expr, [&](const Expr& leaf) {
      if (leaf.op == Op::Var) return m.vars_[static_cast<std::size_t>(leaf.value)].boolean;
      if (leaf.op == Op::Define) return m.defines_[static_cast<std::size_t>(leaf.value)].boolean;
      return false;
    });
  }

  // Trace columns.
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (std::size_t v = 0; v < m.vars_.size(); ++v) {
      const MachineVar& mv = m.vars_[v];
      if (mv.is_clock || mv.instance != i) continue;
      m.columns_.push_back({mv.name, mv.labels, mv.boolean, true});
      m.column_source_.emplace_back(true, v);
    }
    for (std::size_t d = 0; d < m.defines_.size(); ++d) {
      if (m.defines_[d].instance != i) continue;
      m.columns_.push_back({m.defines_[d].name, {}, m.defines_[d].boolean, false});
      m.column_source_.emplace_back(false, d);
    }
  }
  if (m.clock_) {
    m.columns_.push_back({"clock", {}, false, true});
    m.column_source_.emplace_back(true, m.var_index_.at("clock"));
  }

  m.instances_ = std::move(instances);
  m.connections_ = std::move(connections);
  return m;
}

std::optional<std::size_t> CompositeMachine::find_instance(std::string_view name) const {
  auto it = instance_index_.find(name);
  if (it == instance_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> CompositeMachine::find_var(std::string_view name) const {
  auto it = var_index_.find(name);
  if (it == var_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> CompositeMachine::find_define(std::string_view name) const {
  auto it = define_index_.find(name);
  if (it == define_index_.end()) return std::nullopt;
  return it->second;
}

Expr CompositeMachine::resolve(const Expr& formula) const {
  NameLookup lookup = [this](const std::string& name) -> std::optional<NameBinding> {
    if (auto v = find_var(name)) {
      const MachineVar& mv = vars_[*v];
      return NameBinding{Expr::var(*v, name), mv.labels.empty() ? nullptr : &mv.labels};
    }
    if (auto d = find_define(name)) return NameBinding{Expr::define(*d, name), nullptr};
    return std::nullopt;
  };
  Expr linked = resolve_names(formula, lookup);
  auto leftover = collect_names(linked);
  if (!leftover.empty()) {
    throw Error(ErrorKind::UnknownVariable, "'" + leftover.front() + "' is not a variable of the machine");
  }
  std::function<void(const Expr&)> check_labels = [&](const Expr& e) {
    if (e.op == Op::Label && e.value < 0) {
      throw Error(ErrorKind::UnknownVariable, "'" + e.name + "' is not a state label here");
    }
    for (const Expr& a : e.args) check_labels(a);
  };
  check_labels(linked);
  return linked;
}

std::vector<State> CompositeMachine::initial_states() const {
  std::vector<State> out;
  State cursor(vars_.size());
  std::function<void(std::size_t)> expand = [&](std::size_t i) {
    if (i == vars_.size()) {
      out.push_back(cursor);
      return;
    }
    for (long v : vars_[i].initial) {
      cursor[i] = v;
      expand(i + 1);
    }
  };
  expand(0);
  return out;
}

bool CompositeMachine::is_initial(const State& s) const {
  if (s.size() != vars_.size()) return false;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (!std::binary_search(vars_[i].initial.begin(), vars_[i].initial.end(), s[i])) return false;
  }
  return true;
}

std::vector<long> CompositeMachine::evaluate_defines(const State& s) const {
  std::vector<long> defines(defines_.size(), 0);
  for (std::size_t d : define_order_) defines[d] = eval_expr(defines_[d].expr, s, defines);
  return defines;
}

long CompositeMachine::eval(const Expr& linked, const State& s, const std::vector<long>& defines) const {
  return eval_expr(linked, s, defines);
}

long CompositeMachine::eval(const Expr& linked, const State& s) const {
  return eval_expr(linked, s, evaluate_defines(s));
}

std::vector<std::vector<Option>> CompositeMachine::options(const State& s,
                                                           const std::vector<long>& defines) const {
  std::vector<std::vector<Option>> out(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const MachineVar& v = vars_[i];
    std::vector<Option>& opts = out[i];
    if (v.is_clock) {
      opts.push_back({(s[i] + clock_->tick) % clock_->cycle, ChoiceKind::Deterministic});
      continue;
    }
    const bool inst_faults = instances_[v.instance].faults;
    auto add = [&](long value, ChoiceKind kind) {
      for (Option& o : opts) {
        if (o.value == value) {
          if (kind == ChoiceKind::Deterministic) o.kind = kind;
          return;
        }
      }
      opts.push_back({value, kind});
    };
    if (arms_[i].empty()) {
      if (options_.nondet.allows(free_kind_[i], inst_faults)) {
        for (long value : v.domain) {
          add(value, value == s[i] ? ChoiceKind::Deterministic : free_kind_[i]);
        }
      } else {
        add(s[i], ChoiceKind::Deterministic);
      }
    } else {
      for (const LinkedArm& arm : arms_[i]) {
        if (!eval_expr(arm.guard, s, defines)) continue;
        for (std::size_t k = 0; k < arm.values.size(); ++k) {
          if (!options_.nondet.allows(arm.kinds[k], inst_faults)) continue;
          long value = eval_expr(arm.values[k], s, defines);
          add(value, arm.kinds[k]);
        }
        break;
      }
      if (opts.empty()) add(s[i], ChoiceKind::Deterministic);
    }
    for (const Option& o : opts) {
      if (!std::binary_search(v.domain.begin(), v.domain.end(), o.value)) {
        throw Error(ErrorKind::DomainViolation,
                    v.name + " next value " + std::to_string(o.value) + " outside its domain");
      }
    }
  }
  return out;
}

std::vector<State> CompositeMachine::successors(const State& s) const {
  auto opts = options(s, evaluate_defines(s));
  std::vector<State> out;
  State cursor(vars_.size());
  std::function<void(std::size_t)> expand = [&](std::size_t i) {
    if (i == opts.size()) {
      out.push_back(cursor);
      return;
    }
    for (const Option& o : opts[i]) {
      cursor[i] = o.value;
      expand(i + 1);
    }
  };
  expand(0);
  return out;
}

bool CompositeMachine::is_successor(const State& from, const State& to) const {
  if (from.size() != vars_.size() || to.size() != vars_.size()) return false;
  auto opts = options(from, evaluate_defines(from));
  for (std::size_t i = 0; i < opts.size(); ++i) {
    bool ok = std::any_of(opts[i].begin(), opts[i].end(),
                          [&](const Option& o) { return o.value == to[i]; });
    if (!ok) return false;
  }
  return true;
}

std::vector<long> CompositeMachine::row(const State& s) const {
  std::vector<long> defines = evaluate_defines(s);
  std::vector<long> out;
  out.reserve(columns_.size());
  for (const auto& [is_var, idx] : column_source_) out.push_back(is_var ? s[idx] : defines[idx]);
  return out;
}

Trace CompositeMachine::make_trace(const std::vector<State>& path, TraceKind kind,
                                   std::optional<std::size_t> loop_start) const {
  Trace t;
  t.kind = kind;
  t.columns = columns_;
  for (const State& s : path) t.steps.push_back(row(s));
  t.loop_start = loop_start;
  return t;
}

std::size_t CompositeMachine::state_space_size() const {
  std::size_t total = 1;
  for (const MachineVar& v : vars_) {
    if (v.domain.size() != 0 && total > std::numeric_limits<std::size_t>::max() / v.domain.size()) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= v.domain.size();
  }
  return total;
}

}  // namespace sliced
