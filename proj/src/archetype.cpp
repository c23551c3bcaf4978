#include "sliced/archetype.hpp"

#include <algorithm>
#include <charconv>

#include "sliced/error.hpp"

namespace sliced {

bool NondetOptions::allows(ChoiceKind kind, bool instance_faults) const {
  switch (kind) {
    case ChoiceKind::Deterministic: return true;
    case ChoiceKind::UserAction: return user_actions;
    case ChoiceKind::Fault: return faults && instance_faults;
    case ChoiceKind::Environment: return environment;
  }
  return false;
}

namespace {

Expr p(std::string_view text) { return parse_expr(text); }

Target det(std::string_view v) { return {p(v), ChoiceKind::Deterministic}; }
Target user(std::string_view v) { return {p(v), ChoiceKind::UserAction}; }
Target fault(std::string_view v) { return {p(v), ChoiceKind::Fault}; }

VarSpec enum_state(std::vector<std::string> labels, std::string_view init) {
  VarSpec v;
  v.name = "state";
  v.domain = DomainSpec::enumeration(std::move(labels));
  v.init = p(init);
  return v;
}

std::shared_ptr<const ArchetypeSpec> make_battery() {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = "Battery";
  s->tag = Archetype::Battery;
  s->params = {{"capacity", 0, 1'000'000}};
  s->downstream = true;
  s->canonical_arity = 2;
  s->faithful_duplicate_sum = true;
  VarSpec state = enum_state({"nominal", "dead", "underRepair"}, "nominal");
  state.transitions = {
      {p("draw > capacity"), {det("dead")}},
      {p("(state = dead) & (draw = 0)"), {det("underRepair")}},
      {p("(state = underRepair) & (draw = 0)"), {det("nominal")}},
      {p("TRUE"), {det("state")}},
  };
  s->vars = {state};
  s->outputs = {{"supplyingPower", p("state = nominal")}, {"draw", Expr::down_sum("draw")}};
  s->error_states = {"dead"};
  return s;
}

std::shared_ptr<const ArchetypeSpec> make_actuator() {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = "Actuator";
  s->tag = Archetype::Actuator;
  s->upstream = true;
  s->mergeable = true;
  VarSpec state = enum_state({"nominal", "nopower", "faultyResistance"}, "nominal");
  state.free_kind = ChoiceKind::Fault;
  s->vars = {state};
  s->outputs = {{"draw", p("case"
                           "  !input.supplyingPower | state = nopower : 0;"
                           "  state = nominal : 1;"
                           "  state = faultyResistance : 2;"
                           "esac")}};
  s->error_states = {"faultyResistance"};
  return s;
}

std::shared_ptr<const ArchetypeSpec> make_load() {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = "Load";
  s->tag = Archetype::Load;
  s->params = {{"nominalDraw", 0, 1'000'000}};
  s->upstream = true;
  s->mergeable = true;
  VarSpec state = enum_state({"nominal", "nopower", "faultyResistance"}, "nominal");
  state.free_kind = ChoiceKind::Fault;
  s->vars = {state};
  s->outputs = {{"draw", p("case"
                           "  !input.supplyingPower | state = nopower : 0;"
                           "  state = nominal : nominalDraw;"
                           "  state = faultyResistance : nominalDraw + 1;"
                           "esac")}};
  s->error_states = {"faultyResistance"};
  return s;
}

std::shared_ptr<const ArchetypeSpec> make_bank() {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = "MergedLoadBank";
  s->tag = Archetype::MergedLoadBank;
  s->params = {{"drawlimit", 0, 1'000'000}};
  s->upstream = true;
  s->mergeable = true;
  VarSpec draw;
  draw.name = "draw";
  draw.domain = DomainSpec::range(Expr::integer(0), p("drawlimit"));
  draw.free_kind = ChoiceKind::Fault;
  s->vars = {draw};
  return s;
}

std::shared_ptr<const ArchetypeSpec> make_breaker() {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = "CircuitBreaker";
  s->tag = Archetype::CircuitBreaker;
  s->params = {{"limit", 0, 1'000'000}};
  s->upstream = true;
  s->downstream = true;
  s->canonical_arity = 1;
  VarSpec state = enum_state({"connected", "broken"}, "connected");
  state.transitions = {
      {p("draw > limit"), {det("broken")}},
      {p("TRUE"), {det("state")}},
  };
  s->vars = {state};
  s->outputs = {
      {"supplyingPower", p("(state = connected) & input.supplyingPower")},
      {"draw", Expr::case_of({{p("state = connected"), Expr::down_sum("draw")},
                              {p("TRUE"), Expr::integer(0)}})},
  };
  s->error_states = {"broken"};
  return s;
}

std::shared_ptr<const ArchetypeSpec> make_relay() {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = "Relay";
  s->tag = Archetype::Relay;
  s->upstream = true;
  s->downstream = true;
  s->canonical_arity = 1;
  s->mergeable = true;
  VarSpec state = enum_state({"open", "closed", "stuckOpen", "stuckClosed"}, "closed");
  state.transitions = {
      {p("state = open"), {det("open"), user("closed"), fault("stuckOpen")}},
      {p("state = closed"), {det("closed"), user("open"), fault("stuckClosed")}},
      {p("TRUE"), {det("state")}},
  };
  s->vars = {state};
  s->outputs = {
      {"supplyingPower", p("(state = closed | state = stuckClosed) & input.supplyingPower")},
      {"draw", Expr::case_of({{p("state = closed | state = stuckClosed"), Expr::down_sum("draw")},
                              {p("TRUE"), Expr::integer(0)}})},
  };
  s->error_states = {"stuckOpen", "stuckClosed"};
  return s;
}

std::shared_ptr<const ArchetypeSpec> make_inverter() {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = "Inverter";
  s->tag = Archetype::Inverter;
  s->upstream = true;
  s->downstream = true;
  s->canonical_arity = 1;
  VarSpec state = enum_state({"nominal", "failed"}, "nominal");
  state.transitions = {
      {p("state = nominal"), {det("nominal"), fault("failed")}},
      {p("TRUE"), {det("state")}},
  };
  s->vars = {state};
  s->outputs = {
      {"supplyingPower", p("(state = nominal) & input.supplyingPower")},
      {"draw", Expr::case_of({{p("state = nominal"), Expr::down_sum("draw")},
                              {p("TRUE"), Expr::integer(0)}})},
  };
  s->error_states = {"failed"};
  return s;
}

std::shared_ptr<const ArchetypeSpec> make_sensor() {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = "Sensor";
  s->tag = Archetype::Sensor;
  s->upstream = true;
  s->mergeable = true;
  VarSpec state = enum_state({"nominal", "faulty"}, "nominal");
  state.transitions = {
      {p("state = nominal"), {det("nominal"), fault("faulty")}},
      {p("TRUE"), {det("state")}},
  };
  s->vars = {state};
  s->outputs = {
      {"reading", p("(state = nominal) & input.supplyingPower")},
      {"draw", Expr::integer(0)},
  };
  s->error_states = {"faulty"};
  return s;
}

bool parse_output_ref(const std::string& name, std::size_t& k, std::string& field) {
  if (name.rfind("output", 0) != 0) return false;
  auto dot = name.find('.');
  if (dot == std::string::npos || dot <= 6) return false;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(name.data() + 6, name.data() + dot, value);
  if (ec != std::errc{} || ptr != name.data() + dot || value == 0) return false;
  k = value;
  field = name.substr(dot + 1);
  return true;
}

Expr expand_down_sums(const Expr& e, const LinkContext& ctx) {
  if (e.op == Op::DownSum) {
    std::vector<Expr> parts;
    for (std::size_t k = 1; k <= ctx.arity; ++k) {
      parts.push_back(Expr::ref("output" + std::to_string(k) + "." + e.name));
    }
    if (parts.empty()) return Expr::integer(0);
    if (parts.size() == 1) return parts.front();
    return Expr::nary(Op::Add, std::move(parts));
  }
  Expr out = e;
  for (Expr& a : out.args) a = expand_down_sums(a, ctx);
  return out;
}

void collect_fields(const Expr& e, std::set<std::string>& up, std::set<std::string>& down) {
  if (e.op == Op::Name && e.name.rfind("input.", 0) == 0) up.insert(e.name.substr(6));
  if (e.op == Op::DownSum) down.insert(e.name);
  std::size_t k = 0;
  std::string field;
  if (e.op == Op::Name && parse_output_ref(e.name, k, field)) down.insert(field);
  for (const Expr& a : e.args) collect_fields(a, up, down);
}

void for_each_template_expr(const ArchetypeSpec& spec, const std::function<void(const Expr&)>& f) {
  for (const VarSpec& v : spec.vars) {
    for (const Transition& t : v.transitions) {
      f(t.guard);
      for (const Target& target : t.targets) f(target.value);
    }
  }
  for (const OutputSpec& o : spec.outputs) f(o.expr);
}

NameLookup param_lookup(const Instance& inst) {
  return [&inst](const std::string& name) -> std::optional<NameBinding> {
    auto it = inst.params.find(name);
    if (it == inst.params.end()) return std::nullopt;
    return NameBinding{Expr::integer(it->second), nullptr};
  };
}

}  // namespace

std::shared_ptr<const ArchetypeSpec> builtin_spec(Archetype tag) {
  static const std::map<Archetype, std::shared_ptr<const ArchetypeSpec>> specs{
      {Archetype::Battery, make_battery()},   {Archetype::Relay, make_relay()},
      {Archetype::CircuitBreaker, make_breaker()}, {Archetype::Actuator, make_actuator()},
      {Archetype::Inverter, make_inverter()}, {Archetype::Load, make_load()},
      {Archetype::Sensor, make_sensor()},     {Archetype::MergedLoadBank, make_bank()},
  };
  return specs.at(tag);
}

std::shared_ptr<const ArchetypeSpec> environment_spec(const std::vector<std::string>& fields) {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = "EnvInput";
  if (!(fields.size() == 1 && fields.front() == "supplyingPower")) {
    for (const std::string& f : fields) s->name += "_" + f;
  }
  for (const std::string& f : fields) {
    VarSpec v;
    v.name = f;
    v.domain = DomainSpec::flag();
    v.free_kind = ChoiceKind::Environment;
    s->vars.push_back(std::move(v));
  }
  return s;
}

std::shared_ptr<const ArchetypeSpec> open_draw_spec() {
  static const auto spec = [] {
    auto s = std::make_shared<ArchetypeSpec>();
    s->name = "OpenLoad";
    s->params = {{"lo", 0, 1'000'000}, {"hi", 0, 1'000'000}};
    VarSpec v;
    v.name = "draw";
    v.domain = DomainSpec::range(p("lo"), p("hi"));
    v.free_kind = ChoiceKind::Environment;
    s->vars = {v};
    return std::shared_ptr<const ArchetypeSpec>(s);
  }();
  return spec;
}

std::shared_ptr<const ArchetypeSpec> channel_spec() {
  static const auto spec = [] {
    auto s = std::make_shared<ArchetypeSpec>();
    s->name = "Channel";
    s->params = {{"top", 1, 1'000'000}};
    s->upstream = true;
    s->downstream = true;
    s->canonical_arity = 1;
    VarSpec count;
    count.name = "count";
    count.domain = DomainSpec::range(Expr::integer(0), p("top"));
    count.init = Expr::integer(0);
    count.transitions = {
        {p("input.send & !output1.recv & count < top"), {det("count + 1")}},
        {p("!input.send & output1.recv & count > 0"), {det("count - 1")}},
        {p("TRUE"), {det("count")}},
    };
    s->vars = {count};
    return std::shared_ptr<const ArchetypeSpec>(s);
  }();
  return spec;
}

Instance instantiate(Archetype tag, const std::string& name,
                     const std::map<std::string, long>& params) {
  return instantiate(builtin_spec(tag), name, params);
}

Instance instantiate(std::shared_ptr<const ArchetypeSpec> spec, const std::string& name,
                     const std::map<std::string, long>& params) {
  for (const ParamSpec& ps : spec->params) {
    auto it = params.find(ps.name);
    if (it == params.end()) {
      throw Error(ErrorKind::MissingParameter,
                  name + ": " + spec->name + " requires parameter '" + ps.name + "'");
    }
    if (it->second < ps.lo || it->second > ps.hi) {
      throw Error(ErrorKind::EmptyDomain, name + ": parameter '" + ps.name + "' = " +
                                              std::to_string(it->second) + " outside [" +
                                              std::to_string(ps.lo) + ", " +
                                              std::to_string(ps.hi) + "]");
    }
  }
  for (const auto& [key, value] : params) {
    bool known = std::any_of(spec->params.begin(), spec->params.end(),
                             [&](const ParamSpec& ps) { return ps.name == key; });
    if (!known) {
      throw Error(ErrorKind::Semantic, name + ": " + spec->name + " has no parameter '" + key + "'");
    }
  }
  Instance inst;
  inst.name = name;
  inst.spec = std::move(spec);
  inst.params = params;
  for (const VarSpec& v : inst.spec->vars) var_domain(inst, v);
  return inst;
}

std::vector<long> var_domain(const Instance& inst, const VarSpec& var) {
  if (auto it = inst.domain_override.find(var.name); it != inst.domain_override.end()) {
    if (it->second.empty()) {
      throw Error(ErrorKind::EmptyDomain, inst.name + "." + var.name + " has an empty domain");
    }
    std::vector<long> d = it->second;
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
  }
  std::vector<long> out;
  if (!var.domain.labels.empty()) {
    for (std::size_t i = 0; i < var.domain.labels.size(); ++i) out.push_back(static_cast<long>(i));
    return out;
  }
  if (var.domain.boolean) return {0, 1};
  auto lookup = param_lookup(inst);
  Expr lo = resolve_names(var.domain.lo, lookup);
  Expr hi = resolve_names(var.domain.hi, lookup);
  if (!collect_names(lo).empty() || !collect_names(hi).empty()) {
    throw Error(ErrorKind::MissingParameter,
                inst.name + "." + var.name + " domain bound references an unbound parameter");
  }
  long l = eval_expr(lo, {}, {});
  long h = eval_expr(hi, {}, {});
  if (l > h) {
    throw Error(ErrorKind::EmptyDomain, inst.name + "." + var.name + " domain " +
                                            std::to_string(l) + " .. " + std::to_string(h) +
                                            " is empty");
  }
  for (long v = l; v <= h; ++v) out.push_back(v);
  return out;
}

std::vector<long> var_initial(const Instance& inst, const VarSpec& var) {
  std::vector<long> domain = var_domain(inst, var);
  if (auto it = inst.init_override.find(var.name); it != inst.init_override.end()) {
    std::vector<long> init = it->second;
    std::sort(init.begin(), init.end());
    init.erase(std::unique(init.begin(), init.end()), init.end());
    for (long v : init) {
      if (!std::binary_search(domain.begin(), domain.end(), v)) {
        throw Error(ErrorKind::DomainViolation,
                    inst.name + "." + var.name + " initial value " + std::to_string(v) +
                        " outside its domain");
      }
    }
    if (init.empty()) throw Error(ErrorKind::EmptyDomain, inst.name + "." + var.name + " has no initial value");
    return init;
  }
  if (!var.init) return domain;
  Expr e = resolve_names(*var.init, param_lookup(inst),
                         var.domain.labels.empty() ? nullptr : &var.domain.labels);
  if (!collect_names(e).empty()) {
    throw Error(ErrorKind::Semantic,
                inst.name + "." + var.name + " initial value does not resolve");
  }
  return {eval_expr(e, {}, {})};
}

Expr link_expr(const Expr& templ, const LinkContext& ctx,
               const std::vector<std::string>* label_context, const std::string& where) {
  Expr expanded = expand_down_sums(templ, ctx);
  NameLookup lookup = [&](const std::string& name) -> std::optional<NameBinding> {
    if (name.rfind("input.", 0) == 0) {
      auto b = ctx.upstream ? ctx.upstream(name.substr(6)) : std::nullopt;
      if (!b) throw Error(ErrorKind::UnboundInput, where + ": '" + name + "' is not bound");
      return b;
    }
    std::size_t k = 0;
    std::string field;
    if (parse_output_ref(name, k, field)) {
      auto b = (ctx.downstream && k <= ctx.arity) ? ctx.downstream(k, field) : std::nullopt;
      if (!b) throw Error(ErrorKind::UnboundInput, where + ": '" + name + "' is not bound");
      return b;
    }
    return ctx.local ? ctx.local(name) : std::nullopt;
  };
  Expr linked = resolve_names(expanded, lookup, label_context);
  auto leftover = collect_names(linked);
  if (!leftover.empty()) {
    throw Error(ErrorKind::UnboundInput, where + ": unresolved reference '" + leftover.front() + "'");
  }
  return linked;
}

std::set<std::string> upstream_fields(const ArchetypeSpec& spec) {
  std::set<std::string> up, down;
  for_each_template_expr(spec, [&](const Expr& e) { collect_fields(e, up, down); });
  return up;
}

std::set<std::string> downstream_fields(const ArchetypeSpec& spec) {
  std::set<std::string> up, down;
  for_each_template_expr(spec, [&](const Expr& e) { collect_fields(e, up, down); });
  return down;
}

namespace {

struct StandaloneLink {
  std::vector<Expr> outputs;                       // linked, indexed like spec.outputs
  std::vector<std::vector<Expr>> guards;           // per var, per transition
  std::vector<std::vector<std::vector<Expr>>> targets;
  std::vector<long> slot_values;                   // input slots after the local vars
  std::vector<std::size_t> output_order;
};

StandaloneLink link_standalone(const Instance& inst, const InputValuation& inputs) {
  const ArchetypeSpec& spec = *inst.spec;
  StandaloneLink link;
  std::map<std::string, std::size_t> slots;
  std::size_t arity = 0;
  for (const auto& [key, value] : inputs) {
    std::size_t k = 0;
    std::string field;
    if (parse_output_ref(key, k, field)) arity = std::max(arity, k);
  }
  auto slot = [&](const std::string& key) -> std::optional<NameBinding> {
    auto it = inputs.find(key);
    if (it == inputs.end()) return std::nullopt;
    auto [pos, inserted] = slots.emplace(key, spec.vars.size() + link.slot_values.size());
    if (inserted) link.slot_values.push_back(it->second);
    return NameBinding{Expr::var(pos->second, key), nullptr};
  };
  LinkContext ctx;
  ctx.arity = arity;
  ctx.local = [&](const std::string& name) -> std::optional<NameBinding> {
    for (std::size_t i = 0; i < spec.vars.size(); ++i) {
      if (spec.vars[i].name == name) {
        const auto* labels = spec.vars[i].domain.labels.empty() ? nullptr : &spec.vars[i].domain.labels;
        return NameBinding{Expr::var(i, name), labels};
      }
    }
    for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
      if (spec.outputs[i].name == name) return NameBinding{Expr::define(i, name), nullptr};
    }
    if (auto it = inst.params.find(name); it != inst.params.end()) {
      return NameBinding{Expr::integer(it->second), nullptr};
    }
    return std::nullopt;
  };
  ctx.upstream = [&](const std::string& field) { return slot("input." + field); };
  ctx.downstream = [&](std::size_t k, const std::string& field) {
    return slot("output" + std::to_string(k) + "." + field);
  };
  for (const OutputSpec& o : spec.outputs) {
    link.outputs.push_back(link_expr(o.expr, ctx, nullptr, inst.name + "." + o.name));
  }
  for (const VarSpec& v : spec.vars) {
    const auto* labels = v.domain.labels.empty() ? nullptr : &v.domain.labels;
    std::vector<Expr> guards;
    std::vector<std::vector<Expr>> targets;
    for (const Transition& t : v.transitions) {
      guards.push_back(link_expr(t.guard, ctx, nullptr, inst.name + "." + v.name));
      std::vector<Expr> ts;
      for (const Target& target : t.targets) {
        ts.push_back(link_expr(target.value, ctx, labels, inst.name + "." + v.name));
      }
      targets.push_back(std::move(ts));
    }
    link.guards.push_back(std::move(guards));
    link.targets.push_back(std::move(targets));
  }
  // Outputs may reference each other; order them so dependencies come first.
  std::vector<int> state(spec.outputs.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    if (state[i] == 2) return;
    if (state[i] == 1) {
      throw Error(ErrorKind::CombinationalCycle, inst.name + "." + spec.outputs[i].name);
    }
    state[i] = 1;
    std::function<void(const Expr&)> deps = [&](const Expr& e) {
      if (e.op == Op::Define) visit(static_cast<std::size_t>(e.value));
      for (const Expr& a : e.args) deps(a);
    };
    deps(link.outputs[i]);
    state[i] = 2;
    link.output_order.push_back(i);
  };
  for (std::size_t i = 0; i < spec.outputs.size(); ++i) visit(i);
  return link;
}

std::vector<long> evaluate_outputs(const StandaloneLink& link, const std::vector<long>& values) {
  std::vector<long> defines(link.outputs.size(), 0);
  for (std::size_t i : link.output_order) defines[i] = eval_expr(link.outputs[i], values, defines);
  return defines;
}

std::vector<long> full_values(const Instance& inst, const LocalState& current,
                              const StandaloneLink& link) {
  if (current.size() != inst.spec->vars.size()) {
    throw Error(ErrorKind::Semantic, inst.name + ": local state has wrong arity");
  }
  std::vector<long> values = current;
  values.insert(values.end(), link.slot_values.begin(), link.slot_values.end());
  return values;
}

}  // namespace

std::map<std::string, long> output(const Instance& inst, const LocalState& current,
                                   const InputValuation& inputs) {
  StandaloneLink link = link_standalone(inst, inputs);
  std::vector<long> values = full_values(inst, current, link);
  std::vector<long> defines = evaluate_outputs(link, values);
  std::map<std::string, long> out;
  for (std::size_t i = 0; i < defines.size(); ++i) out[inst.spec->outputs[i].name] = defines[i];
  return out;
}

std::set<LocalState> step(const Instance& inst, const LocalState& current,
                          const InputValuation& inputs, const NondetOptions& options) {
  const ArchetypeSpec& spec = *inst.spec;
  StandaloneLink link = link_standalone(inst, inputs);
  std::vector<long> values = full_values(inst, current, link);
  std::vector<long> defines = evaluate_outputs(link, values);

  std::vector<std::vector<long>> choices;
  for (std::size_t vi = 0; vi < spec.vars.size(); ++vi) {
    const VarSpec& v = spec.vars[vi];
    std::vector<long> domain = var_domain(inst, v);
    std::vector<long> next;
    if (v.transitions.empty()) {
      if (options.allows(v.free_kind, inst.faults)) {
        next = domain;
      } else {
        next = {current[vi]};
      }
    } else {
      for (std::size_t ti = 0; ti < v.transitions.size(); ++ti) {
        if (!eval_expr(link.guards[vi][ti], values, defines)) continue;
        for (std::size_t k = 0; k < v.transitions[ti].targets.size(); ++k) {
          if (!options.allows(v.transitions[ti].targets[k].kind, inst.faults)) continue;
          next.push_back(eval_expr(link.targets[vi][ti][k], values, defines));
        }
        break;
      }
      if (next.empty()) next = {current[vi]};
    }
    for (long value : next) {
      if (!std::binary_search(domain.begin(), domain.end(), value)) {
        throw Error(ErrorKind::DomainViolation, inst.name + "." + v.name + " next value " +
                                                    std::to_string(value) + " outside its domain");
      }
    }
    choices.push_back(std::move(next));
  }

  std::set<LocalState> out;
  LocalState cursor(spec.vars.size());
  std::function<void(std::size_t)> expand = [&](std::size_t i) {
    if (i == choices.size()) {
      out.insert(cursor);
      return;
    }
    for (long value : choices[i]) {
      cursor[i] = value;
      expand(i + 1);
    }
  };
  expand(0);
  return out;
}

LocalState local_state(const Instance& inst, const std::string& label) {
  const ArchetypeSpec& spec = *inst.spec;
  if (spec.vars.size() != 1 || spec.vars.front().domain.labels.empty()) {
    throw Error(ErrorKind::Semantic, inst.name + " has no single enumerated state variable");
  }
  const auto& labels = spec.vars.front().domain.labels;
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(ErrorKind::Semantic, inst.name + " has no state '" + label + "'");
  return {static_cast<long>(it - labels.begin())};
}

std::set<std::string> step_labels(const Instance& inst, const std::string& state,
                                  const InputValuation& inputs, const NondetOptions& options) {
  std::set<std::string> out;
  const auto& labels = inst.spec->vars.front().domain.labels;
  for (const LocalState& s : step(inst, local_state(inst, state), inputs, options)) {
    out.insert(labels[static_cast<std::size_t>(s.front())]);
  }
  return out;
}

}  // namespace sliced
