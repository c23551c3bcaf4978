#include "oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>

#include "sliced/archetype.hpp"

namespace oracle {

using namespace sliced;

Reference::Reference(const CompositeMachine& m) : m_(m) {
  var_slots_.resize(m.instances().size());
  for (std::size_t i = 0; i < m.instances().size(); ++i) {
    for (const VarSpec& v : m.instances()[i].spec->vars) {
      auto slot = m.find_var(m.instances()[i].name + "." + v.name);
      if (!slot) throw std::logic_error("oracle: missing variable " + v.name);
      var_slots_[i].push_back(*slot);
    }
  }
  for (std::size_t k = 0; k < m.vars().size(); ++k) {
    if (m.vars()[k].is_clock) clock_slot_ = k;
  }
}

long Reference::field(std::size_t inst, const std::string& name, const GlobalState& s,
                      const std::map<std::string, long>& outs) const {
  const Instance& in = m_.instances()[inst];
  for (std::size_t k = 0; k < in.spec->vars.size(); ++k) {
    if (in.spec->vars[k].name == name) return s[var_slots_[inst][k]];
  }
  auto it = outs.find(in.name + "." + name);
  if (it == outs.end()) throw std::logic_error("oracle: " + in.name + " has no field " + name);
  return it->second;
}

InputValuation Reference::inputs_for(std::size_t inst, const GlobalState& s,
                                     const std::map<std::string, long>& outs) const {
  InputValuation in;
  const Wiring& w = m_.wiring()[inst];
  const ArchetypeSpec& spec = *m_.instances()[inst].spec;
  if (w.upstream) {
    for (const std::string& f : upstream_fields(spec)) in["input." + f] = field(*w.upstream, f, s, outs);
  }
  auto down = downstream_fields(spec);
  for (std::size_t k = 0; k < w.downstream.size(); ++k) {
    for (const std::string& f : down) {
      in["output" + std::to_string(k + 1) + "." + f] = field(w.downstream[k], f, s, outs);
    }
  }
  return in;
}

std::map<std::string, long> Reference::outputs_fixed_point(const GlobalState& s) const {
  std::map<std::string, long> outs;
  std::size_t total = 0;
  for (const Instance& in : m_.instances()) {
    for (const OutputSpec& o : in.spec->outputs) outs[in.name + "." + o.name] = 0;
    total += in.spec->outputs.size();
  }
  for (std::size_t round = 0; round <= total + 1; ++round) {
    std::map<std::string, long> next;
    for (std::size_t i = 0; i < m_.instances().size(); ++i) {
      const Instance& in = m_.instances()[i];
      LocalState local;
      for (std::size_t slot : var_slots_[i]) local.push_back(s[slot]);
      for (const auto& [name, value] : output(in, local, inputs_for(i, s, outs))) next[in.name + "." + name] = value;
    }
    if (next == outs) return outs;
    outs = std::move(next);
  }
  throw std::logic_error("oracle: outputs do not settle");
}

std::vector<GlobalState> Reference::initial() const {
  std::vector<std::vector<long>> choices(m_.vars().size());
  for (std::size_t i = 0; i < m_.instances().size(); ++i) {
    const Instance& in = m_.instances()[i];
    for (std::size_t k = 0; k < in.spec->vars.size(); ++k) {
      choices[var_slots_[i][k]] = var_initial(in, in.spec->vars[k]);
    }
  }
  if (clock_slot_) choices[*clock_slot_] = {0};
  std::vector<GlobalState> out;
  GlobalState cursor(choices.size());
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == choices.size()) {
      out.push_back(cursor);
      return;
    }
    for (long v : choices[k]) {
      cursor[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

std::set<GlobalState> Reference::successors(const GlobalState& s) const {
  auto outs = outputs_fixed_point(s);
  std::vector<std::vector<LocalState>> per_instance;
  for (std::size_t i = 0; i < m_.instances().size(); ++i) {
    const Instance& in = m_.instances()[i];
    LocalState local;
    for (std::size_t slot : var_slots_[i]) local.push_back(s[slot]);
    auto next = step(in, local, inputs_for(i, s, outs), m_.nondet());
    per_instance.emplace_back(next.begin(), next.end());
  }
  std::set<GlobalState> out;
  GlobalState cursor = s;
  if (clock_slot_) cursor[*clock_slot_] = (s[*clock_slot_] + m_.clock()->tick) % m_.clock()->cycle;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == per_instance.size()) {
      out.insert(cursor);
      return;
    }
    for (const LocalState& local : per_instance[i]) {
      for (std::size_t k = 0; k < local.size(); ++k) cursor[var_slots_[i][k]] = local[k];
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

std::map<std::string, long> Reference::fields(const GlobalState& s) const {
  std::map<std::string, long> out = outputs_fixed_point(s);
  for (std::size_t k = 0; k < m_.vars().size(); ++k) out[m_.vars()[k].name] = s[k];
  return out;
}

long Reference::eval(const Expr& predicate, const GlobalState& s) const {
  auto values = fields(s);
  std::vector<std::string> names;
  std::vector<long> flat;
  for (const auto& [name, value] : values) {
    names.push_back(name);
    flat.push_back(value);
  }
  Expr linked = resolve_names(predicate, [&](const std::string& name) -> std::optional<NameBinding> {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) return std::nullopt;
    const std::vector<std::string>* labels = nullptr;
    if (auto v = m_.find_var(name); v && !m_.vars()[*v].labels.empty()) labels = &m_.vars()[*v].labels;
    return NameBinding{Expr::var(static_cast<std::size_t>(it - names.begin()), name), labels};
  });
  if (auto left = collect_names(linked); !left.empty()) throw std::logic_error("oracle: unknown name " + left.front());
  return eval_expr(linked, flat, {});
}

InvariantResult check_invariant(const CompositeMachine& m, const Expr& p, std::size_t cap) {
  Reference ref(m);
  InvariantResult r;
  std::map<GlobalState, std::size_t> dist;
  std::deque<GlobalState> queue;
  for (const GlobalState& s : ref.initial()) {
    if (dist.emplace(s, 1).second) queue.push_back(s);
  }
  std::optional<std::size_t> best;
  while (!queue.empty()) {
    GlobalState s = queue.front();
    queue.pop_front();
    std::size_t d = dist.at(s);
    if (best && d >= *best) continue;
    if (!ref.eval(p, s)) {
      best = d;
      continue;
    }
    for (const GlobalState& t : ref.successors(s)) {
      if (dist.emplace(t, d + 1).second) {
        if (dist.size() > cap) throw std::runtime_error("oracle: cap exceeded");
        queue.push_back(t);
      }
    }
  }
  r.reachable = dist.size();
  if (best) {
    r.holds = false;
    r.counterexample_states = *best;
  }
  return r;
}

std::size_t count_reachable(const CompositeMachine& m, std::size_t cap) {
  Reference ref(m);
  std::set<GlobalState> seen;
  std::deque<GlobalState> queue;
  for (const GlobalState& s : ref.initial()) {
    if (seen.insert(s).second) queue.push_back(s);
  }
  while (!queue.empty()) {
    GlobalState s = queue.front();
    queue.pop_front();
    for (const GlobalState& t : ref.successors(s)) {
      if (seen.insert(t).second) {
        if (seen.size() > cap) return seen.size();
        queue.push_back(t);
      }
    }
  }
  return seen.size();
}

std::set<std::vector<long>> observable_sequences(const CompositeMachine& m, const Expr& observable,
                                                 std::size_t length) {
  Reference ref(m);
  using Subset = std::set<GlobalState>;
  std::map<Subset, std::map<long, Subset>> moves;
  auto split = [&](const Subset& states) {
    std::map<long, Subset> by_value;
    for (const GlobalState& s : states) by_value[ref.eval(observable, s)].insert(s);
    return by_value;
  };
  auto advance = [&](const Subset& subset) -> const std::map<long, Subset>& {
    auto it = moves.find(subset);
    if (it != moves.end()) return it->second;
    Subset next;
    for (const GlobalState& s : subset) {
      auto succ = ref.successors(s);
      next.insert(succ.begin(), succ.end());
    }
    return moves.emplace(subset, split(next)).first->second;
  };
  std::set<std::vector<long>> out;
  std::vector<long> prefix;
  std::function<void(const Subset&)> rec = [&](const Subset& subset) {
    out.insert(prefix);
    if (prefix.size() == length) return;
    for (const auto& [value, next] : advance(subset)) {
      prefix.push_back(value);
      rec(next);
      prefix.pop_back();
    }
  };
  auto init = ref.initial();
  for (const auto& [value, subset] : split(Subset(init.begin(), init.end()))) {
    prefix = {value};
    rec(subset);
  }
  return out;
}

}  // namespace oracle
