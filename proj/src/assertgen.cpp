#include "sliced/assertgen.hpp"

#include <algorithm>

#include "sliced/error.hpp"

namespace sliced {

namespace {

Expr state_cmp(Op op, const std::string& instance, const std::string& label) {
  return Expr::binary(op, Expr::ref(instance + ".state"), Expr::ref(label));
}

Expr globally(Expr e) { return Expr::unary(Op::Globally, std::move(e)); }

std::optional<std::string> final_state_of(const Instance& inst) {
  if (inst.final_state) return inst.final_state;
  return inst.spec->final_state;
}

}  // namespace

std::vector<Assertion> gen_safety(const CompositeMachine& m) {
  std::vector<Assertion> out;
  for (const Instance& inst : m.instances()) {
    if (inst.pseudo || !inst.spec->find_var("state")) continue;
    for (const std::string& e : inst.spec->error_states) {
      out.push_back({AssertionKind::ErrorDiscovery, Flavor::Safety,
                     globally(state_cmp(Op::Ne, inst.name, e)),
                     "safety: " + inst.name + " never reaches " + e});
    }
    if (inst.spec->tag == Archetype::CircuitBreaker) {
      out.push_back({AssertionKind::ErrorDiscovery, Flavor::Safety,
                     globally(state_cmp(Op::Eq, inst.name, "connected")),
                     "safety: " + inst.name + " stays connected"});
    }
  }
  return out;
}

std::vector<Assertion> gen_liveness(const CompositeMachine& m) {
  std::vector<Assertion> out;
  for (const Instance& inst : m.instances()) {
    if (inst.pseudo) continue;
    auto final_state = final_state_of(inst);
    if (inst.deadline && !m.clock()) {
      throw Error(ErrorKind::MissingClock, inst.name + " declares a deadline but the model has no timing");
    }
    if (!final_state || !inst.period) continue;
    out.push_back({AssertionKind::ErrorDiscovery, Flavor::Liveness,
                   globally(Expr::unary(Op::Finally, state_cmp(Op::Eq, inst.name, *final_state))),
                   "liveness: " + inst.name + " (period " + std::to_string(*inst.period) +
                       ") reaches " + *final_state});
    if (inst.deadline) {
      long phase = *inst.deadline % m.clock()->cycle;
      out.push_back({AssertionKind::ErrorDiscovery, Flavor::Liveness,
                     globally(Expr::binary(Op::Implies,
                                           Expr::binary(Op::Eq, Expr::ref("clock"), Expr::integer(phase)),
                                           state_cmp(Op::Eq, inst.name, *final_state))),
                     "deadline: " + inst.name + " reaches " + *final_state + " by clock " +
                         std::to_string(phase)});
    }
  }
  return out;
}

std::vector<Assertion> gen_capacity(const CompositeMachine& m) {
  std::vector<Assertion> out;
  for (const Instance& inst : m.instances()) {
    if (inst.spec != channel_spec()) continue;
    long bound = inst.params.at("top") - 1;
    out.push_back({AssertionKind::ErrorDiscovery, Flavor::Capacity,
                   globally(Expr::binary(Op::Le, Expr::ref(inst.name + ".count"), Expr::integer(bound))),
                   "capacity: " + inst.name + " holds at most " + std::to_string(bound)});
  }
  return out;
}

std::vector<Assertion> gen_auto(const CompositeMachine& m) {
  std::vector<Assertion> out = gen_safety(m);
  for (auto& a : gen_liveness(m)) out.push_back(std::move(a));
  for (auto& a : gen_capacity(m)) out.push_back(std::move(a));
  return out;
}

PathDiscovery gen_path_discovery(const CompositeMachine& m,
                                 const std::map<std::string, std::string>& failures, const Expr& goal,
                                 NondetOptions nondet) {
  std::vector<Instance> instances = m.source_instances();
  for (const auto& [name, state] : failures) {
    auto it = std::find_if(instances.begin(), instances.end(),
                           [&](const Instance& i) { return i.name == name; });
    if (it == instances.end()) throw Error(ErrorKind::UnknownInstance, "'" + name + "'");
    const auto& errors = it->spec->error_states;
    if (std::find(errors.begin(), errors.end(), state) == errors.end()) {
      throw Error(ErrorKind::InvalidErrorState, "'" + state + "' is not an error state of " + name);
    }
    it->init_override["state"] = local_state(*it, state);
  }
  ComposeOptions options = m.options();
  options.nondet = nondet;
  CompositeMachine modified = compose(std::move(instances), m.source_connections(), options);
  modified.merges = m.merges;
  modified.resolve(goal);

  std::string listed;
  for (const auto& [name, state] : failures) listed += (listed.empty() ? "" : ", ") + name + "=" + state;
  Assertion a{AssertionKind::PathDiscovery, Flavor::RepairGoal, globally(negate(goal)),
              "repair: from {" + listed + "} reach " + print_expr(goal)};
  return {std::move(modified), std::move(a)};
}

}  // namespace sliced
