#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sliced/model_ir.hpp"

namespace sliced {

// Which kinds of non-determinism a machine exposes.
struct NondetOptions {
  bool user_actions = true;
  bool faults = true;
  bool environment = true;

  static NondetOptions deterministic() { return {false, false, false}; }
  bool allows(ChoiceKind kind, bool instance_faults) const;
  bool operator==(const NondetOptions&) const = default;
};

// Builtin template for one archetype tag. The returned spec is shared.
std::shared_ptr<const ArchetypeSpec> builtin_spec(Archetype tag);

// Generated helper templates.
std::shared_ptr<const ArchetypeSpec> environment_spec(const std::vector<std::string>& fields);
std::shared_ptr<const ArchetypeSpec> open_draw_spec();
std::shared_ptr<const ArchetypeSpec> channel_spec();

Instance instantiate(Archetype tag, const std::string& name,
                     const std::map<std::string, long>& params);
Instance instantiate(std::shared_ptr<const ArchetypeSpec> spec, const std::string& name,
                     const std::map<std::string, long>& params);

// Concrete domain of a variable for a given instance, in value space
// (enumerations and booleans map to 0..n-1).
std::vector<long> var_domain(const Instance& inst, const VarSpec& var);

// Initial values of a variable, honouring `init_override`.
std::vector<long> var_initial(const Instance& inst, const VarSpec& var);

// Maps template leaves of one instance onto concrete nodes.
struct LinkContext {
  // Local variable, output or parameter.
  std::function<std::optional<NameBinding>(const std::string&)> local;
  // `input.<field>`
  std::function<std::optional<NameBinding>(const std::string&)> upstream;
  // `output<k>.<field>` for k = 1..arity; nullopt when the slot does not exist.
  std::function<std::optional<NameBinding>(std::size_t, const std::string&)> downstream;
  std::size_t arity = 0;
};

// Rewrites a template expression into linked form. Throws UnboundInput for a
// reference that cannot be bound.
Expr link_expr(const Expr& templ, const LinkContext& ctx,
               const std::vector<std::string>* label_context, const std::string& where);

// Fields an archetype reads from its upstream / downstream bindings.
std::set<std::string> upstream_fields(const ArchetypeSpec& spec);
std::set<std::string> downstream_fields(const ArchetypeSpec& spec);

// Standalone evaluation of one instance. `inputs` maps references such as
// "input.supplyingPower" or "output2.draw" to values; the downstream arity is
// taken from the highest `output<k>` key present.
using LocalState = std::vector<long>;  // one value per spec variable
using InputValuation = std::map<std::string, long>;

std::map<std::string, long> output(const Instance& inst, const LocalState& current,
                                   const InputValuation& inputs);
std::set<LocalState> step(const Instance& inst, const LocalState& current,
                          const InputValuation& inputs, const NondetOptions& options = {});

// Convenience for archetypes whose only variable is the enumerated `state`.
LocalState local_state(const Instance& inst, const std::string& label);
std::set<std::string> step_labels(const Instance& inst, const std::string& state,
                                  const InputValuation& inputs,
                                  const NondetOptions& options = {});

}  // namespace sliced
