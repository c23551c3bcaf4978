#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sliced/archetype.hpp"
#include "sliced/model_ir.hpp"

namespace sliced {

struct ComposeOptions {
  NondetOptions nondet;
  // Instance name -> period. Merged with Instance::period.
  std::map<std::string, long> timing;
};

using State = std::vector<long>;  // one value per machine variable

struct MachineVar {
  std::string name;  // "<instance>.<local>" or "clock"
  std::size_t instance = 0;  // index into instances(); unused for the clock
  std::string local;
  std::vector<long> domain;  // sorted
  std::vector<long> initial;
  std::vector<std::string> labels;
  bool boolean = false;
  bool is_clock = false;
};

struct MachineDefine {
  std::string name;
  std::size_t instance = 0;
  std::string local;
  Expr expr;  // linked
  bool boolean = false;
};

struct LinkedArm {
  Expr guard;
  std::vector<Expr> values;
  std::vector<ChoiceKind> kinds;
};

struct Option {
  long value = 0;
  ChoiceKind kind = ChoiceKind::Deterministic;
};

struct Wiring {
  std::optional<std::size_t> upstream;  // instance index
  std::vector<std::size_t> downstream;  // output1, output2, ...
};

// Bookkeeping for a subsystem collapsed by the reducer.
struct MergeRecord {
  std::string merged;  // name of the replacement instance
  std::string source;
  int source_port = 1;
  std::vector<std::string> members;
  std::vector<std::string> sinks;  // boundary sinks inside the subsystem
};

class CompositeMachine {
 public:
  const std::vector<Instance>& instances() const { return instances_; }
  const std::vector<Connection>& connections() const { return connections_; }
  const std::optional<CyclicClock>& clock() const { return clock_; }
  const std::vector<MachineVar>& vars() const { return vars_; }
  const std::vector<MachineDefine>& defines() const { return defines_; }
  const std::vector<Wiring>& wiring() const { return wiring_; }
  const ComposeOptions& options() const { return options_; }
  const NondetOptions& nondet() const { return options_.nondet; }

  // Instances and connections as given to compose(), before pseudo instances
  // were added. Used to recompose after a merge.
  const std::vector<Instance>& source_instances() const { return source_instances_; }
  const std::vector<Connection>& source_connections() const { return source_connections_; }

  std::vector<MergeRecord> merges;

  std::optional<std::size_t> find_instance(std::string_view name) const;
  std::optional<std::size_t> find_var(std::string_view name) const;
  std::optional<std::size_t> find_define(std::string_view name) const;

  // Links an assertion/goal formula against the machine. Names are
  // "<instance>.<field>" or "clock"; throws UnknownVariable.
  Expr resolve(const Expr& formula) const;

  std::vector<State> initial_states() const;
  bool is_initial(const State& s) const;
  std::vector<long> evaluate_defines(const State& s) const;
  long eval(const Expr& linked, const State& s, const std::vector<long>& defines) const;
  long eval(const Expr& linked, const State& s) const;

  // Next-value options per variable, each value listed once. A value that
  // keeps the variable unchanged or is forced by a guard is Deterministic.
  std::vector<std::vector<Option>> options(const State& s, const std::vector<long>& defines) const;
  std::vector<State> successors(const State& s) const;
  bool is_successor(const State& from, const State& to) const;

  // Trace columns: per instance (sorted by name) its variables then its
  // defines, then the clock.
  const std::vector<Column>& columns() const { return columns_; }
  std::vector<long> row(const State& s) const;
  Trace make_trace(const std::vector<State>& path, TraceKind kind,
                   std::optional<std::size_t> loop_start = std::nullopt) const;

  // Product of variable domain sizes, saturating at SIZE_MAX.
  std::size_t state_space_size() const;

 private:
  friend CompositeMachine compose(std::vector<Instance>, std::vector<Connection>, ComposeOptions);

  std::vector<Instance> instances_;
  std::vector<Connection> connections_;
  std::vector<Instance> source_instances_;
  std::vector<Connection> source_connections_;
  std::optional<CyclicClock> clock_;
  ComposeOptions options_;
  std::vector<MachineVar> vars_;
  std::vector<MachineDefine> defines_;
  std::vector<std::size_t> define_order_;
  std::vector<std::vector<LinkedArm>> arms_;  // per var; empty = free
  std::vector<ChoiceKind> free_kind_;
  std::vector<Wiring> wiring_;
  std::vector<Column> columns_;
  std::vector<std::pair<bool, std::size_t>> column_source_;  // (is_var, index)
  std::map<std::string, std::size_t, std::less<>> var_index_;
  std::map<std::string, std::size_t, std::less<>> define_index_;
  std::map<std::string, std::size_t, std::less<>> instance_index_;
};

CompositeMachine compose(std::vector<Instance> instances, std::vector<Connection> connections,
                         ComposeOptions options = {});

// tick = GCD, cycle = LCM of the periods.
CyclicClock clock_config(const std::set<long>& periods);

}  // namespace sliced
