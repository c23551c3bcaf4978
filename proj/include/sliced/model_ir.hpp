#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sliced/expr.hpp"

namespace sliced {

// ---------------------------------------------------------------------------
// Component graph: the source model as parsed from a document.

enum class PortDir { In, Out };

struct Port {
  PortDir dir = PortDir::In;
  int index = 1;
  bool operator==(const Port&) const = default;
};

struct Block {
  std::string name;
  std::string kind;
  std::vector<Port> ports;
  std::vector<Block> children;

  // Optional per-block annotations carried through to the archetype instance.
  std::map<std::string, long> params;
  std::optional<std::string> archetype;  // bypasses the classification table
  std::optional<std::string> initial;    // initial state override
  std::optional<std::string> final_state;
  std::optional<long> deadline;
  bool faults = true;

  bool has_port(PortDir dir, int index) const;
  bool operator==(const Block&) const = default;
};

struct Endpoint {
  std::string path;  // '/'-separated block path from the top level
  int port = 1;
  bool operator==(const Endpoint&) const = default;
};

struct Line {
  Endpoint source;
  std::vector<Endpoint> sinks;
  std::string name;              // optional, used for channel naming
  std::optional<long> capacity;  // counting-semaphore bound
  bool operator==(const Line&) const = default;
};

struct ArchetypeSpec;

struct ComponentGraph {
  std::string name;
  std::vector<Block> blocks;
  std::vector<Line> lines;
  std::map<std::string, long> timing;  // block path -> period
  std::vector<std::shared_ptr<const ArchetypeSpec>> archetypes;  // document-defined

  const Block* find(std::string_view path) const;
  bool operator==(const ComponentGraph& other) const;
};

enum class ViolationKind {
  DuplicateName,
  DuplicatePort,
  DanglingEndpoint,
  EmptySinks,
  UnknownTimingPath,
};

struct Violation {
  ViolationKind kind;
  std::string where;
  std::string detail;
};

std::string_view to_string(ViolationKind kind);

std::vector<Violation> validate_graph(const ComponentGraph& g);

// Depth-first pre-order over blocks, children sorted by name. The callback
// receives the block path and the depth (top level = 1).
void walk_blocks(const ComponentGraph& g,
                 const std::function<void(const std::string&, const Block&, int)>& visit);

// ---------------------------------------------------------------------------
// Archetypes

enum class Archetype {
  Battery,
  Relay,
  CircuitBreaker,
  Actuator,
  Inverter,
  Load,
  Sensor,
  MergedLoadBank,
};

std::string_view to_string(Archetype tag);
std::optional<Archetype> archetype_from_string(std::string_view text);
const std::vector<Archetype>& all_archetypes();

// How a candidate next value arises. Deterministic values are always
// available; the other kinds can be switched off per machine or instance.
enum class ChoiceKind { Deterministic, UserAction, Fault, Environment };

std::string_view to_string(ChoiceKind kind);

struct DomainSpec {
  std::vector<std::string> labels;  // enumerated domain when non-empty
  bool boolean = false;
  Expr lo = Expr::integer(0);  // integer range, may reference parameters
  Expr hi = Expr::integer(0);

  static DomainSpec enumeration(std::vector<std::string> labels);
  static DomainSpec flag();
  static DomainSpec range(Expr lo, Expr hi);
};

struct Target {
  Expr value;
  ChoiceKind kind = ChoiceKind::Deterministic;
};

struct Transition {
  Expr guard;
  std::vector<Target> targets;
};

struct VarSpec {
  std::string name;
  DomainSpec domain;
  std::optional<Expr> init;         // nullopt: any domain value
  std::vector<Transition> transitions;  // empty: free over the domain every step
  ChoiceKind free_kind = ChoiceKind::Fault;
};

struct OutputSpec {
  std::string name;
  Expr expr;
};

struct ParamSpec {
  std::string name;
  long lo = 0;
  long hi = 1'000'000;
};

struct ArchetypeSpec {
  std::string name;  // SMV module name
  std::optional<Archetype> tag;
  std::vector<ParamSpec> params;
  std::vector<VarSpec> vars;  // the enumerated `state` variable comes first
  std::vector<OutputSpec> outputs;
  bool upstream = false;    // reads `input.<field>`
  bool downstream = false;  // aggregates `sum(<field>)` over outputs
  std::size_t canonical_arity = 0;
  std::vector<std::string> error_states;
  std::optional<std::string> final_state;
  bool mergeable = false;  // may sit inside a merged subsystem
  bool faithful_duplicate_sum = false;  // Battery: reproduce `output1 + output1`

  const VarSpec* find_var(std::string_view local) const;
  const OutputSpec* find_output(std::string_view local) const;
  bool provides(std::string_view field) const;
  // Labels of the `state` variable (empty if the archetype has none).
  std::vector<std::string> states() const;
  std::optional<std::string> initial() const;
  std::vector<std::pair<std::string, std::string>> user_actions() const;
};

// A concrete component: one archetype bound to parameters.
struct Instance {
  std::string name;  // SMV identifier
  std::shared_ptr<const ArchetypeSpec> spec;
  std::map<std::string, long> params;
  std::map<std::string, std::vector<long>> init_override;    // var -> initial values
  std::map<std::string, std::vector<long>> domain_override;  // var -> explicit domain
  bool faults = true;
  std::optional<long> period;
  std::optional<long> deadline;
  std::optional<std::string> final_state;
  std::string source_path;
  bool pseudo = false;  // environment input, channel or other generated helper
};

struct Connection {
  std::string source;
  int source_port = 1;
  std::string sink;
  int sink_port = 1;
  std::string line;
  std::optional<long> capacity;
  bool operator==(const Connection&) const = default;
};

struct CyclicClock {
  long tick = 1;
  long cycle = 1;
  bool operator==(const CyclicClock&) const = default;
};

// ---------------------------------------------------------------------------
// Assertions

enum class AssertionKind { ErrorDiscovery, PathDiscovery };
enum class Flavor { Safety, Liveness, Capacity, RepairGoal };

std::string_view to_string(AssertionKind kind);
std::string_view to_string(Flavor flavor);

struct Assertion {
  AssertionKind kind = AssertionKind::ErrorDiscovery;
  Flavor flavor = Flavor::Safety;
  Expr formula;
  std::string provenance;
};

// ---------------------------------------------------------------------------
// Traces

enum class TraceKind { Counterexample, Plan, Simulation };

std::string_view to_string(TraceKind kind);

struct Column {
  std::string name;
  std::vector<std::string> labels;
  bool boolean = false;
  bool is_var = true;
};

std::string format_value(const Column& column, long value);
std::optional<long> parse_value(const Column& column, std::string_view text);

struct Trace {
  TraceKind kind = TraceKind::Counterexample;
  std::vector<Column> columns;
  std::vector<std::vector<long>> steps;
  std::optional<std::size_t> loop_start;

  std::size_t length() const { return steps.size(); }
  std::optional<std::size_t> column_index(std::string_view name) const;
  std::optional<long> value(std::size_t step, std::string_view name) const;
};

}  // namespace sliced
