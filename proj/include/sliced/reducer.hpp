#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sliced/composer.hpp"
#include "sliced/explore.hpp"

namespace sliced {

struct MergeCandidate {
  std::string source;  // instance feeding the subsystem
  int source_port = 1;
  std::vector<std::string> members;  // sorted
  std::vector<std::string> sinks;    // members wired directly to the source
  std::vector<long> effective_domain;
  std::vector<long> initial_values;  // boundary values in the subsystem's initial states
  std::size_t naive_combinations = 0;
  bool approximate = false;  // interval fallback was used
  std::string merged_name;   // name of the replacement instance
};

struct ReduceOptions {
  std::size_t enumeration_cap = 1'000'000;
  Backend backend = Backend::Serial;
};

// Subsystems behind a single source out-port whose members are all mergeable
// and touch nothing else. Candidates contained in a larger one are dropped.
std::vector<MergeCandidate> find_merge_candidates(const CompositeMachine& m,
                                                  const ReduceOptions& options = {});

// The candidate's members in isolation, fed by a pseudo instance
// "<source>_supply". `supply` pins the supply value; `free_initial` lets every
// member variable start anywhere in its domain.
CompositeMachine subsystem_machine(const CompositeMachine& m, const MergeCandidate& c,
                                   std::optional<long> supply = std::nullopt,
                                   bool free_initial = false);

// Sum of the boundary sinks' draw, in instance-qualified names.
Expr boundary_expr(const MergeCandidate& c);

// Every boundary value over the full variable product of `sub` (not only
// reachable states). Serial and OpenMP variants return the same set.
std::vector<long> enumerate_boundary(const CompositeMachine& sub, const Expr& boundary, Backend backend);

// Fills effective_domain, initial_values, naive_combinations, approximate.
void compute_effective_domain(const CompositeMachine& m, MergeCandidate& c,
                              const ReduceOptions& options = {});

// Replaces the members by one MergedLoadBank instance named c.merged_name.
CompositeMachine merge(const CompositeMachine& m, const MergeCandidate& c);

// From a counterexample on the merged machine, the follow-up assertion on the
// isolated subsystem: the boundary value at the step that caused the final
// transition is never produced.
Assertion refine(const Trace& top, const MergeCandidate& c, const CompositeMachine& original);

// Supply value the refinement runs under: the source's supplyingPower at the
// refined step when the trace has it, else 1.
long refine_supply(const Trace& top, const MergeCandidate& c);

struct MergeReport {
  std::string merged_name;
  std::size_t original_combinations = 0;
  std::size_t effective_values = 0;
  double reduction = 1.0;
  bool approximate = false;
};

MergeReport report(const MergeCandidate& c);
std::string format_report(const std::vector<MergeReport>& reports);

}  // namespace sliced
