#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sliced/composer.hpp"

namespace sliced {

// step index -> {variable: value}. Step 0 selects among initial states.
using Script = std::map<std::size_t, std::map<std::string, long>>;

// Trace of horizon+1 states. A variable the script leaves open keeps its value
// when that is a legal option, otherwise it must be the only option.
// Throws UnresolvedChoice, ScriptConflict or UnknownVariable.
Trace simulate(const CompositeMachine& m, const Script& script, std::size_t horizon);

// Script values given as text (labels, TRUE/FALSE or integers).
Script parse_script(const std::string& json_text, const CompositeMachine& m);

struct Mismatch {
  std::size_t step = 0;
  std::string column;
  long expected = 0;
  long actual = 0;
};

struct ReplicationReport {
  bool replicated = false;
  std::optional<std::size_t> illegal_step;  // first step not reachable from the previous one
  std::size_t steps = 0;
  std::size_t compared_columns = 0;
  std::vector<std::string> unmapped_columns;
  std::vector<Mismatch> mismatches;
  std::optional<Trace> simulation;
};

// Replays `t` on `m`. When every variable of `m` is in the trace the choices
// are read off the trace and simulated; otherwise (partial or merged traces)
// a path of `m` agreeing with every mapped column is searched step by step.
// Columns of a merged instance X map to the sum of X's boundary sinks' draw
// per `m.merges` or `merges`.
ReplicationReport replay(const CompositeMachine& m, const Trace& t,
                         const std::vector<MergeRecord>& merges = {}, std::size_t cap = 5'000'000);

std::string format_report(const ReplicationReport& r);

// Choices of `t` as a script: every variable whose value is not forced.
Script extract_script(const CompositeMachine& m, const Trace& t);

}  // namespace sliced
