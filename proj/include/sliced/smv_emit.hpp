#pragma once

#include <string>
#include <vector>

#include "sliced/composer.hpp"

namespace sliced {

struct EmitOptions {
  // Battery modules keep the reference text's `(output1.draw + output1.draw)`.
  bool faithful_listing = false;
  std::string tool_version;  // written into the header comment when set
};

// NuSMV 2.6 text: one MODULE per distinct instance body (sorted by name), then
// `main`, then one LTLSPEC per assertion.
std::string emit(const CompositeMachine& m, const std::vector<Assertion>& asserts,
                 const EmitOptions& options = {});

// Text of a single instance's module, as it appears inside emit().
std::string emit_module(const CompositeMachine& m, const std::string& instance,
                        const EmitOptions& options = {});

std::string sanitize_identifier(const std::string& name);

// "-- specification  G X.state = connected  is false" and the line after it.
std::string verdict_header(const Assertion& a, bool holds);

// NuSMV counterexample layout: header, then per step a "-> State: 1.k <-" banner and the
// columns that changed (all columns for the first step).
std::string emit_trace(const Trace& t, const std::string& header = "");

// Reads emit_trace() output back. Columns known to `m` take their typing from
// it; others are typed from the values seen.
Trace parse_trace(const std::string& text, const CompositeMachine* m = nullptr);

}  // namespace sliced
