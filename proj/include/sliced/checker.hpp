#pragma once

#include <optional>
#include <string_view>

#include "sliced/composer.hpp"
#include "sliced/explore.hpp"

namespace sliced {

enum class Outcome { Verified, Falsified, BoundExhausted, CapExceeded };

std::string_view to_string(Outcome o);

struct Verdict {
  Outcome outcome = Outcome::Verified;
  std::optional<Trace> trace;  // set when Falsified
  long bound = 0;              // for BoundExhausted
  BfsStats stats;
};

struct CheckOptions {
  std::size_t cap = 50'000'000;
  Backend backend = Backend::Serial;
  long bound = 20;  // liveness lasso bound
};

struct PlanOptions {
  std::size_t cap = 50'000'000;
  Backend backend = Backend::Serial;
  // Forbid a user action on a variable in two consecutive steps.
  bool toggle_guard = false;
  // States violating this predicate are pruned from the search.
  std::optional<Expr> keep;
};

// G p, p a state predicate. Falsified carries a shortest violating path.
Verdict check_invariant(const CompositeMachine& m, const Assertion& a, const CheckOptions& options = {});

// G F q. Falsified carries a lasso (Trace::loop_start) with prefix length plus
// cycle length at most `bound`, on whose cycle q never holds.
Verdict check_liveness_bounded(const CompositeMachine& m, const Assertion& a, long bound,
                               const CheckOptions& options = {});

// a = G(!goal). Falsified carries the shortest plan reaching goal.
Verdict find_plan(const CompositeMachine& m, const Assertion& a, const PlanOptions& options = {});

// Dispatches on the formula shape (G p or G F q).
Verdict check(const CompositeMachine& m, const Assertion& a, const CheckOptions& options = {});

bool is_invariant_form(const Expr& formula);
bool is_liveness_form(const Expr& formula);

}  // namespace sliced
