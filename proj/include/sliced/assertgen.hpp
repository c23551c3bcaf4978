#pragma once

#include <map>
#include <string>
#include <vector>

#include "sliced/composer.hpp"

namespace sliced {

// G(X.state != e) per instance and error state; breakers also get
// G(X.state = connected).
std::vector<Assertion> gen_safety(const CompositeMachine& m);

// G F(X.state = final) per periodic instance with a final state, plus
// G(clock = phase -> X.state = final) when a deadline is declared.
std::vector<Assertion> gen_liveness(const CompositeMachine& m);

// G(chan.count <= bound) per capacity-annotated connection.
std::vector<Assertion> gen_capacity(const CompositeMachine& m);

// Safety, liveness and capacity, in that order.
std::vector<Assertion> gen_auto(const CompositeMachine& m);

struct PathDiscovery {
  CompositeMachine machine;
  Assertion assertion;
};

// Copies `m` with each listed instance starting in the given error state and
// user actions enabled; the assertion is G(!goal) with the negation pushed
// through the goal's conjunction.
PathDiscovery gen_path_discovery(const CompositeMachine& m,
                                 const std::map<std::string, std::string>& failures, const Expr& goal,
                                 NondetOptions nondet = {true, false, true});

}  // namespace sliced
