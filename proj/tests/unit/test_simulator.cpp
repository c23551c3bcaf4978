#include <doctest.h>

#include "sliced/assertgen.hpp"
#include "sliced/checker.hpp"
#include "sliced/error.hpp"
#include "sliced/ingest.hpp"
#include "sliced/simulator.hpp"
#include "sliced/smv_emit.hpp"
#include "support.hpp"

using namespace sliced;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

CompositeMachine forked() {
  auto spec = parse_archetype_json(R"({"name": "Fork", "vars": [{"name": "state", "labels": ["a", "b", "c"],
      "init": "a", "transitions": [{"guard": "state = a", "targets": ["b", "c"]}, {"guard": "TRUE", "targets": ["state"]}]}]})");
  return compose({instantiate(spec, "F", {})}, {});
}

}  // namespace

TEST_CASE("scripted overload trips the breaker one step later") {
  CompositeMachine m = support::machine("adapt-breaker", {true, true, true});
  Trace t = simulate(m, {{2, {{"BankOne.draw", 11}}}}, 4);
  REQUIRE(t.length() == 5);
  CHECK(t.value(1, "CircuitBreakerEY162.state") == 0);
  CHECK(t.value(2, "CircuitBreakerEY162.state") == 0);
  CHECK(t.value(2, "BankOne.draw") == 11);
  CHECK(t.value(3, "CircuitBreakerEY162.state") == 1);
  CHECK(t.value(4, "BankOne.draw") == 11);
}

TEST_CASE("empty script keeps the initial state") {
  CompositeMachine m = support::machine("adapt-repair", {true, true, true});
  Trace t = simulate(m, {}, 10);
  REQUIRE(t.length() == 11);
  for (std::size_t k = 1; k < t.length(); ++k) CHECK(t.steps[k] == t.steps[0]);
}

TEST_CASE("dead battery repairs in two stages") {
  CompositeMachine base = support::machine("adapt-repair", {true, false, true});
  PathDiscovery pd = gen_path_discovery(base, {{"Battery1", "dead"}}, parse_expr("Battery1.state = nominal"));
  Trace t = simulate(pd.machine, {{1, {{"RelayEY260.state", 0}}}}, 3);
  CHECK(t.value(0, "Battery1.state") == 1);
  CHECK(t.value(0, "Battery1.draw") == 0);
  CHECK(t.value(1, "Battery1.state") == 2);
  CHECK(t.value(2, "Battery1.state") == 0);
  CHECK(t.value(2, "Battery1.draw") == 2);
  CHECK(t.value(3, "Battery1.state") == 0);
  // With both relays closed the restored battery sees the full load.
  Trace closed = simulate(pd.machine, {}, 3);
  CHECK(closed.value(2, "Battery1.draw") == 4);
}

TEST_CASE("simulation is deterministic") {
  CompositeMachine m = support::machine("adapt-breaker", {true, true, true});
  Script s = {{1, {{"BankOne.draw", 5}}}, {3, {{"BankOne.draw", 12}}}};
  CHECK(simulate(m, s, 6).steps == simulate(m, s, 6).steps);
}

TEST_CASE("script errors") {
  CompositeMachine m = support::machine("adapt-breaker", {true, true, true});
  CHECK(kind_of([&] { simulate(m, {{1, {{"Nope.state", 0}}}}, 2); }) == ErrorKind::UnknownVariable);
  CHECK(kind_of([&] { simulate(m, {{0, {{"CircuitBreakerEY162.state", 1}}}}, 2); }) == ErrorKind::ScriptConflict);
  CHECK(kind_of([&] { simulate(m, {{1, {{"CircuitBreakerEY162.state", 1}}}}, 2); }) == ErrorKind::ScriptConflict);
  CompositeMachine f = forked();
  CHECK(kind_of([&] { simulate(f, {}, 2); }) == ErrorKind::UnresolvedChoice);
  Trace t = simulate(f, {{1, {{"F.state", 2}}}}, 2);
  CHECK(t.value(2, "F.state") == 2);
}

TEST_CASE("script parsing") {
  CompositeMachine m = support::machine("adapt-repair", {true, true, true});
  Script s = parse_script(R"({"1": {"RelayEY260.state": "open", "Battery1.state": "dead"}})", m);
  CHECK(s.at(1).at("RelayEY260.state") == 0);
  CHECK(s.at(1).at("Battery1.state") == 1);
  CHECK(kind_of([&] { parse_script(R"({"1": {"Ghost.state": "open"}})", m); }) == ErrorKind::UnknownVariable);
  CHECK(kind_of([&] { parse_script(R"({"x": {}})", m); }) == ErrorKind::Semantic);
  CHECK(kind_of([&] { parse_script(R"({"1": {"RelayEY260.state": "ajar"}})", m); }) == ErrorKind::Semantic);
  CHECK(kind_of([&] { parse_script("{", m); }) == ErrorKind::Syntax);
}

TEST_CASE("replay of checker counterexamples") {
  for (const char* name : support::kCorpus) {
    CompositeMachine m = support::machine(name);
    for (const Assertion& a : gen_auto(m)) {
      Verdict v = check(m, a);
      if (!v.trace) continue;
      CAPTURE(name);
      CAPTURE(print_expr(a.formula));
      ReplicationReport r = replay(support::machine(name, {true, true, true}), *v.trace);
      CHECK(r.replicated);
      CHECK(r.mismatches.empty());
      CHECK(r.steps == v.trace->length());
    }
  }
}

TEST_CASE("replay of a one-state trace and of a corrupted trace") {
  CompositeMachine m = support::machine("adapt-breaker", {true, true, true});
  Trace one = simulate(m, {}, 0);
  CHECK(replay(m, one).replicated);

  Trace t = simulate(m, {{2, {{"BankOne.draw", 11}}}}, 4);
  CHECK(replay(m, t).replicated);
  Trace bad = t;
  auto col = *bad.column_index("CircuitBreakerEY162.state");
  bad.steps[2][col] = 1;
  ReplicationReport r = replay(m, bad);
  CHECK_FALSE(r.replicated);
  REQUIRE(r.illegal_step.has_value());
  CHECK(*r.illegal_step == 2);
}

TEST_CASE("replay through the text format") {
  CompositeMachine m = support::machine("adapt-breaker");
  Verdict v = check(m, gen_safety(m).front());
  for (const Assertion& a : gen_safety(m)) {
    v = check(m, a);
    if (v.trace) break;
  }
  REQUIRE(v.trace);
  Trace back = parse_trace(emit_trace(*v.trace), &m);
  CHECK(back.steps == v.trace->steps);
  CHECK(replay(support::machine("adapt-breaker", {true, true, true}), back).replicated);
}

TEST_CASE("extracted script reproduces the trace") {
  CompositeMachine m = support::machine("adapt-breaker", {true, true, true});
  Trace t = simulate(m, {{1, {{"BankOne.draw", 3}}}, {2, {{"BankOne.draw", 11}}}}, 5);
  Script s = extract_script(m, t);
  CHECK(simulate(m, s, t.length() - 1).steps == t.steps);
}
