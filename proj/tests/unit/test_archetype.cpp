#include <doctest.h>

#include "archetype_sweep.hpp"
#include "sliced/archetype.hpp"
#include "sliced/error.hpp"
#include "sliced/ingest.hpp"
#include "support.hpp"

using namespace sliced;

namespace {

std::set<std::string> labels(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST_CASE("instantiate") {
  Instance b = instantiate(Archetype::Battery, "Battery1", {{"capacity", 4}});
  CHECK(b.spec->states() == std::vector<std::string>{"nominal", "dead", "underRepair"});
  Instance bank = instantiate(Archetype::MergedLoadBank, "BankOne", {{"drawlimit", 12}});
  CHECK(var_domain(bank, bank.spec->vars[0]).size() == 13);
  CHECK(var_domain(bank, bank.spec->vars[0]).back() == 12);
  try {
    instantiate(Archetype::Battery, "B", {});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingParameter);
  }
  try {
    instantiate(Archetype::MergedLoadBank, "B", {{"drawlimit", -1}});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyDomain);
  }
}

TEST_CASE("battery steps") {
  Instance b = instantiate(Archetype::Battery, "Battery1", {{"capacity", 4}});
  auto draws = [](long a, long c) { return InputValuation{{"output1.draw", a}, {"output2.draw", c}}; };
  CHECK(step_labels(b, "nominal", draws(5, 0)) == labels({"dead"}));
  CHECK(step_labels(b, "dead", draws(0, 0)) == labels({"underRepair"}));
  CHECK(step_labels(b, "underRepair", draws(0, 0)) == labels({"nominal"}));
  CHECK(step_labels(b, "underRepair", draws(1, 0)) == labels({"underRepair"}));
  CHECK(step_labels(b, "nominal", draws(3, 0)) == labels({"nominal"}));
  // Overload wins over repair.
  CHECK(step_labels(b, "dead", draws(3, 3)) == labels({"dead"}));
}

TEST_CASE("relay steps") {
  Instance r = instantiate(Archetype::Relay, "RelayEY244", {});
  InputValuation in{{"input.supplyingPower", 1}, {"output1.draw", 1}};
  CHECK(step_labels(r, "open", in) == labels({"open", "closed", "stuckOpen"}));
  CHECK(step_labels(r, "closed", in) == labels({"closed", "open", "stuckClosed"}));
  CHECK(step_labels(r, "stuckOpen", in) == labels({"stuckOpen"}));
  CHECK(step_labels(r, "stuckClosed", in) == labels({"stuckClosed"}));
  CHECK(step_labels(r, "open", in, {false, true, true}) == labels({"open", "stuckOpen"}));
  r.faults = false;
  CHECK(step_labels(r, "open", in) == labels({"open", "closed"}));
}

TEST_CASE("breaker trips above its limit and stays broken") {
  Instance cb = instantiate(Archetype::CircuitBreaker, "CircuitBreakerEY162", {{"limit", 10}});
  InputValuation in{{"input.supplyingPower", 1}, {"output1.draw", 11}};
  CHECK(step_labels(cb, "connected", in) == labels({"broken"}));
  in["output1.draw"] = 10;
  CHECK(step_labels(cb, "connected", in) == labels({"connected"}));
  CHECK(step_labels(cb, "broken", in) == labels({"broken"}));
  CHECK(output(cb, local_state(cb, "connected"), in).at("draw") == 10);
  CHECK(output(cb, local_state(cb, "broken"), in).at("draw") == 0);
  CHECK(output(cb, local_state(cb, "broken"), in).at("supplyingPower") == 0);
}

TEST_CASE("actuator outputs") {
  Instance a = instantiate(Archetype::Actuator, "FanDC483", {});
  CHECK(output(a, local_state(a, "nominal"), {{"input.supplyingPower", 1}}).at("draw") == 1);
  CHECK(output(a, local_state(a, "faultyResistance"), {{"input.supplyingPower", 1}}).at("draw") == 2);
  CHECK(output(a, local_state(a, "faultyResistance"), {{"input.supplyingPower", 0}}).at("draw") == 0);
  CHECK(output(a, local_state(a, "nopower"), {{"input.supplyingPower", 1}}).at("draw") == 0);
  CHECK(step_labels(a, "nominal", {{"input.supplyingPower", 1}}) == labels({"nominal", "nopower", "faultyResistance"}));
  CHECK(step_labels(a, "nopower", {{"input.supplyingPower", 1}}, NondetOptions::deterministic()) == labels({"nopower"}));
}

TEST_CASE("battery outputs") {
  Instance b = instantiate(Archetype::Battery, "Battery1", {{"capacity", 4}});
  auto out = output(b, local_state(b, "nominal"), {{"output1.draw", 2}, {"output2.draw", 3}});
  CHECK(out.at("draw") == 5);
  CHECK(out.at("supplyingPower") == 1);
  CHECK(output(b, local_state(b, "dead"), {{"output1.draw", 0}}).at("supplyingPower") == 0);
}

TEST_CASE("load, inverter and sensor") {
  Instance l = instantiate(Archetype::Load, "L1H", {{"nominalDraw", 3}});
  CHECK(output(l, local_state(l, "nominal"), {{"input.supplyingPower", 1}}).at("draw") == 3);
  CHECK(output(l, local_state(l, "faultyResistance"), {{"input.supplyingPower", 1}}).at("draw") == 4);
  Instance inv = instantiate(Archetype::Inverter, "Inverter1", {});
  InputValuation in{{"input.supplyingPower", 1}, {"output1.draw", 2}};
  CHECK(output(inv, local_state(inv, "nominal"), in).at("draw") == 2);
  CHECK(output(inv, local_state(inv, "failed"), in).at("supplyingPower") == 0);
  CHECK(step_labels(inv, "failed", in) == labels({"failed"}));
  Instance s = instantiate(Archetype::Sensor, "E142", {});
  for (const char* state : {"nominal", "faulty"}) {
    CHECK(output(s, local_state(s, state), {{"input.supplyingPower", 1}}).at("draw") == 0);
  }
}

TEST_CASE("unbound input") {
  Instance cb = instantiate(Archetype::CircuitBreaker, "CB", {{"limit", 10}});
  CHECK_THROWS_AS(output(cb, local_state(cb, "connected"), {{"output1.draw", 1}}), Error);
}

TEST_CASE("every archetype is total and deterministic without nondeterminism") {
  for (Archetype tag : all_archetypes()) {
    auto spec = builtin_spec(tag);
    CAPTURE(spec->name);
    support::SweepResult r = support::sweep(instantiate(tag, "X", support::sweep_params(*spec)));
    CHECK(r.cases > 0);
    CHECK(r.empty == 0);
    CHECK(r.nondeterministic == 0);
    CHECK(r.out_of_range == 0);
  }
  for (auto spec : {channel_spec(), open_draw_spec()}) {
    support::SweepResult r = support::sweep(instantiate(spec, "X", support::sweep_params(*spec)));
    CHECK(r.empty == 0);
    CHECK(r.nondeterministic == 0);
  }
  for (const auto& spec : load_model(support::corpus("periodic-tasks")).archetypes) {
    support::SweepResult r = support::sweep(instantiate(spec, "X", support::sweep_params(*spec)));
    CHECK(r.empty == 0);
    CHECK(r.nondeterministic == 0);
  }
}

TEST_CASE("channel counts sends and receives") {
  Instance c = instantiate(channel_spec(), "queue", {{"top", 3}});
  auto next = [&](long count, long send, long recv) {
    auto s = step(c, {count}, {{"input.send", send}, {"output1.recv", recv}});
    REQUIRE(s.size() == 1);
    return s.begin()->front();
  };
  CHECK(next(0, 1, 0) == 1);
  CHECK(next(3, 1, 0) == 3);
  CHECK(next(2, 0, 1) == 1);
  CHECK(next(0, 0, 1) == 0);
  CHECK(next(2, 1, 1) == 2);
}
