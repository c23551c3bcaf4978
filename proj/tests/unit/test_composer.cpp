#include <doctest.h>

#include <deque>
#include <random>

#include "oracle.hpp"
#include "sliced/checker.hpp"
#include "sliced/composer.hpp"
#include "sliced/error.hpp"
#include "support.hpp"

using namespace sliced;

namespace {

std::shared_ptr<const ArchetypeSpec> two_state() {
  return parse_archetype_json(R"({"name": "Toggle", "vars": [{"name": "state", "labels": ["a", "b"], "init": "a",
      "transitions": [{"guard": "state = a", "targets": ["b"]}, {"guard": "TRUE", "targets": ["a"]}]}]})");
}

std::size_t reachable(const CompositeMachine& m) {
  Assertion a;
  a.formula = parse_expr("G(TRUE)");
  Verdict v = check_invariant(m, a);
  REQUIRE(v.outcome == Outcome::Verified);
  return v.stats.states;
}

// The first `limit` states in BFS order.
std::vector<State> sample_states(const CompositeMachine& m, std::size_t limit) {
  std::set<State> seen;
  std::deque<State> queue;
  std::vector<State> out;
  for (const State& s : m.initial_states()) {
    if (seen.insert(s).second) queue.push_back(s);
  }
  while (!queue.empty() && out.size() < limit) {
    State s = queue.front();
    queue.pop_front();
    out.push_back(s);
    for (const State& t : m.successors(s)) {
      if (seen.insert(t).second) queue.push_back(t);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("product of unconnected instances") {
  std::vector<Instance> is = {instantiate(Archetype::Battery, "Battery1", {{"capacity", 4}}),
                              instantiate(two_state(), "T", {})};
  CompositeMachine m = compose(is, {});
  CHECK(m.state_space_size() == 6);
  CHECK_FALSE(m.clock().has_value());
  CHECK(m.vars().size() == 2);
}

TEST_CASE("clock configuration") {
  CHECK(clock_config({100, 200, 300}) == CyclicClock{100, 600});
  CHECK(clock_config({7}) == CyclicClock{7, 7});
  CHECK(clock_config({4, 6}) == CyclicClock{2, 12});
  CHECK_THROWS_AS(clock_config({}), Error);
}

TEST_CASE("timed composition gets a clock") {
  CompositeMachine m = support::machine("periodic-tasks");
  REQUIRE(m.clock().has_value());
  CHECK(*m.clock() == CyclicClock{100, 600});
  auto clk = m.find_var("clock");
  REQUIRE(clk.has_value());
  std::set<long> seen;
  for (const State& s : sample_states(m, 5000)) {
    long c = s[*clk];
    CHECK(c % 100 == 0);
    CHECK(c < 600);
    seen.insert(c);
  }
  CHECK(seen.size() == 6);
}

TEST_CASE("battery, breaker and bank: reachable count agrees with brute force") {
  CompositeMachine m = support::machine("adapt-breaker");
  std::size_t count = reachable(m);
  CHECK(count == oracle::count_reachable(m));
  // Every battery state with either breaker state and any bank draw.
  CHECK(count == 3 * 2 * 13);
}

TEST_CASE("deterministic machine has singleton successors") {
  CompositeMachine m = support::machine("adapt-mini", NondetOptions::deterministic());
  for (const State& s : sample_states(m, 100)) CHECK(m.successors(s).size() == 1);
}

TEST_CASE("an open relay may close") {
  Model model = build_model(parse_model(R"({"name": "m", "blocks": [
      {"name": "Battery1", "params": {"capacity": 4}}, {"name": "RelayEY244", "initial": "open"},
      {"name": "FanDC483"}],
      "lines": [{"src": "Battery1:1", "dst": ["RelayEY244:1"]}, {"src": "RelayEY244:1", "dst": ["FanDC483:1"]}]})"),
                            {});
  CompositeMachine m = build_machine(model, {true, false, true});
  auto relay = *m.find_var("RelayEY244.state");
  std::set<long> next;
  for (const State& s : m.successors(m.initial_states().at(0))) next.insert(s[relay]);
  CHECK(next == std::set<long>{0, 1});
}

TEST_CASE("successor sets equal the brute-force enumerator") {
  for (const char* name : support::kCorpus) {
    for (NondetOptions nd : {discovery_nondet(), NondetOptions{}, NondetOptions::deterministic()}) {
      CAPTURE(name);
      CompositeMachine m = support::machine(name, nd);
      oracle::Reference ref(m);
      auto init = ref.initial();
      auto mine_init = m.initial_states();
      CHECK(std::set<State>(init.begin(), init.end()) == std::set<State>(mine_init.begin(), mine_init.end()));
      for (const State& s : sample_states(m, 150)) {
        auto mine = m.successors(s);
        CHECK(std::set<State>(mine.begin(), mine.end()) == ref.successors(s));
        for (const State& t : mine) CHECK(m.is_successor(s, t));
      }
    }
  }
}

TEST_CASE("combinational cycle is rejected") {
  std::vector<Instance> is = {instantiate(Archetype::Relay, "A", {}), instantiate(Archetype::Relay, "B", {})};
  std::vector<Connection> cs = {{"A", 1, "B", 1, "", std::nullopt}, {"B", 1, "A", 1, "", std::nullopt}};
  try {
    compose(is, cs);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CombinationalCycle);
  }
}

TEST_CASE("composition order does not matter") {
  Model model = support::load("adapt-repair");
  CompositeMachine a = build_machine(model, discovery_nondet());
  std::mt19937 rng(3);
  for (int k = 0; k < 3; ++k) {
    std::shuffle(model.instances.begin(), model.instances.end(), rng);
    std::shuffle(model.connections.begin(), model.connections.end(), rng);
    CompositeMachine b = build_machine(model, discovery_nondet());
    REQUIRE(a.vars().size() == b.vars().size());
    for (std::size_t i = 0; i < a.vars().size(); ++i) CHECK(a.vars()[i].name == b.vars()[i].name);
    CHECK(reachable(a) == reachable(b));
  }
}

TEST_CASE("unbound upstream becomes a free environment input") {
  std::vector<Instance> is = {instantiate(Archetype::Actuator, "FanDC483", {})};
  CompositeMachine m = compose(is, {});
  REQUIRE(m.find_instance("FanDC483_input").has_value());
  CHECK(m.instances()[*m.find_instance("FanDC483_input")].pseudo);
  CHECK(m.successors(m.initial_states().at(0)).size() == 6);
}

TEST_CASE("sensors do not influence the rest of the machine") {
  const char* doc = R"({"name": "m", "blocks": [
      {"name": "Battery1", "params": {"capacity": 2}}, {"name": "RelayEY1"},
      {"name": "FanA"}, {"name": "FanB"}, {"name": "E141"}, {"name": "E142"}],
      "lines": [{"src": "Battery1:1", "dst": ["RelayEY1:1"]},
                {"src": "RelayEY1:1", "dst": ["FanA:1", "FanB:1", "E141:1", "E142:1"]}]})";
  const char* without = R"({"name": "m", "blocks": [
      {"name": "Battery1", "params": {"capacity": 2}}, {"name": "RelayEY1"}, {"name": "FanA"}, {"name": "FanB"}],
      "lines": [{"src": "Battery1:1", "dst": ["RelayEY1:1"]}, {"src": "RelayEY1:1", "dst": ["FanA:1", "FanB:1"]}]})";
  auto project = [](const CompositeMachine& m) {
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < m.vars().size(); ++k) {
      if (m.vars()[k].name.rfind("E14", 0) != 0) keep.push_back(k);
    }
    std::set<std::vector<long>> out;
    for (const State& s : sample_states(m, 1'000'000)) {
      std::vector<long> p;
      for (std::size_t k : keep) p.push_back(s[k]);
      out.insert(p);
    }
    return out;
  };
  for (NondetOptions nd : {discovery_nondet(), NondetOptions{}}) {
    CompositeMachine with = build_machine(build_model(parse_model(doc), {}), nd);
    CompositeMachine plain = build_machine(build_model(parse_model(without), {}), nd);
    CHECK(project(with) == project(plain));
  }
}
