#include <doctest.h>

#include <random>

#include "sliced/ingest.hpp"
#include "sliced/model_ir.hpp"
#include "support.hpp"

using namespace sliced;

namespace {

Block block(std::string name, std::vector<Port> ports = {{PortDir::In, 1}, {PortDir::Out, 1}}) {
  Block b;
  b.name = std::move(name);
  b.kind = "SubSystem";
  b.ports = std::move(ports);
  return b;
}

ComponentGraph chain() {
  ComponentGraph g;
  g.name = "chain";
  g.blocks = {block("Battery1", {{PortDir::Out, 1}}), block("Breaker1"), block("Actuator1", {{PortDir::In, 1}})};
  g.lines = {{{"Battery1", 1}, {{"Breaker1", 1}}, "", std::nullopt},
             {{"Breaker1", 1}, {{"Actuator1", 1}}, "", std::nullopt}};
  return g;
}

bool has(const std::vector<Violation>& vs, ViolationKind k) {
  for (const Violation& v : vs) {
    if (v.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("well-formed chain has no violations") { CHECK(validate_graph(chain()).empty()); }

TEST_CASE("sibling blocks with the same name") {
  ComponentGraph g = chain();
  g.blocks.push_back(block("Battery1"));
  auto vs = validate_graph(g);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].kind == ViolationKind::DuplicateName);
  CHECK(vs[0].where.find("Battery1") != std::string::npos);
}

TEST_CASE("sink port that does not exist") {
  ComponentGraph g = chain();
  g.lines[1].sinks[0].port = 2;
  auto vs = validate_graph(g);
  CHECK(has(vs, ViolationKind::DanglingEndpoint));
}

TEST_CASE("other violations") {
  ComponentGraph g = chain();
  g.lines.push_back({{"Battery1", 1}, {}, "", std::nullopt});
  g.timing["Nowhere"] = 10;
  g.blocks[1].ports.push_back({PortDir::In, 1});
  auto vs = validate_graph(g);
  CHECK(has(vs, ViolationKind::EmptySinks));
  CHECK(has(vs, ViolationKind::UnknownTimingPath));
  CHECK(has(vs, ViolationKind::DuplicatePort));
}

TEST_CASE("walk order is pre-order with children sorted by name") {
  ComponentGraph g;
  Block root = block("Root");
  root.children = {block("b"), block("a")};
  root.children[0].children = {block("z")};
  g.blocks = {root};
  std::vector<std::pair<std::string, int>> seen;
  walk_blocks(g, [&](const std::string& p, const Block&, int d) { seen.emplace_back(p, d); });
  std::vector<std::pair<std::string, int>> want = {{"Root", 1}, {"Root/a", 2}, {"Root/b", 2}, {"Root/b/z", 3}};
  CHECK(seen == want);
}

TEST_CASE("serialize then parse is the identity on corpus graphs") {
  for (const char* name : support::kCorpus) {
    CAPTURE(name);
    ComponentGraph g = load_model(support::corpus(name));
    ComponentGraph back = parse_model(serialize_model(g));
    CHECK(back == g);
  }
}

TEST_CASE("serialize then parse on random trees") {
  std::mt19937 rng(7);
  for (int round = 0; round < 30; ++round) {
    ComponentGraph g;
    g.name = "random" + std::to_string(round);
    std::vector<std::string> paths;
    std::function<Block(const std::string&, int)> make = [&](const std::string& prefix, int depth) {
      Block b = block("B" + std::to_string(rng() % 1000));
      std::string path = prefix.empty() ? b.name : prefix + "/" + b.name;
      paths.push_back(path);
      if (rng() % 3 == 0) b.params["limit"] = static_cast<long>(rng() % 20);
      if (rng() % 4 == 0) b.initial = "nominal";
      if (depth < 3) {
        std::set<std::string> names;
        for (unsigned k = rng() % 3; k > 0; --k) {
          Block c = make(path, depth + 1);
          if (names.insert(c.name).second) {
            b.children.push_back(c);
          } else {
            paths.pop_back();
          }
        }
      }
      return b;
    };
    std::set<std::string> top;
    for (int k = 0; k < 3; ++k) {
      Block b = make("", 1);
      if (top.insert(b.name).second) {
        g.blocks.push_back(b);
      } else {
        std::erase_if(paths, [&](const std::string& p) { return p == b.name || p.rfind(b.name + "/", 0) == 0; });
      }
    }
    // Children dropped as duplicates may still sit in `paths`; keep only resolvable ones.
    std::erase_if(paths, [&](const std::string& p) { return g.find(p) == nullptr; });
    for (std::size_t k = 0; k + 1 < paths.size(); k += 2) {
      g.lines.push_back({{paths[k], 1}, {{paths[k + 1], 1}}, "w" + std::to_string(k), std::nullopt});
    }
    if (!validate_graph(g).empty()) continue;
    CHECK(parse_model(serialize_model(g)) == g);
  }
}

TEST_CASE("trace values are formatted by column type") {
  Column state{"X.state", {"connected", "broken"}, false, true};
  Column flag{"X.supplyingPower", {}, true, false};
  Column draw{"X.draw", {}, false, false};
  CHECK(format_value(state, 1) == "broken");
  CHECK(format_value(flag, 1) == "TRUE");
  CHECK(format_value(draw, 11) == "11");
  CHECK(parse_value(state, "connected") == 0);
  CHECK(parse_value(flag, "FALSE") == 0);
  CHECK_FALSE(parse_value(draw, "eleven").has_value());
}
