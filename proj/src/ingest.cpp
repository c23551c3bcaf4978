#include "sliced/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sliced/archetype.hpp"
#include "sliced/error.hpp"

namespace sliced {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

[[noreturn]] void semantic(const std::string& msg) { throw Error(ErrorKind::Semantic, msg); }

std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Endpoint parse_endpoint(const json& j) {
  if (!j.is_string()) semantic("endpoint must be a string \"path:port\"");
  std::string text = j.get<std::string>();
  Endpoint e;
  auto colon = text.rfind(':');
  if (colon == std::string::npos) {
    e.path = text;
    return e;
  }
  e.path = text.substr(0, colon);
  try {
    std::size_t used = 0;
    e.port = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1 || e.port < 1) throw std::invalid_argument("port");
  } catch (const std::exception&) {
    semantic("bad port in endpoint '" + text + "'");
  }
  return e;
}

std::string endpoint_text(const Endpoint& e) { return e.path + ":" + std::to_string(e.port); }

Block parse_block(const json& j, bool& explicit_ports) {
  if (!j.is_object()) semantic("block must be an object");
  Block b;
  if (!j.contains("name") || !j["name"].is_string()) semantic("block without a string `name`");
  b.name = j["name"].get<std::string>();
  if (b.name.empty() || b.name.find_first_of("/:") != std::string::npos) {
    semantic("block name '" + b.name + "' must be non-empty and contain no '/' or ':'");
  }
  b.kind = j.value("kind", std::string("SubSystem"));
  explicit_ports = j.contains("ports");
  if (explicit_ports) {
    for (const json& p : j["ports"]) {
      Port port;
      std::string dir = p.value("dir", std::string("in"));
      if (dir == "in") {
        port.dir = PortDir::In;
      } else if (dir == "out") {
        port.dir = PortDir::Out;
      } else {
        semantic(b.name + ": port direction must be \"in\" or \"out\"");
      }
      port.index = p.value("index", 1);
      if (port.index < 1) semantic(b.name + ": port index must be positive");
      b.ports.push_back(port);
    }
  }
  if (j.contains("params")) {
    for (const auto& [k, v] : j["params"].items()) {
      if (!v.is_number_integer()) semantic(b.name + ": parameter '" + k + "' must be an integer");
      b.params[k] = v.get<long>();
    }
  }
  if (j.contains("archetype")) b.archetype = j["archetype"].get<std::string>();
  if (j.contains("initial")) {
    const json& init = j["initial"];
    if (init.is_number_integer()) {
      b.initial = std::to_string(init.get<long>());
    } else if (init.is_string()) {
      b.initial = init.get<std::string>();
    } else {
      semantic(b.name + ": `initial` must be a label or an integer");
    }
  }
  if (j.contains("final")) b.final_state = j["final"].get<std::string>();
  if (j.contains("deadline")) b.deadline = j["deadline"].get<long>();
  if (j.contains("faults")) b.faults = j["faults"].get<bool>();
  return b;
}

Block* find_mut(std::vector<Block>& blocks, std::string_view path) {
  auto slash = path.find('/');
  std::string_view head = path.substr(0, slash);
  for (Block& b : blocks) {
    if (b.name == head) {
      if (slash == std::string_view::npos) return &b;
      return find_mut(b.children, path.substr(slash + 1));
    }
  }
  return nullptr;
}

// Names of blocks (by path) that declared no `ports` key.
void collect_inferred(const json& list, const std::string& prefix, std::set<std::string>& out) {
  for (const json& j : list) {
    std::string path = prefix.empty() ? j["name"].get<std::string>() : prefix + "/" + j["name"].get<std::string>();
    if (!j.contains("ports")) out.insert(path);
    if (j.contains("children")) collect_inferred(j["children"], path, out);
  }
}

std::vector<Block> read_blocks(const json& list) {
  if (!list.is_array()) semantic("`blocks`/`children` must be an array");
  std::vector<Block> out;
  for (const json& j : list) {
    bool explicit_ports = false;
    Block b = parse_block(j, explicit_ports);
    if (j.contains("children")) b.children = read_blocks(j["children"]);
    out.push_back(std::move(b));
  }
  return out;
}

ChoiceKind choice_from(const std::string& s) {
  if (s == "deterministic") return ChoiceKind::Deterministic;
  if (s == "user") return ChoiceKind::UserAction;
  if (s == "fault") return ChoiceKind::Fault;
  if (s == "environment") return ChoiceKind::Environment;
  semantic("unknown choice kind '" + s + "'");
}

std::string choice_text(ChoiceKind k) {
  switch (k) {
    case ChoiceKind::Deterministic: return "deterministic";
    case ChoiceKind::UserAction: return "user";
    case ChoiceKind::Fault: return "fault";
    case ChoiceKind::Environment: return "environment";
  }
  return "deterministic";
}

Expr expr_of(const json& j) {
  if (j.is_number_integer()) return Expr::integer(j.get<long>());
  if (j.is_boolean()) return Expr::boolean(j.get<bool>());
  if (!j.is_string()) semantic("expected an expression string");
  return parse_expr(j.get<std::string>());
}

std::string flat(const Expr& e) {
  std::string text = print_expr(e);
  std::string out;
  bool space = false;
  for (char c : text) {
    if (c == '\n' || c == ' ') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::shared_ptr<const ArchetypeSpec> archetype_from_json(const json& j) {
  auto s = std::make_shared<ArchetypeSpec>();
  s->name = j.at("name").get<std::string>();
  if (archetype_from_string(s->name)) semantic("custom archetype '" + s->name + "' shadows a builtin");
  for (const json& p : j.value("params", json::array())) {
    s->params.push_back({p.at("name").get<std::string>(), p.value("lo", 0L), p.value("hi", 1'000'000L)});
  }
  s->upstream = j.value("upstream", false);
  s->downstream = j.value("downstream", false);
  s->canonical_arity = j.value("canonical_arity", std::size_t{0});
  s->mergeable = j.value("mergeable", false);
  for (const json& v : j.at("vars")) {
    VarSpec var;
    var.name = v.at("name").get<std::string>();
    if (v.contains("labels")) {
      var.domain = DomainSpec::enumeration(v["labels"].get<std::vector<std::string>>());
    } else if (v.value("boolean", false)) {
      var.domain = DomainSpec::flag();
    } else if (v.contains("range")) {
      const json& r = v["range"];
      if (!r.is_array() || r.size() != 2) semantic(s->name + "." + var.name + ": `range` needs two bounds");
      var.domain = DomainSpec::range(expr_of(r[0]), expr_of(r[1]));
    } else {
      semantic(s->name + "." + var.name + ": needs `labels`, `boolean` or `range`");
    }
    if (v.contains("init") && !v["init"].is_null()) var.init = expr_of(v["init"]);
    if (v.contains("free")) var.free_kind = choice_from(v["free"].get<std::string>());
    for (const json& t : v.value("transitions", json::array())) {
      Transition tr;
      tr.guard = expr_of(t.at("guard"));
      for (const json& target : t.at("targets")) {
        if (target.is_object()) {
          tr.targets.push_back({expr_of(target.at("value")),
                                choice_from(target.value("kind", std::string("deterministic")))});
        } else {
          tr.targets.push_back({expr_of(target), ChoiceKind::Deterministic});
        }
      }
      var.transitions.push_back(std::move(tr));
    }
    s->vars.push_back(std::move(var));
  }
  if (s->vars.empty()) semantic("archetype '" + s->name + "' has no variables");
  for (const json& o : j.value("outputs", json::array())) {
    s->outputs.push_back({o.at("name").get<std::string>(), expr_of(o.at("expr"))});
  }
  s->error_states = j.value("error_states", std::vector<std::string>{});
  if (j.contains("final_state")) s->final_state = j["final_state"].get<std::string>();
  auto labels = s->states();
  for (const std::string& e : s->error_states) {
    if (std::find(labels.begin(), labels.end(), e) == labels.end()) {
      semantic("archetype '" + s->name + "': error state '" + e + "' is not a state");
    }
  }
  return s;
}

json archetype_to_json(const ArchetypeSpec& s) {
  json j;
  j["name"] = s.name;
  if (!s.params.empty()) {
    json params = json::array();
    for (const ParamSpec& p : s.params) params.push_back({{"name", p.name}, {"lo", p.lo}, {"hi", p.hi}});
    j["params"] = params;
  }
  if (s.upstream) j["upstream"] = true;
  if (s.downstream) j["downstream"] = true;
  if (s.canonical_arity) j["canonical_arity"] = s.canonical_arity;
  if (s.mergeable) j["mergeable"] = true;
  json vars = json::array();
  for (const VarSpec& v : s.vars) {
    json jv;
    jv["name"] = v.name;
    if (!v.domain.labels.empty()) {
      jv["labels"] = v.domain.labels;
    } else if (v.domain.boolean) {
      jv["boolean"] = true;
    } else {
      jv["range"] = {flat(v.domain.lo), flat(v.domain.hi)};
    }
    if (v.init) jv["init"] = flat(*v.init);
    jv["free"] = choice_text(v.free_kind);
    if (!v.transitions.empty()) {
      json ts = json::array();
      for (const Transition& t : v.transitions) {
        json targets = json::array();
        for (const Target& target : t.targets) {
          targets.push_back({{"value", flat(target.value)}, {"kind", choice_text(target.kind)}});
        }
        ts.push_back({{"guard", flat(t.guard)}, {"targets", targets}});
      }
      jv["transitions"] = ts;
    }
    vars.push_back(jv);
  }
  j["vars"] = vars;
  if (!s.outputs.empty()) {
    json outs = json::array();
    for (const OutputSpec& o : s.outputs) outs.push_back({{"name", o.name}, {"expr", flat(o.expr)}});
    j["outputs"] = outs;
  }
  if (!s.error_states.empty()) j["error_states"] = s.error_states;
  if (s.final_state) j["final_state"] = *s.final_state;
  return j;
}

json block_to_json(const Block& b) {
  json j;
  j["name"] = b.name;
  j["kind"] = b.kind;
  json ports = json::array();
  for (const Port& p : b.ports) ports.push_back({{"dir", p.dir == PortDir::In ? "in" : "out"}, {"index", p.index}});
  j["ports"] = ports;
  if (!b.params.empty()) j["params"] = b.params;
  if (b.archetype) j["archetype"] = *b.archetype;
  if (b.initial) j["initial"] = *b.initial;
  if (b.final_state) j["final"] = *b.final_state;
  if (b.deadline) j["deadline"] = *b.deadline;
  if (!b.faults) j["faults"] = false;
  if (!b.children.empty()) {
    json children = json::array();
    for (const Block& c : b.children) children.push_back(block_to_json(c));
    j["children"] = children;
  }
  return j;
}

}  // namespace

std::shared_ptr<const ArchetypeSpec> parse_archetype_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Syntax, "archetype at " + position(json_text, e.byte));
  }
  try {
    return archetype_from_json(j);
  } catch (const json::exception& e) {
    semantic(std::string("archetype: ") + e.what());
  }
}

std::string serialize_archetype_json(const ArchetypeSpec& spec) { return archetype_to_json(spec).dump(2); }

ComponentGraph parse_model(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Syntax, "model document at " + position(document, e.byte));
  }
  if (!doc.is_object()) semantic("model document must be an object");

  ComponentGraph g;
  std::set<std::string> inferred;
  try {
    g.name = doc.value("name", std::string("model"));
    if (doc.contains("archetypes")) {
      for (const json& a : doc["archetypes"]) g.archetypes.push_back(archetype_from_json(a));
    }
    if (!doc.contains("blocks")) semantic("model document has no `blocks`");
    g.blocks = read_blocks(doc["blocks"]);
    collect_inferred(doc["blocks"], "", inferred);
    for (const json& l : doc.value("lines", json::array())) {
      Line line;
      const json& src = l.at("src");
      if (src.is_array()) {
        if (src.size() != 1) {
          throw Error(ErrorKind::MultiSourceLine,
                      "line with " + std::to_string(src.size()) + " sources; lines must be directed");
        }
        line.source = parse_endpoint(src[0]);
      } else {
        line.source = parse_endpoint(src);
      }
      const json& dst = l.at("dst");
      if (dst.is_array()) {
        for (const json& d : dst) line.sinks.push_back(parse_endpoint(d));
      } else {
        line.sinks.push_back(parse_endpoint(dst));
      }
      if (l.contains("name")) line.name = l["name"].get<std::string>();
      if (l.contains("capacity")) line.capacity = l["capacity"].get<long>();
      g.lines.push_back(std::move(line));
    }
    if (doc.contains("timing")) {
      for (const auto& [path, period] : doc["timing"].items()) {
        if (!period.is_number_integer() || period.get<long>() <= 0) {
          semantic("timing for '" + path + "' must be a positive integer");
        }
        g.timing[path] = period.get<long>();
      }
    }
  } catch (const json::exception& e) {
    semantic(std::string("model document: ") + e.what());
  }

  auto add_port = [&](const Endpoint& e, PortDir dir) {
    if (!inferred.count(e.path)) return;
    Block* b = find_mut(g.blocks, e.path);
    if (b && !b->has_port(dir, e.port)) b->ports.push_back({dir, e.port});
  };
  for (const Line& line : g.lines) {
    add_port(line.source, PortDir::Out);
    for (const Endpoint& s : line.sinks) add_port(s, PortDir::In);
  }
  for (const std::string& path : inferred) {
    Block* b = find_mut(g.blocks, path);
    if (b) {
      std::sort(b->ports.begin(), b->ports.end(), [](const Port& x, const Port& y) {
        return std::pair(static_cast<int>(x.dir), x.index) < std::pair(static_cast<int>(y.dir), y.index);
      });
    }
  }

  auto violations = validate_graph(g);
  if (!violations.empty()) {
    std::string msg;
    for (const Violation& v : violations) {
      msg += (msg.empty() ? "" : "; ") + std::string(to_string(v.kind)) + " at " + v.where + ": " + v.detail;
    }
    ErrorKind kind = ErrorKind::Semantic;
    if (violations.front().kind == ViolationKind::DuplicateName) kind = ErrorKind::DuplicateName;
    if (violations.front().kind == ViolationKind::DanglingEndpoint) kind = ErrorKind::DanglingEndpoint;
    throw Error(kind, msg);
  }
  return g;
}

ComponentGraph load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string serialize_model(const ComponentGraph& g) {
  json doc;
  doc["name"] = g.name;
  if (!g.archetypes.empty()) {
    json archetypes = json::array();
    for (const auto& a : g.archetypes) archetypes.push_back(archetype_to_json(*a));
    doc["archetypes"] = archetypes;
  }
  json blocks = json::array();
  for (const Block& b : g.blocks) blocks.push_back(block_to_json(b));
  doc["blocks"] = blocks;
  json lines = json::array();
  for (const Line& l : g.lines) {
    json jl;
    jl["src"] = endpoint_text(l.source);
    json dst = json::array();
    for (const Endpoint& e : l.sinks) dst.push_back(endpoint_text(e));
    jl["dst"] = dst;
    if (!l.name.empty()) jl["name"] = l.name;
    if (l.capacity) jl["capacity"] = *l.capacity;
    lines.push_back(jl);
  }
  doc["lines"] = lines;
  if (!g.timing.empty()) doc["timing"] = g.timing;
  return doc.dump(2) + "\n";
}

ClassificationTable ClassificationTable::defaults() {
  const std::string sub = "SubSystem";
  ClassificationTable t;
  auto row = [&](std::string pattern, std::string archetype, bool prefix = false) {
    t.rows.push_back({std::move(pattern), sub, std::move(archetype), prefix, false});
  };
  row("battery", "Battery");
  row("circuitbreaker", "CircuitBreaker");
  row("breaker", "CircuitBreaker");
  row("relay", "Relay");
  row(" ey", "Relay");
  row("inverter", "Inverter");
  row("load bank", "MergedLoadBank");
  row("loadbank", "MergedLoadBank");
  row("load", "Load");
  row("sensor", "Sensor");
  row("e1", "Sensor", true);
  row("it", "Sensor", true);
  row("st", "Sensor", true);
  row("fan", "Actuator");
  row("pump", "Actuator");
  row("light", "Actuator");
  row("actuator", "Actuator");
  return t;
}

namespace {

std::shared_ptr<const ArchetypeSpec> spec_named(const ComponentGraph& g, const std::string& name) {
  if (auto tag = archetype_from_string(name)) return builtin_spec(*tag);
  for (const auto& a : g.archetypes) {
    if (a->name == name) return a;
  }
  semantic("unknown archetype '" + name + "'");
}

bool row_matches(const ClassRow& row, const Block& b, const std::string& lname) {
  if (row.kind && *row.kind != b.kind) return false;
  if (row.prefix) return lname.rfind(row.pattern, 0) == 0;
  return lname.find(row.pattern) != std::string::npos;
}

void classify_rec(const ComponentGraph& g, const std::vector<Block>& blocks, const std::string& prefix,
                  const ClassificationTable& table, Classification& out) {
  std::vector<const Block*> sorted;
  for (const Block& b : blocks) sorted.push_back(&b);
  std::stable_sort(sorted.begin(), sorted.end(), [](const Block* a, const Block* b) { return a->name < b->name; });
  for (const Block* b : sorted) {
    std::string path = prefix.empty() ? b->name : prefix + "/" + b->name;
    if (b->archetype) {
      out.classified.push_back({path, spec_named(g, *b->archetype), SIZE_MAX});
      continue;
    }
    std::string lname = lower(b->name);
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (!row_matches(table.rows[i], *b, lname)) continue;
      if (!hit) {
        hit = i;
        continue;
      }
      const ClassRow& first = table.rows[*hit];
      const ClassRow& other = table.rows[i];
      if (first.exclusive && other.exclusive && first.pattern.size() == other.pattern.size() &&
          first.archetype != other.archetype) {
        throw Error(ErrorKind::AmbiguousMatch, path + " matches '" + first.pattern + "' (" + first.archetype +
                                                   ") and '" + other.pattern + "' (" + other.archetype + ")");
      }
    }
    if (hit) {
      out.classified.push_back({path, spec_named(g, table.rows[*hit].archetype), *hit});
      continue;
    }
    out.unmatched.push_back(path);
    classify_rec(g, b->children, path, table, out);
  }
}

}  // namespace

Classification classify(const ComponentGraph& g, const ClassificationTable& table) {
  Classification out;
  classify_rec(g, g.blocks, "", table, out);
  return out;
}

ResolvedConnections resolve_connections(const ComponentGraph& g, const Classification& c) {
  std::set<std::string> classified;
  for (const Classified& k : c.classified) classified.insert(k.path);
  auto owner = [&](const std::string& path) -> std::optional<std::string> {
    std::string p = path;
    while (true) {
      if (classified.count(p)) return p;
      auto slash = p.rfind('/');
      if (slash == std::string::npos) return std::nullopt;
      p = p.substr(0, slash);
    }
  };
  std::multimap<std::string, std::size_t> lines_from;
  for (std::size_t i = 0; i < g.lines.size(); ++i) lines_from.emplace(g.lines[i].source.path, i);

  ResolvedConnections out;
  std::set<std::tuple<std::string, int, std::string, int>> seen;

  std::function<void(const std::string&, int, const Endpoint&, const std::string&, std::optional<long>,
                     std::set<std::string>&)>
      follow = [&](const std::string& from, int port, const Endpoint& sink, const std::string& name,
                   std::optional<long> capacity, std::set<std::string>& visited) {
        if (auto d = owner(sink.path)) {
          if (*d == from) return;
          if (seen.insert({from, port, *d, sink.port}).second) {
            out.connections.push_back({from, port, *d, sink.port, name, capacity});
          }
          return;
        }
        if (!visited.insert(sink.path).second) return;
        auto [lo, hi] = lines_from.equal_range(sink.path);
        if (lo == hi) {
          out.open.push_back({from, port, sink.path, true});
          return;
        }
        for (auto it = lo; it != hi; ++it) {
          const Line& next = g.lines[it->second];
          for (const Endpoint& e : next.sinks) {
            follow(from, port, e, name.empty() ? next.name : name, capacity ? capacity : next.capacity, visited);
          }
        }
      };

  for (const Line& line : g.lines) {
    auto from = owner(line.source.path);
    if (!from) continue;
    std::set<std::string> visited;
    for (const Endpoint& e : line.sinks) follow(*from, line.source.port, e, line.name, line.capacity, visited);
  }
  std::sort(out.connections.begin(), out.connections.end(), [](const Connection& a, const Connection& b) {
    return std::tie(a.source, a.source_port, a.sink, a.sink_port) <
           std::tie(b.source, b.source_port, b.sink, b.sink_port);
  });
  for (const Classified& k : c.classified) {
    if (!k.spec->upstream) continue;
    bool fed = std::any_of(out.connections.begin(), out.connections.end(),
                           [&](const Connection& conn) { return conn.sink == k.path; });
    if (!fed) out.open.push_back({k.path, 1, "", false});
  }
  return out;
}

ModelStats model_stats(const ComponentGraph& g, const ClassificationTable* table) {
  ModelStats s;
  walk_blocks(g, [&](const std::string&, const Block&, int depth) {
    ++s.total_blocks;
    auto d = static_cast<std::size_t>(depth);
    s.max_depth = std::max(s.max_depth, d);
    if (s.per_level.size() < d) s.per_level.resize(d, 0);
    ++s.per_level[d - 1];
  });
  s.lines = g.lines.size();
  if (table) s.classified = classify(g, *table).classified.size();
  return s;
}

}  // namespace sliced
