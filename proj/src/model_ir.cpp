#include "sliced/model_ir.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace sliced {

bool Block::has_port(PortDir dir, int index) const {
  return std::any_of(ports.begin(), ports.end(),
                     [&](const Port& p) { return p.dir == dir && p.index == index; });
}

namespace {

const Block* find_in(const std::vector<Block>& blocks, std::string_view path) {
  auto slash = path.find('/');
  std::string_view head = path.substr(0, slash);
  for (const Block& b : blocks) {
    if (b.name == head) {
      if (slash == std::string_view::npos) return &b;
      return find_in(b.children, path.substr(slash + 1));
    }
  }
  return nullptr;
}

void walk_rec(const std::vector<Block>& blocks, const std::string& prefix, int depth,
              const std::function<void(const std::string&, const Block&, int)>& visit) {
  std::vector<const Block*> sorted;
  sorted.reserve(blocks.size());
  for (const Block& b : blocks) sorted.push_back(&b);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Block* a, const Block* b) { return a->name < b->name; });
  for (const Block* b : sorted) {
    std::string path = prefix.empty() ? b->name : prefix + "/" + b->name;
    visit(path, *b, depth);
    walk_rec(b->children, path, depth + 1, visit);
  }
}

void check_siblings(const std::vector<Block>& blocks, const std::string& prefix,
                    std::vector<Violation>& out) {
  std::set<std::string> seen;
  for (const Block& b : blocks) {
    std::string path = prefix.empty() ? b.name : prefix + "/" + b.name;
    if (!seen.insert(b.name).second) {
      out.push_back({ViolationKind::DuplicateName, path,
                     "block name '" + b.name + "' is not unique within its parent"});
    }
    std::set<std::pair<int, int>> ports;
    for (const Port& p : b.ports) {
      if (!ports.insert({static_cast<int>(p.dir), p.index}).second) {
        out.push_back({ViolationKind::DuplicatePort, path,
                       std::string(p.dir == PortDir::In ? "in" : "out") + " port " +
                           std::to_string(p.index) + " declared twice"});
      }
    }
    check_siblings(b.children, path, out);
  }
}

}  // namespace

const Block* ComponentGraph::find(std::string_view path) const { return find_in(blocks, path); }

bool ComponentGraph::operator==(const ComponentGraph& other) const {
  if (name != other.name || blocks != other.blocks || lines != other.lines ||
      timing != other.timing || archetypes.size() != other.archetypes.size()) {
    return false;
  }
  for (std::size_t i = 0; i < archetypes.size(); ++i) {
    if (archetypes[i]->name != other.archetypes[i]->name) return false;
  }
  return true;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DuplicateName: return "DuplicateName";
    case ViolationKind::DuplicatePort: return "DuplicatePort";
    case ViolationKind::DanglingEndpoint: return "DanglingEndpoint";
    case ViolationKind::EmptySinks: return "EmptySinks";
    case ViolationKind::UnknownTimingPath: return "UnknownTimingPath";
  }
  return "Violation";
}

std::vector<Violation> validate_graph(const ComponentGraph& g) {
  std::vector<Violation> out;
  check_siblings(g.blocks, "", out);
  for (std::size_t i = 0; i < g.lines.size(); ++i) {
    const Line& line = g.lines[i];
    std::string where = "line " + std::to_string(i) + " (" + line.source.path + ":" +
                        std::to_string(line.source.port) + ")";
    const Block* src = g.find(line.source.path);
    if (src == nullptr || !src->has_port(PortDir::Out, line.source.port)) {
      out.push_back({ViolationKind::DanglingEndpoint, where,
                     "source " + line.source.path + ":" + std::to_string(line.source.port) +
                         " is not an existing out port"});
    }
    if (line.sinks.empty()) {
      out.push_back({ViolationKind::EmptySinks, where, "line has no sinks"});
    }
    for (const Endpoint& sink : line.sinks) {
      const Block* dst = g.find(sink.path);
      if (dst == nullptr || !dst->has_port(PortDir::In, sink.port)) {
        out.push_back({ViolationKind::DanglingEndpoint, where,
                       "sink " + sink.path + ":" + std::to_string(sink.port) +
                           " is not an existing in port"});
      }
    }
  }
  for (const auto& [path, period] : g.timing) {
    if (g.find(path) == nullptr) {
      out.push_back({ViolationKind::UnknownTimingPath, path, "timing entry names no block"});
    }
  }
  return out;
}

void walk_blocks(const ComponentGraph& g,
                 const std::function<void(const std::string&, const Block&, int)>& visit) {
  walk_rec(g.blocks, "", 1, visit);
}

std::string_view to_string(Archetype tag) {
  switch (tag) {
    case Archetype::Battery: return "Battery";
    case Archetype::Relay: return "Relay";
    case Archetype::CircuitBreaker: return "CircuitBreaker";
    case Archetype::Actuator: return "Actuator";
    case Archetype::Inverter: return "Inverter";
    case Archetype::Load: return "Load";
    case Archetype::Sensor: return "Sensor";
    case Archetype::MergedLoadBank: return "MergedLoadBank";
  }
  return "?";
}

const std::vector<Archetype>& all_archetypes() {
  static const std::vector<Archetype> tags{
      Archetype::Battery,  Archetype::Relay, Archetype::CircuitBreaker, Archetype::Actuator,
      Archetype::Inverter, Archetype::Load,  Archetype::Sensor,         Archetype::MergedLoadBank};
  return tags;
}

std::optional<Archetype> archetype_from_string(std::string_view text) {
  for (Archetype a : all_archetypes()) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

std::string_view to_string(ChoiceKind kind) {
  switch (kind) {
    case ChoiceKind::Deterministic: return "deterministic";
    case ChoiceKind::UserAction: return "user";
    case ChoiceKind::Fault: return "fault";
    case ChoiceKind::Environment: return "environment";
  }
  return "?";
}

DomainSpec DomainSpec::enumeration(std::vector<std::string> labels) {
  DomainSpec d;
  d.labels = std::move(labels);
  return d;
}

DomainSpec DomainSpec::flag() {
  DomainSpec d;
  d.boolean = true;
  d.hi = Expr::integer(1);
  return d;
}

DomainSpec DomainSpec::range(Expr lo, Expr hi) {
  DomainSpec d;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

const VarSpec* ArchetypeSpec::find_var(std::string_view local) const {
  for (const VarSpec& v : vars) {
    if (v.name == local) return &v;
  }
  return nullptr;
}

const OutputSpec* ArchetypeSpec::find_output(std::string_view local) const {
  for (const OutputSpec& o : outputs) {
    if (o.name == local) return &o;
  }
  return nullptr;
}

bool ArchetypeSpec::provides(std::string_view field) const {
  return find_var(field) != nullptr || find_output(field) != nullptr;
}

std::vector<std::string> ArchetypeSpec::states() const {
  const VarSpec* s = find_var("state");
  return s ? s->domain.labels : std::vector<std::string>{};
}

std::optional<std::string> ArchetypeSpec::initial() const {
  const VarSpec* s = find_var("state");
  if (s && s->init && (s->init->op == Op::Name || s->init->op == Op::Label)) return s->init->name;
  return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> ArchetypeSpec::user_actions() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const VarSpec& v : vars) {
    for (const Transition& t : v.transitions) {
      for (const Target& target : t.targets) {
        if (target.kind == ChoiceKind::UserAction) {
          out.emplace_back(print_expr(t.guard), print_expr(target.value));
        }
      }
    }
  }
  return out;
}

std::string_view to_string(AssertionKind kind) {
  return kind == AssertionKind::ErrorDiscovery ? "ErrorDiscovery" : "PathDiscovery";
}

std::string_view to_string(Flavor flavor) {
  switch (flavor) {
    case Flavor::Safety: return "Safety";
    case Flavor::Liveness: return "Liveness";
    case Flavor::Capacity: return "Capacity";
    case Flavor::RepairGoal: return "RepairGoal";
  }
  return "?";
}

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Counterexample: return "Counterexample";
    case TraceKind::Plan: return "Plan";
    case TraceKind::Simulation: return "Simulation";
  }
  return "?";
}

std::string format_value(const Column& column, long value) {
  if (column.boolean) return value ? "TRUE" : "FALSE";
  if (!column.labels.empty() && value >= 0 &&
      static_cast<std::size_t>(value) < column.labels.size()) {
    return column.labels[static_cast<std::size_t>(value)];
  }
  return std::to_string(value);
}

std::optional<long> parse_value(const Column& column, std::string_view text) {
  if (column.boolean) {
    if (text == "TRUE" || text == "true" || text == "1") return 1;
    if (text == "FALSE" || text == "false" || text == "0") return 0;
    return std::nullopt;
  }
  if (!column.labels.empty()) {
    auto it = std::find(column.labels.begin(), column.labels.end(), text);
    if (it == column.labels.end()) return std::nullopt;
    return it - column.labels.begin();
  }
  long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::optional<std::size_t> Trace::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<long> Trace::value(std::size_t step, std::string_view name) const {
  auto idx = column_index(name);
  if (!idx || step >= steps.size()) return std::nullopt;
  return steps[step][*idx];
}

}  // namespace sliced
