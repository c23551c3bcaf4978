#include "sliced/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "sliced/archetype.hpp"
#include "sliced/error.hpp"

namespace sliced {

namespace {

std::string identifier(const std::string& text) {
  std::string out;
  for (char c : text) {
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(out.begin(), '_');
  return out;
}

std::string leaf(const std::string& path) {
  auto slash = path.rfind('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

void apply_initial(Instance& inst, const std::string& text) {
  const VarSpec& var = inst.spec->vars.front();
  Column col{var.name, var.domain.labels, var.domain.boolean, true};
  auto value = parse_value(col, text);
  if (!value) {
    throw Error(ErrorKind::Semantic, inst.name + ": initial value '" + text + "' is not in the domain of " + var.name);
  }
  auto domain = var_domain(inst, var);
  if (!std::binary_search(domain.begin(), domain.end(), *value)) {
    throw Error(ErrorKind::DomainViolation, inst.name + ": initial value '" + text + "' is outside " + var.name);
  }
  inst.init_override[var.name] = {*value};
}

}  // namespace

Model build_model(ComponentGraph g, const Config& config) {
  Model m;
  m.graph = std::move(g);
  m.classes = classify(m.graph, config.table);
  m.resolved = resolve_connections(m.graph, m.classes);

  std::map<std::string, int> leaf_count;
  for (const Classified& c : m.classes.classified) ++leaf_count[leaf(c.path)];
  std::set<std::string> taken;
  for (const Classified& c : m.classes.classified) {
    std::string name = identifier(leaf_count[leaf(c.path)] > 1 ? c.path : leaf(c.path));
    if (!taken.insert(name).second) {
      throw Error(ErrorKind::DuplicateName, "instance name '" + name + "' derived from " + c.path + " is taken");
    }
    m.instance_of[c.path] = name;

    const Block& b = *m.graph.find(c.path);
    std::map<std::string, long> params;
    if (auto d = config.defaults.find(c.spec->name); d != config.defaults.end()) {
      for (const ParamSpec& ps : c.spec->params) {
        if (auto v = d->second.find(ps.name); v != d->second.end()) params[ps.name] = v->second;
      }
    }
    for (const auto& [k, v] : b.params) params[k] = v;
    Instance inst = instantiate(c.spec, name, params);
    inst.source_path = c.path;
    inst.faults = b.faults;
    inst.final_state = b.final_state;
    inst.deadline = b.deadline;
    if (auto t = m.graph.timing.find(c.path); t != m.graph.timing.end()) inst.period = t->second;
    if (b.initial) apply_initial(inst, *b.initial);
    m.instances.push_back(std::move(inst));
  }

  for (const Connection& c : m.resolved.connections) {
    Connection conn = c;
    conn.source = m.instance_of.at(c.source);
    conn.sink = m.instance_of.at(c.sink);
    m.connections.push_back(std::move(conn));
  }

  std::map<std::string, int> open_count;
  for (const OpenEndpoint& o : m.resolved.open) {
    if (!o.downstream) continue;
    const std::string& src = m.instance_of.at(o.from);
    auto it = std::find_if(m.instances.begin(), m.instances.end(), [&](const Instance& i) { return i.name == src; });
    if (!it->spec->downstream) continue;
    std::string name = src + "_open" + std::to_string(++open_count[src]);
    Instance load = instantiate(open_draw_spec(), name, {{"lo", config.open_load_lo}, {"hi", config.open_load_hi}});
    load.pseudo = true;
    load.source_path = o.reached;
    m.instances.push_back(std::move(load));
    m.connections.push_back({src, o.port, name, 1, "", std::nullopt});
  }
  return m;
}

CompositeMachine build_machine(const Model& model, const NondetOptions& nondet) {
  ComposeOptions options;
  options.nondet = nondet;
  return compose(model.instances, model.connections, options);
}

}  // namespace sliced
