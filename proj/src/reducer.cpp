#include "sliced/reducer.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "sliced/error.hpp"

namespace sliced {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

bool contains(const std::vector<std::string>& sorted, const std::string& name) {
  return std::binary_search(sorted.begin(), sorted.end(), name);
}

}  // namespace

std::vector<MergeCandidate> find_merge_candidates(const CompositeMachine& m,
                                                  const ReduceOptions& options) {
  const auto& instances = m.instances();
  const auto& connections = m.connections();
  std::set<std::pair<std::string, int>> ports;
  for (const Connection& c : connections) ports.insert({c.source, c.source_port});

  std::vector<MergeCandidate> found;
  for (const auto& [source, port] : ports) {
    const Instance& src = instances[*m.find_instance(source)];
    if (src.pseudo) continue;
    MergeCandidate c;
    c.source = source;
    c.source_port = port;
    std::set<std::string> sinks;
    for (const Connection& conn : connections) {
      if (conn.source == source && conn.source_port == port) sinks.insert(conn.sink);
    }
    c.sinks.assign(sinks.begin(), sinks.end());
    std::set<std::string> members(sinks.begin(), sinks.end());
    std::vector<std::string> work(sinks.begin(), sinks.end());
    while (!work.empty()) {
      std::string at = work.back();
      work.pop_back();
      for (const Connection& conn : connections) {
        if (conn.source == at && members.insert(conn.sink).second) work.push_back(conn.sink);
      }
    }
    if (members.count(source)) continue;
    c.members.assign(members.begin(), members.end());
    bool ok = true;
    for (const std::string& name : c.members) {
      const Instance& inst = instances[*m.find_instance(name)];
      if (inst.pseudo || !inst.spec->mergeable || !inst.spec->provides("draw")) ok = false;
    }
    for (const Connection& conn : connections) {
      bool into = contains(c.members, conn.sink);
      bool from = contains(c.members, conn.source);
      if (into && !from && !(conn.source == source && conn.source_port == port)) ok = false;
      if (from && !into) ok = false;
    }
    if (!ok) continue;
    c.merged_name = source + (ports.count({source, port + 1}) || port > 1
                                  ? "_port" + std::to_string(port) + "_merged"
                                  : "_merged");
    found.push_back(std::move(c));
  }

  std::vector<MergeCandidate> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < found.size() && !dominated; ++j) {
      if (i == j || found[j].members.size() <= found[i].members.size()) continue;
      dominated = std::includes(found[j].members.begin(), found[j].members.end(),
                                found[i].members.begin(), found[i].members.end());
    }
    if (!dominated) out.push_back(std::move(found[i]));
  }
  for (MergeCandidate& c : out) compute_effective_domain(m, c, options);
  return out;
}

CompositeMachine subsystem_machine(const CompositeMachine& m, const MergeCandidate& c,
                                   std::optional<long> supply, bool free_initial) {
  std::vector<Instance> instances;
  std::set<std::string> fields;
  for (const std::string& name : c.members) {
    auto idx = m.find_instance(name);
    if (!idx) throw Error(ErrorKind::UnknownInstance, "subsystem member '" + name + "'");
    Instance inst = m.instances()[*idx];
    if (free_initial) {
      for (const VarSpec& v : inst.spec->vars) inst.init_override[v.name] = var_domain(inst, v);
    }
    if (contains(c.sinks, name)) {
      for (const std::string& f : upstream_fields(*inst.spec)) fields.insert(f);
    }
    instances.push_back(std::move(inst));
  }
  std::vector<Connection> connections;
  for (const Connection& conn : m.connections()) {
    if (contains(c.members, conn.source) && contains(c.members, conn.sink)) connections.push_back(conn);
  }
  if (!fields.empty()) {
    Instance env = instantiate(environment_spec({fields.begin(), fields.end()}), c.source + "_supply", {});
    env.pseudo = true;
    if (supply) {
      for (const VarSpec& v : env.spec->vars) {
        env.domain_override[v.name] = {*supply};
      }
    }
    for (const std::string& sink : c.sinks) connections.push_back({env.name, 1, sink, 1, "", std::nullopt});
    instances.push_back(std::move(env));
  }
  return compose(std::move(instances), std::move(connections), m.options());
}

Expr boundary_expr(const MergeCandidate& c) {
  std::vector<Expr> parts;
  for (const std::string& sink : c.sinks) parts.push_back(Expr::ref(sink + ".draw"));
  if (parts.size() == 1) return parts.front();
  return Expr::nary(Op::Add, std::move(parts));
}

std::vector<long> enumerate_boundary(const CompositeMachine& sub, const Expr& boundary, Backend backend) {
  Expr linked = sub.resolve(boundary);
  const auto& vars = sub.vars();
  std::size_t total = sub.state_space_size();
  if (total == kSaturated) throw Error(ErrorKind::Semantic, "subsystem product too large to enumerate");

  auto state_at = [&](std::size_t index, State& s) {
    for (std::size_t i = vars.size(); i-- > 0;) {
      std::size_t n = vars[i].domain.size();
      s[i] = vars[i].domain[index % n];
      index /= n;
    }
  };

  std::set<long> values;
  if (backend == Backend::OpenMP) {
    const long n = static_cast<long>(total);
    std::exception_ptr failure;
#pragma omp parallel
    {
      std::set<long> local;
      State s(vars.size());
#pragma omp for schedule(static)
      for (long i = 0; i < n; ++i) {
        try {
          state_at(static_cast<std::size_t>(i), s);
          local.insert(sub.eval(linked, s));
        } catch (...) {
#pragma omp critical(sliced_enum_failure)
          if (!failure) failure = std::current_exception();
        }
      }
#pragma omp critical(sliced_enum_merge)
      values.insert(local.begin(), local.end());
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    State s(vars.size());
    for (std::size_t i = 0; i < total; ++i) {
      state_at(i, s);
      values.insert(sub.eval(linked, s));
    }
  }
  return {values.begin(), values.end()};
}

void compute_effective_domain(const CompositeMachine& m, MergeCandidate& c, const ReduceOptions& options) {
  CompositeMachine sub = subsystem_machine(m, c);
  c.naive_combinations = 1;
  for (const MachineVar& v : sub.vars()) {
    if (v.instance < sub.instances().size() && !sub.instances()[v.instance].pseudo) {
      c.naive_combinations = saturating_mul(c.naive_combinations, v.domain.size());
    }
  }
  Expr boundary = sub.resolve(boundary_expr(c));
  std::set<long> init;
  std::size_t initial_count = 1;
  for (const MachineVar& v : sub.vars()) initial_count = saturating_mul(initial_count, v.initial.size());

  if (sub.state_space_size() <= options.enumeration_cap) {
    c.effective_domain = enumerate_boundary(sub, boundary_expr(c), options.backend);
    c.approximate = false;
  } else {
    // Interval fallback over the aggregation.
    std::vector<Interval> vi;
    for (const MachineVar& v : sub.vars()) vi.push_back({v.domain.front(), v.domain.back()});
    std::vector<Interval> di(sub.defines().size(), Interval{0, 0});
    for (std::size_t pass = 0; pass <= sub.defines().size(); ++pass) {
      for (std::size_t d = 0; d < sub.defines().size(); ++d) {
        di[d] = eval_interval(sub.defines()[d].expr, vi, di);
      }
    }
    Interval b = eval_interval(boundary, vi, di);
    c.effective_domain.clear();
    for (long v = b.lo; v <= b.hi; ++v) c.effective_domain.push_back(v);
    c.approximate = true;
  }

  if (initial_count <= options.enumeration_cap) {
    for (const State& s : sub.initial_states()) init.insert(sub.eval(boundary, s));
    c.initial_values.assign(init.begin(), init.end());
  } else {
    c.initial_values = c.effective_domain;
  }
  if (c.effective_domain.empty()) {
    throw Error(ErrorKind::EmptyDomain, "subsystem behind " + c.source + " has no boundary value");
  }
}

CompositeMachine merge(const CompositeMachine& m, const MergeCandidate& c) {
  if (c.effective_domain.empty()) {
    throw Error(ErrorKind::EmptyDomain, "merge candidate without an effective domain");
  }
  std::vector<Instance> instances;
  for (const Instance& inst : m.source_instances()) {
    if (!contains(c.members, inst.name)) instances.push_back(inst);
  }
  const long top = c.effective_domain.back();
  Instance bank = instantiate(Archetype::MergedLoadBank, c.merged_name, {{"drawlimit", std::max(0L, top)}});
  bool contiguous = c.effective_domain.front() == 0 &&
                    c.effective_domain.size() == static_cast<std::size_t>(top + 1);
  if (!contiguous) bank.domain_override["draw"] = c.effective_domain;
  bank.init_override["draw"] = c.initial_values;
  bank.faults = true;
  instances.push_back(std::move(bank));

  std::vector<Connection> connections;
  for (const Connection& conn : m.source_connections()) {
    if (contains(c.members, conn.source) || contains(c.members, conn.sink)) continue;
    connections.push_back(conn);
  }
  connections.push_back({c.source, c.source_port, c.merged_name, 1, "", std::nullopt});

  CompositeMachine out = compose(std::move(instances), std::move(connections), m.options());
  out.merges = m.merges;
  out.merges.push_back({c.merged_name, c.source, c.source_port, c.members, c.sinks});
  return out;
}

namespace {

std::size_t refine_step(const Trace& top) { return top.steps.size() >= 2 ? top.steps.size() - 2 : 0; }

}  // namespace

long refine_supply(const Trace& top, const MergeCandidate& c) {
  if (auto v = top.value(refine_step(top), c.source + ".supplyingPower")) return *v;
  return 1;
}

Assertion refine(const Trace& top, const MergeCandidate& c, const CompositeMachine& original) {
  const std::string column = c.merged_name + ".draw";
  if (!top.column_index(column) || top.steps.empty()) {
    throw Error(ErrorKind::BoundaryValueAbsent, "trace has no column '" + column + "'");
  }
  std::size_t k = refine_step(top);
  long value = *top.value(k, column);
  for (const std::string& member : c.members) {
    if (!original.find_instance(member)) {
      throw Error(ErrorKind::UnknownInstance, "subsystem member '" + member + "' not in the original machine");
    }
  }
  Assertion a;
  a.kind = AssertionKind::PathDiscovery;
  a.flavor = Flavor::Safety;
  a.formula = Expr::unary(Op::Globally, Expr::binary(Op::Ne, boundary_expr(c), Expr::integer(value)));
  a.provenance = "refine " + c.merged_name + " draw=" + std::to_string(value) + " at step " +
                 std::to_string(k + 1);
  return a;
}

MergeReport report(const MergeCandidate& c) {
  MergeReport r;
  r.merged_name = c.merged_name;
  r.original_combinations = c.naive_combinations;
  r.effective_values = c.effective_domain.size();
  r.reduction = r.effective_values == 0 ? 0.0
                                        : static_cast<double>(r.original_combinations) /
                                              static_cast<double>(r.effective_values);
  r.approximate = c.approximate;
  return r;
}

std::string format_report(const std::vector<MergeReport>& reports) {
  std::ostringstream out;
  out << "merged\toriginal\teffective\treduction\n";
  for (const MergeReport& r : reports) {
    char factor[32];
    std::snprintf(factor, sizeof factor, "%.2f", r.reduction);
    out << r.merged_name << '\t' << r.original_combinations << '\t' << r.effective_values << '\t'
        << factor << (r.approximate ? "\tapproximate" : "") << '\n';
  }
  return out.str();
}

}  // namespace sliced
