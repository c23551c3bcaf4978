// sliced: command-line front end. See docs/cli.md.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sliced/assertgen.hpp"
#include "sliced/checker.hpp"
#include "sliced/config.hpp"
#include "sliced/error.hpp"
#include "sliced/ingest.hpp"
#include "sliced/pipeline.hpp"
#include "sliced/reducer.hpp"
#include "sliced/simulator.hpp"
#include "sliced/smv_emit.hpp"

#ifndef SLICED_VERSION
#define SLICED_VERSION "dev"
#endif

namespace {

using namespace sliced;

constexpr int kOk = 0;
constexpr int kUsage = 64;
constexpr int kData = 65;
constexpr int kExhausted = 70;

struct Common {
  std::string model;
  std::string config;
  std::string table;
  std::string backend;
  std::size_t cap = 0;
  std::vector<std::string> merge;
  bool auto_merge = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
}

Config load_settings(const Common& c) {
  Config cfg;
  if (auto env = config_path_from_env()) cfg = load_config(*env, cfg);
  if (!c.config.empty()) cfg = load_config(c.config, cfg);
  if (!c.table.empty()) cfg.table = load_table(c.table);
  if (!c.backend.empty() && c.backend != "nusmv") {
    auto b = backend_from_string(c.backend);
    if (!b) throw Error(ErrorKind::Semantic, "unknown backend '" + c.backend + "'");
    cfg.backend = *b;
  }
  if (c.cap) cfg.cap = c.cap;
  return cfg;
}

// Applies --merge / --auto-merge; merge reports go to `reports`.
CompositeMachine apply_merges(CompositeMachine m, const Common& c, const Config& cfg,
                              std::vector<MergeCandidate>* merged = nullptr) {
  if (!c.auto_merge && c.merge.empty()) return m;
  ReduceOptions ro{cfg.enumeration_cap, cfg.backend};
  std::set<std::string> wanted(c.merge.begin(), c.merge.end());
  std::set<std::string> done;
  while (true) {
    auto cands = find_merge_candidates(m, ro);
    auto it = std::find_if(cands.begin(), cands.end(), [&](const MergeCandidate& k) {
      std::string id = k.source + ":" + std::to_string(k.source_port);
      if (done.count(id)) return false;
      return c.auto_merge || wanted.count(k.source) || wanted.count(id);
    });
    if (it == cands.end()) break;
    done.insert(it->source + ":" + std::to_string(it->source_port));
    MergeCandidate cand = *it;
    compute_effective_domain(m, cand, ro);
    m = merge(m, cand);
    if (merged) merged->push_back(cand);
  }
  for (const std::string& w : wanted) {
    bool hit = std::any_of(done.begin(), done.end(), [&](const std::string& id) {
      return id == w || id.substr(0, id.rfind(':')) == w;
    });
    if (!hit) throw Error(ErrorKind::Semantic, "no mergeable subsystem behind '" + w + "'");
  }
  return m;
}

std::vector<Assertion> parse_assertion_lines(const std::string& text) {
  std::vector<Assertion> out;
  std::istringstream in(text);
  std::string line;
  std::string pending;
  auto flush = [&] {
    auto start = pending.find_first_not_of(" \t");
    if (start == std::string::npos) return;
    Assertion a;
    a.formula = parse_expr(pending);
    a.flavor = is_liveness_form(a.formula) ? Flavor::Liveness : Flavor::Safety;
    a.provenance = "user";
    out.push_back(std::move(a));
    pending.clear();
  };
  while (std::getline(in, line)) {
    auto comment = line.find("--");
    if (comment != std::string::npos) line = line.substr(0, comment);
    auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    if (line.rfind("LTLSPEC", 0) == 0) {
      flush();
      line = line.substr(7);
    }
    pending += " " + line;
  }
  flush();
  return out;
}

std::vector<Assertion> select_assertions(const CompositeMachine& m, const std::string& which) {
  if (which.empty() || which == "auto") return gen_auto(m);
  if (which == "safety") return gen_safety(m);
  if (which == "liveness") return gen_liveness(m);
  if (which == "capacity") return gen_capacity(m);
  if (which == "none") return {};
  if (std::filesystem::exists(which)) return parse_assertion_lines(read_file(which));
  return parse_assertion_lines(which);
}

std::map<std::string, std::string> parse_failures(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const std::string& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw Error(ErrorKind::Semantic, "--fail expects Instance=state, got '" + item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

int run_nusmv(const std::string& smv) {
  if (std::system("command -v NuSMV >/dev/null 2>&1") != 0) {
    std::cerr << "sliced: NuSMV not found on PATH\n";
    return kData;
  }
  auto path = std::filesystem::temp_directory_path() / "sliced_check.smv";
  write_output(path.string(), smv);
  std::string cmd = "NuSMV " + path.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return kData;
  std::string output;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
  int status = pclose(pipe);
  std::cout << output;
  if (status != 0) return kData;
  return output.find(" is false") != std::string::npos ? 1 : kOk;
}

struct Options {
  Common common;
  std::string out;
  std::string assertion = "auto";
  bool faithful = false;
  bool user_actions = false;
  bool faults = false;
  bool toggle_guard = false;
  bool stats = false;
  long bound = 0;
  std::string trace;
  std::string script;
  std::size_t horizon = 10;
  std::vector<std::string> fail;
  std::string goal;
  std::string keep;
  std::string smv_out;
};

void add_common(CLI::App* sub, Common& c, bool merges = true) {
  sub->add_option("model", c.model, "component-graph document")->required();
  if (merges) {
    sub->add_option("--merge", c.merge, "merge the subsystem behind SOURCE or SOURCE:PORT");
    sub->add_flag("--auto-merge", c.auto_merge, "merge every mergeable subsystem");
  }
}

int cmd_stats(const Options& o) {
  Config cfg = load_settings(o.common);
  ComponentGraph g = load_model(o.common.model);
  ModelStats s = model_stats(g, &cfg.table);
  Model model = build_model(g, cfg);
  std::ostringstream out;
  out << "model: " << g.name << "\n";
  out << "blocks: " << s.total_blocks << "\n";
  out << "max depth: " << s.max_depth << "\n";
  out << "blocks per level:";
  for (std::size_t n : s.per_level) out << " " << n;
  out << "\nlines: " << s.lines << "\n";
  out << "classified: " << s.classified << "\n";
  for (const Classified& c : model.classes.classified) {
    out << "  " << c.path << " -> " << c.spec->name << " as " << model.instance_of.at(c.path) << "\n";
  }
  out << "unmatched: " << model.classes.unmatched.size() << "\n";
  for (const std::string& u : model.classes.unmatched) out << "  " << u << "\n";
  out << "connections: " << model.connections.size() << "\n";
  for (const Connection& c : model.connections) {
    out << "  " << c.source << ":" << c.source_port << " -> " << c.sink << ":" << c.sink_port << "\n";
  }
  for (const OpenEndpoint& e : model.resolved.open) {
    out << "open endpoint: " << e.from;
    if (e.downstream) {
      out << ":" << e.port << " stops at " << e.reached << "\n";
    } else {
      out << " has a free input\n";
    }
  }
  CompositeMachine m = build_machine(model, discovery_nondet());
  out << "state variables: " << m.vars().size() << "\n";
  out << "state space: " << m.state_space_size() << "\n";
  write_output(o.out, out.str());
  return kOk;
}

CompositeMachine machine_for(const Options& o, const Config& cfg, NondetOptions nondet,
                             std::vector<MergeCandidate>* merged = nullptr) {
  Model model = build_model(load_model(o.common.model), cfg);
  return apply_merges(build_machine(model, nondet), o.common, cfg, merged);
}

int cmd_translate(const Options& o) {
  Config cfg = load_settings(o.common);
  CompositeMachine m = machine_for(o, cfg, {o.user_actions, true, true});
  std::vector<Assertion> asserts = select_assertions(m, o.assertion);
  for (const Assertion& a : asserts) m.resolve(a.formula);
  EmitOptions eo{o.faithful, SLICED_VERSION};
  write_output(o.out, emit(m, asserts, eo));
  return kOk;
}

std::string describe(const Assertion& a) {
  return std::string(to_string(a.kind)) + "/" + std::string(to_string(a.flavor)) + "  " + print_expr(a.formula) +
         "  -- " + a.provenance + "\n";
}

int cmd_assert(const Options& o) {
  Config cfg = load_settings(o.common);
  CompositeMachine m = machine_for(o, cfg, discovery_nondet());
  std::ostringstream out;
  for (const Assertion& a : select_assertions(m, o.assertion)) {
    m.resolve(a.formula);
    out << describe(a);
  }
  if (!o.fail.empty() || !o.goal.empty()) {
    auto failures = parse_failures(o.fail);
    Expr goal = o.goal.empty() ? Expr::boolean(true) : parse_expr(o.goal);
    out << describe(gen_path_discovery(m, failures, goal).assertion);
  }
  write_output(o.out, out.str());
  return kOk;
}

int cmd_check(const Options& o) {
  Config cfg = load_settings(o.common);
  NondetOptions nondet{o.user_actions, true, true};
  CompositeMachine m = machine_for(o, cfg, nondet);
  std::vector<Assertion> asserts = select_assertions(m, o.assertion);
  if (o.common.backend == "nusmv") return run_nusmv(emit(m, asserts, {o.faithful, SLICED_VERSION}));

  CheckOptions co{cfg.cap, cfg.backend, o.bound ? o.bound : cfg.bound};
  bool falsified = false, exhausted = false;
  std::optional<std::string> first_trace;
  std::ostringstream out;
  for (const Assertion& a : asserts) {
    Verdict v = check(m, a, co);
    if (o.stats) {
      std::cerr << "states " << v.stats.states << ", transitions " << v.stats.transitions << ", depth "
                << v.stats.depth << ", frontier peak " << v.stats.frontier_peak << "\n";
    }
    switch (v.outcome) {
      case Outcome::Verified: out << verdict_header(a, true); break;
      case Outcome::Falsified: {
        falsified = true;
        std::string text = emit_trace(*v.trace, verdict_header(a, false));
        if (!first_trace) first_trace = text;
        out << text;
        break;
      }
      case Outcome::BoundExhausted:
        exhausted = true;
        out << "-- specification  " << print_expr(a.formula) << "  is undecided within bound " << v.bound << "\n";
        break;
      case Outcome::CapExceeded:
        exhausted = true;
        out << "-- specification  " << print_expr(a.formula) << "  exceeded the state cap after "
            << v.stats.states << " states\n";
        break;
    }
  }
  write_output(o.out, out.str());
  if (first_trace && !o.trace.empty()) write_output(o.trace, *first_trace);
  if (falsified) return 1;
  if (exhausted) return 2;
  return kOk;
}

int cmd_merge(const Options& o) {
  Config cfg = load_settings(o.common);
  Common c = o.common;
  if (c.merge.empty()) c.auto_merge = true;
  std::vector<MergeCandidate> merged;
  Model model = build_model(load_model(c.model), cfg);
  CompositeMachine original = build_machine(model, discovery_nondet());
  CompositeMachine m = apply_merges(original, c, cfg, &merged);
  std::vector<MergeReport> reports;
  for (const MergeCandidate& k : merged) reports.push_back(report(k));
  std::ostringstream out;
  out << format_report(reports);
  if (!o.trace.empty()) {
    Trace top = parse_trace(read_file(o.trace), &m);
    for (const MergeCandidate& k : merged) {
      if (!top.column_index(k.merged_name + ".draw")) continue;
      Assertion follow = refine(top, k, original);
      long supply = refine_supply(top, k);
      CompositeMachine sub = subsystem_machine(original, k, supply, true);
      Verdict v = check(sub, follow, {cfg.cap, cfg.backend, cfg.bound});
      out << "refinement for " << k.merged_name << " (supply " << supply << "):\n";
      if (v.outcome == Outcome::Falsified) {
        out << emit_trace(*v.trace, verdict_header(follow, false));
      } else {
        out << verdict_header(follow, v.outcome == Outcome::Verified);
      }
    }
  }
  write_output(o.out, out.str());
  if (!o.smv_out.empty()) write_output(o.smv_out, emit(m, gen_auto(m), {o.faithful, SLICED_VERSION}));
  return kOk;
}

int cmd_plan(const Options& o) {
  Config cfg = load_settings(o.common);
  if (o.fail.empty()) throw Error(ErrorKind::Semantic, "plan needs at least one --fail Instance=state");
  auto failures = parse_failures(o.fail);
  NondetOptions nondet{true, o.faults || cfg.plan_faults, true};
  CompositeMachine m = machine_for(o, cfg, nondet);
  Expr goal;
  if (o.goal.empty()) {
    std::vector<Expr> parts;
    for (const auto& [name, state] : failures) {
      auto idx = m.find_instance(name);
      if (!idx) throw Error(ErrorKind::UnknownInstance, "'" + name + "'");
      auto init = m.instances()[*idx].spec->initial();
      if (!init) throw Error(ErrorKind::Semantic, name + " has no initial state to return to");
      parts.push_back(Expr::binary(Op::Eq, Expr::ref(name + ".state"), Expr::ref(*init)));
    }
    goal = parts.size() == 1 ? parts.front() : Expr::nary(Op::And, parts);
  } else {
    goal = parse_expr(o.goal);
  }
  PathDiscovery pd = gen_path_discovery(m, failures, goal, nondet);
  if (!o.smv_out.empty()) write_output(o.smv_out, emit(pd.machine, {pd.assertion}, {o.faithful, SLICED_VERSION}));

  PlanOptions po;
  po.cap = cfg.cap;
  po.backend = cfg.backend;
  po.toggle_guard = o.toggle_guard || cfg.plan_toggle_guard;
  if (!o.keep.empty()) po.keep = parse_expr(o.keep);
  Verdict v = find_plan(pd.machine, pd.assertion, po);
  switch (v.outcome) {
    case Outcome::Falsified: {
      std::string text = emit_trace(*v.trace, verdict_header(pd.assertion, false));
      write_output(o.out, text);
      if (!o.trace.empty()) write_output(o.trace, text);
      return kOk;
    }
    case Outcome::Verified:
      write_output(o.out, verdict_header(pd.assertion, true));
      std::cerr << "sliced: no plan reaches the goal\n";
      return 1;
    default:
      std::cerr << "sliced: plan search exceeded the state cap after " << v.stats.states << " states\n";
      return kExhausted;
  }
}

int cmd_simulate(const Options& o) {
  Config cfg = load_settings(o.common);
  CompositeMachine m = machine_for(o, cfg, {true, true, true});
  Script script = o.script.empty() ? Script{} : parse_script(read_file(o.script), m);
  Trace t = simulate(m, script, o.horizon);
  write_output(o.out, emit_trace(t));
  return kOk;
}

int cmd_replay(const Options& o) {
  Config cfg = load_settings(o.common);
  Model model = build_model(load_model(o.common.model), cfg);
  CompositeMachine m = build_machine(model, {true, true, true});
  std::vector<MergeRecord> merges;
  if (o.common.auto_merge || !o.common.merge.empty()) merges = apply_merges(m, o.common, cfg).merges;
  Trace t = parse_trace(read_file(o.trace), &m);
  ReplicationReport r = replay(m, t, merges, cfg.cap);
  std::string text = format_report(r);
  write_output(o.out, text);
  if (r.illegal_step) std::cerr << "sliced: IllegalStep at state 1." << (*r.illegal_step + 1) << "\n";
  return r.replicated ? kOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sliced: component graphs to composite state machines, assertions and plans"};
  app.set_version_flag("--version", std::string("sliced ") + SLICED_VERSION);
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.common.config, "config file (overrides $SLICED_CONFIG)");
  app.add_option("--table", o.common.table, "classification table file");
  app.add_option("--backend", o.common.backend, "serial, openmp (check also: nusmv)");
  app.add_option("--cap", o.common.cap, "state cap");

  auto* stats = app.add_subcommand("stats", "block tree statistics and classification");
  add_common(stats, o.common, false);
  stats->add_option("-o,--out", o.out, "output file");

  auto* translate = app.add_subcommand("translate", "emit a NuSMV model");
  add_common(translate, o.common);
  translate->add_option("-o,--out", o.out, "output file");
  translate->add_option("--assert", o.assertion, "auto|safety|liveness|capacity|none|<file>|<formula>");
  translate->add_flag("--faithful-listing", o.faithful, "emit Battery modules with the duplicated output1 term");
  translate->add_flag("--user-actions", o.user_actions, "leave user actions non-deterministic");

  auto* assert_cmd = app.add_subcommand("assert", "list generated assertions");
  add_common(assert_cmd, o.common);
  assert_cmd->add_option("-o,--out", o.out, "output file");
  assert_cmd->add_option("--assert", o.assertion, "auto|safety|liveness|capacity|none|<file>|<formula>");
  assert_cmd->add_option("--fail", o.fail, "Instance=errorState for a repair goal");
  assert_cmd->add_option("--goal", o.goal, "repair goal predicate");

  auto* check_cmd = app.add_subcommand("check", "check assertions with the internal checker");
  add_common(check_cmd, o.common);
  check_cmd->add_option("-o,--out", o.out, "output file");
  check_cmd->add_option("--assert", o.assertion, "auto|safety|liveness|capacity|<file>|<formula>");
  check_cmd->add_option("--bound", o.bound, "liveness lasso bound");
  check_cmd->add_option("--trace", o.trace, "write the first counterexample here");
  check_cmd->add_flag("--user-actions", o.user_actions, "leave user actions non-deterministic");
  check_cmd->add_flag("--faithful-listing", o.faithful, "with --backend nusmv");
  check_cmd->add_flag("--stats", o.stats, "search statistics on stderr");

  auto* merge_cmd = app.add_subcommand("merge", "collapse subsystems and report the reduction");
  add_common(merge_cmd, o.common);
  merge_cmd->add_option("-o,--out", o.out, "report file");
  merge_cmd->add_option("--smv", o.smv_out, "write the merged NuSMV model");
  merge_cmd->add_option("--trace", o.trace, "counterexample on the merged model to refine");
  merge_cmd->add_flag("--faithful-listing", o.faithful, "emit Battery modules with the duplicated output1 term");

  auto* plan = app.add_subcommand("plan", "search a repair plan");
  add_common(plan, o.common);
  plan->add_option("-o,--out", o.out, "output file");
  plan->add_option("--fail", o.fail, "Instance=errorState")->required();
  plan->add_option("--goal", o.goal, "goal predicate (conjunction)");
  plan->add_option("--keep", o.keep, "predicate every plan state must satisfy");
  plan->add_option("--trace", o.trace, "also write the plan here");
  plan->add_option("--smv", o.smv_out, "write the path-discovery NuSMV model");
  plan->add_flag("--toggle-guard", o.toggle_guard, "no user action on a variable in consecutive steps");
  plan->add_flag("--faults", o.faults, "allow spontaneous faults during the plan");
  plan->add_flag("--faithful-listing", o.faithful, "with --smv");

  auto* sim = app.add_subcommand("simulate", "run a script");
  add_common(sim, o.common, false);
  sim->add_option("--script", o.script, "script file");
  sim->add_option("--horizon", o.horizon, "steps after the initial state");
  sim->add_option("-o,--out", o.out, "trace file");

  auto* rep = app.add_subcommand("replay", "replay a trace through the simulator");
  add_common(rep, o.common);
  rep->add_option("--trace", o.trace, "trace file")->required();
  rep->add_option("-o,--out", o.out, "report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*stats) return cmd_stats(o);
    if (*translate) return cmd_translate(o);
    if (*assert_cmd) return cmd_assert(o);
    if (*check_cmd) return cmd_check(o);
    if (*merge_cmd) return cmd_merge(o);
    if (*plan) return cmd_plan(o);
    if (*sim) return cmd_simulate(o);
    if (*rep) return cmd_replay(o);
  } catch (const Error& e) {
    std::cerr << "sliced: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "sliced: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
