#include "sliced/smv_emit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "sliced/error.hpp"

namespace sliced {

namespace {

const std::set<std::string> kKeywords{
    "MODULE", "DEFINE", "MDEFINE", "CONSTANTS", "VAR", "IVAR", "FROZENVAR", "INIT", "TRANS",
    "INVAR", "SPEC", "CTLSPEC", "LTLSPEC", "PSLSPEC", "COMPUTE", "NAME", "INVARSPEC", "FAIRNESS",
    "JUSTICE", "COMPASSION", "ISA", "ASSIGN", "CONSTRAINT", "SIMPWFF", "CTLWFF", "LTLWFF",
    "PSLWFF", "COMPWFF", "IN", "MIN", "MAX", "MIRROR", "PRED", "PREDICATES", "process", "array",
    "of", "boolean", "integer", "real", "word", "word1", "bool", "signed", "unsigned", "extend",
    "resize", "sizeof", "uwconst", "swconst", "EX", "AX", "EF", "AF", "EG", "AG", "E", "F", "O",
    "G", "H", "X", "Y", "Z", "A", "U", "S", "V", "T", "BU", "EBF", "ABF", "EBG", "ABG", "case",
    "esac", "mod", "next", "init", "union", "in", "xor", "xnor", "self", "TRUE", "FALSE", "count",
    "abs", "max", "min", "main", "toint", "floor", "clock"};

// Variable and output names that collide with reserved words get a trailing
// underscore. `clock` is the global clock and stays as is.
std::string local_id(const std::string& name) {
  return kKeywords.count(name) && name != "clock" ? name + "_" : name;
}

std::string qualified_id(const std::string& name) {
  auto dot = name.find('.');
  if (dot == std::string::npos) return local_id(name);
  return name.substr(0, dot + 1) + local_id(name.substr(dot + 1));
}

std::string capitalise(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string join_values(const std::vector<long>& values, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

std::string value_set(const std::vector<long>& values) {
  if (values.size() == 1) return std::to_string(values.front());
  return "{" + join_values(values, ", ") + "}";
}

bool uses_clock(const ArchetypeSpec& spec) {
  if (spec.find_var("clock") || spec.find_output("clock")) return false;
  bool found = false;
  auto scan = [&](const Expr& e) {
    for (const std::string& n : collect_names(e)) found = found || n == "clock";
  };
  for (const VarSpec& v : spec.vars) {
    for (const Transition& t : v.transitions) {
      scan(t.guard);
      for (const Target& target : t.targets) scan(target.value);
    }
  }
  for (const OutputSpec& o : spec.outputs) scan(o.expr);
  return found;
}

bool has_fault_choice(const ArchetypeSpec& spec) {
  for (const VarSpec& v : spec.vars) {
    if (v.transitions.empty() && v.free_kind == ChoiceKind::Fault) return true;
    for (const Transition& t : v.transitions) {
      for (const Target& target : t.targets) {
        if (target.kind == ChoiceKind::Fault) return true;
      }
    }
  }
  return false;
}

struct ModuleDraft {
  std::string base;
  std::string suffix;
  std::vector<std::string> formals;
  std::string body;
};

std::size_t emitted_arity(const Instance& inst, const CompositeMachine& m, std::size_t index) {
  if (!inst.spec->downstream) return 0;
  return std::max(inst.spec->canonical_arity, m.wiring()[index].downstream.size());
}

ModuleDraft draft_module(const CompositeMachine& m, std::size_t index, const EmitOptions& options) {
  const Instance& inst = m.instances()[index];
  const ArchetypeSpec& spec = *inst.spec;
  const std::size_t arity = emitted_arity(inst, m, index);

  ModuleDraft d;
  d.base = spec.name;
  if (spec.upstream) d.formals.push_back("input");
  for (std::size_t k = 1; k <= arity; ++k) d.formals.push_back("output" + std::to_string(k));
  if (uses_clock(spec)) d.formals.push_back("clock");
  for (const ParamSpec& p : spec.params) d.formals.push_back(p.name);

  // Aspects that make this body differ from the archetype's plain module.
  for (const auto& [var, values] : inst.init_override) {
    const VarSpec* v = spec.find_var(var);
    if (v && !v->domain.labels.empty() && values.size() == 1) {
      d.suffix += "Start" + capitalise(v->domain.labels[static_cast<std::size_t>(values.front())]);
    } else {
      d.suffix += "Start" + join_values(values, "_");
    }
  }
  if (!inst.domain_override.empty()) d.suffix += "Dom";
  if (!inst.faults && m.nondet().faults && has_fault_choice(spec)) d.suffix += "NoFault";
  if (spec.downstream && arity > spec.canonical_arity) d.suffix += "_o" + std::to_string(arity);

  PrintStyle style;
  style.leaf = [&](const Expr& e) -> std::string {
    if (e.op != Op::DownSum) return qualified_id(e.name);
    if (arity == 0) return "0";
    if (arity == 1) return "output1." + e.name;
    std::string out = "(";
    for (std::size_t k = 1; k <= arity; ++k) {
      if (k > 1) out += " + ";
      std::size_t slot = (options.faithful_listing && spec.faithful_duplicate_sum) ? 1 : k;
      out += "output" + std::to_string(slot) + "." + e.name;
    }
    return out + ")";
  };

  std::ostringstream body;
  if (!spec.vars.empty()) {
    body << "VAR\n";
    for (const VarSpec& v : spec.vars) {
      body << "  " << local_id(v.name) << " : ";
      if (auto it = inst.domain_override.find(v.name); it != inst.domain_override.end()) {
        std::vector<long> values = var_domain(inst, v);
        body << "{" << join_values(values, ", ") << "}";
      } else if (!v.domain.labels.empty()) {
        body << "{";
        for (std::size_t i = 0; i < v.domain.labels.size(); ++i) {
          body << (i ? "," : "") << v.domain.labels[i];
        }
        body << "}";
      } else if (v.domain.boolean) {
        body << "boolean";
      } else {
        body << print_expr(v.domain.lo, style) << " .. " << print_expr(v.domain.hi, style);
      }
      body << ";\n";
    }
  }
  if (!spec.outputs.empty()) {
    body << "DEFINE\n";
    for (const OutputSpec& o : spec.outputs) {
      body << "  " << local_id(o.name) << " := " << print_expr(o.expr, style) << ";\n";
    }
  }

  std::vector<std::string> inits;
  std::vector<std::string> nexts;
  for (const VarSpec& v : spec.vars) {
    const std::string id = local_id(v.name);
    if (auto it = inst.init_override.find(v.name); it != inst.init_override.end()) {
      std::vector<long> values = var_initial(inst, v);
      std::string text;
      if (!v.domain.labels.empty()) {
        std::vector<std::string> names;
        for (long x : values) names.push_back(v.domain.labels[static_cast<std::size_t>(x)]);
        if (names.size() == 1) {
          text = names.front();
        } else {
          text = "{";
          for (std::size_t i = 0; i < names.size(); ++i) text += (i ? ", " : "") + names[i];
          text += "}";
        }
      } else if (v.domain.boolean) {
        text = values.size() == 1 ? (values.front() ? "TRUE" : "FALSE") : "{FALSE, TRUE}";
      } else {
        text = value_set(values);
      }
      inits.push_back("  init(" + id + ") := " + text + ";\n");
    } else if (v.init) {
      inits.push_back("  init(" + id + ") := " + print_expr(*v.init, style) + ";\n");
    }

    if (v.transitions.empty()) {
      if (!m.nondet().allows(v.free_kind, inst.faults)) {
        nexts.push_back("  next(" + id + ") := " + id + ";\n");
      }
      continue;
    }
    std::ostringstream next;
    next << "  next(" << id << ") := case\n";
    for (const Transition& t : v.transitions) {
      std::vector<std::string> targets;
      for (const Target& target : t.targets) {
        if (!m.nondet().allows(target.kind, inst.faults)) continue;
        std::string text = print_expr(target.value, style);
        if (std::find(targets.begin(), targets.end(), text) == targets.end()) targets.push_back(text);
      }
      next << "    " << print_expr(t.guard, style) << " : ";
      if (targets.empty()) {
        next << id;
      } else if (targets.size() == 1) {
        next << targets.front();
      } else {
        next << "{";
        for (std::size_t i = 0; i < targets.size(); ++i) next << (i ? ", " : "") << targets[i];
        next << "}";
      }
      next << ";\n";
    }
    next << "  esac;\n";
    nexts.push_back(next.str());
  }
  if (!inits.empty() || !nexts.empty()) {
    body << "ASSIGN\n";
    for (const std::string& s : inits) body << s;
    for (const std::string& s : nexts) body << (inits.empty() && &s == &nexts.front() ? "" : "\n") << s;
  }
  d.body = body.str();
  return d;
}

std::string header_line(const std::string& name, const std::vector<std::string>& formals) {
  std::string out = "MODULE " + name;
  if (!formals.empty()) {
    out += "(";
    for (std::size_t i = 0; i < formals.size(); ++i) out += (i ? ", " : "") + formals[i];
    out += ")";
  }
  return out + "\n";
}

struct Layout {
  std::map<std::string, std::string> smv_name;    // instance -> identifier
  std::vector<std::string> module_of;              // per instance index
  std::map<std::string, std::string> module_text;  // module name -> full text
  std::set<std::string> padding_fields;
};

std::string unique_identifier(const std::string& raw, std::set<std::string>& taken) {
  std::string id = sanitize_identifier(raw);
  std::string candidate = id;
  for (int k = 2; taken.count(candidate); ++k) candidate = id + "_" + std::to_string(k);
  taken.insert(candidate);
  return candidate;
}

Layout layout(const CompositeMachine& m, const EmitOptions& options) {
  Layout l;
  std::set<std::string> taken{"no_load", "clock"};
  for (const Instance& inst : m.instances()) l.smv_name[inst.name] = unique_identifier(inst.name, taken);

  std::map<std::string, std::string> by_content;  // header+body -> module name
  std::set<std::string> used;
  for (std::size_t i = 0; i < m.instances().size(); ++i) {
    ModuleDraft d = draft_module(m, i, options);
    std::string key = header_line("", d.formals) + d.body;
    std::string name = d.base + d.suffix;
    if (auto it = by_content.find(name + "\n" + key); it != by_content.end()) {
      l.module_of.push_back(it->second);
      continue;
    }
    std::string candidate = name;
    for (int k = 2; used.count(candidate); ++k) candidate = name + "_" + std::to_string(k);
    used.insert(candidate);
    by_content[name + "\n" + key] = candidate;
    l.module_of.push_back(candidate);
    l.module_text[candidate] = header_line(candidate, d.formals) + d.body;
  }
  for (std::size_t i = 0; i < m.instances().size(); ++i) {
    const Instance& inst = m.instances()[i];
    if (emitted_arity(inst, m, i) > m.wiring()[i].downstream.size()) {
      for (const std::string& f : downstream_fields(*inst.spec)) l.padding_fields.insert(f);
    }
  }
  return l;
}

std::string print_formula(const Expr& e, const Layout& l) {
  PrintStyle style;
  style.leaf = [&](const Expr& leaf) -> std::string {
    auto dot = leaf.name.find('.');
    if (dot == std::string::npos) return leaf.name;
    auto it = l.smv_name.find(leaf.name.substr(0, dot));
    if (it == l.smv_name.end()) return leaf.name;
    return it->second + "." + qualified_id(leaf.name.substr(dot + 1));
  };
  return print_expr(e, style);
}

std::string strip_parens(std::string s) {
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    int depth = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (depth == 0) return s;
    }
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

std::string sanitize_identifier(const std::string& name) {
  std::string out;
  for (char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out = "_" + out;
  if (kKeywords.count(out)) out += "_";
  return out;
}

std::string emit_module(const CompositeMachine& m, const std::string& instance, const EmitOptions& options) {
  auto idx = m.find_instance(instance);
  if (!idx) throw Error(ErrorKind::UnknownInstance, "'" + instance + "'");
  Layout l = layout(m, options);
  return l.module_text.at(l.module_of[*idx]);
}

std::string emit(const CompositeMachine& m, const std::vector<Assertion>& asserts, const EmitOptions& options) {
  Layout l = layout(m, options);
  std::ostringstream out;
  out << "-- generated by sliced";
  if (!options.tool_version.empty()) out << " " << options.tool_version;
  out << "\n";
  bool any_path = false;
  for (const Instance& inst : m.instances()) any_path = any_path || !inst.source_path.empty();
  if (any_path) {
    out << "-- instance map (SMV name <- model path)\n";
    for (const Instance& inst : m.instances()) {
      if (inst.source_path.empty()) continue;
      out << "--   " << l.smv_name.at(inst.name) << " <- " << inst.source_path << "\n";
    }
  }
  for (const MergeRecord& r : m.merges) {
    out << "-- " << l.smv_name.at(r.merged) << " replaces";
    for (const std::string& member : r.members) out << " " << member;
    out << "\n";
  }
  out << "\n";

  for (const auto& [name, text] : l.module_text) out << text << "\n";
  if (!l.padding_fields.empty()) {
    out << "MODULE NoLoad\nDEFINE\n";
    for (const std::string& f : l.padding_fields) out << "  " << f << " := " << (f == "draw" ? "0" : "FALSE") << ";\n";
    out << "\n";
  }

  out << "MODULE main\n";
  bool has_vars = !m.instances().empty() || m.clock() || !l.padding_fields.empty();
  if (has_vars) out << "VAR\n";
  for (std::size_t i = 0; i < m.instances().size(); ++i) {
    const Instance& inst = m.instances()[i];
    const Wiring& w = m.wiring()[i];
    std::vector<std::string> args;
    if (inst.spec->upstream) {
      if (!w.upstream) {
        throw Error(ErrorKind::UnsupportedConstruct, inst.name + " has no upstream instance to pass as input");
      }
      args.push_back(l.smv_name.at(m.instances()[*w.upstream].name));
    }
    const std::size_t arity = emitted_arity(inst, m, i);
    for (std::size_t k = 0; k < arity; ++k) {
      args.push_back(k < w.downstream.size() ? l.smv_name.at(m.instances()[w.downstream[k]].name) : "no_load");
    }
    if (uses_clock(*inst.spec)) args.push_back("clock");
    for (const ParamSpec& p : inst.spec->params) args.push_back(std::to_string(inst.params.at(p.name)));
    out << "  " << l.smv_name.at(inst.name) << " : " << l.module_of[i];
    if (!args.empty()) {
      out << "(";
      for (std::size_t k = 0; k < args.size(); ++k) out << (k ? ", " : "") << args[k];
      out << ")";
    }
    out << ";\n";
  }
  if (!l.padding_fields.empty()) out << "  no_load : NoLoad;\n";
  if (m.clock()) {
    const MachineVar& clock = m.vars()[*m.find_var("clock")];
    out << "  clock : {" << join_values(clock.domain, ", ") << "};\n";
    out << "ASSIGN\n";
    out << "  init(clock) := 0;\n";
    out << "  next(clock) := (clock + " << m.clock()->tick << ") mod " << m.clock()->cycle << ";\n";
  }

  if (!asserts.empty()) out << "\n";
  for (const Assertion& a : asserts) {
    if (!a.provenance.empty()) out << "-- " << a.provenance << "\n";
    const Expr& f = a.formula;
    if (a.flavor == Flavor::RepairGoal && f.op == Op::Globally && f.args[0].op == Op::Or) {
      out << "LTLSPEC G(\n";
      const auto& parts = f.args[0].args;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        out << "  " << strip_parens(print_formula(parts[i], l)) << (i + 1 < parts.size() ? " |\n" : " )\n");
      }
    } else {
      out << "LTLSPEC " << print_formula(f, l) << "\n";
    }
  }
  return out.str();
}

std::string verdict_header(const Assertion& a, bool holds) {
  // NuSMV echoes the specification without the outer parentheses.
  std::string text = print_expr(a.formula);
  if (a.formula.op == Op::Globally || a.formula.op == Op::Finally) {
    std::string inner = print_expr(a.formula.args[0]);
    if (a.formula.args[0].is_temporal()) {
      text = std::string(a.formula.op == Op::Globally ? "G " : "F ") + inner;
    } else {
      text = std::string(a.formula.op == Op::Globally ? "G " : "F ") + strip_parens(inner);
    }
  }
  std::string out = "-- specification  " + text + "  is " + (holds ? "true" : "false") + "\n";
  if (!holds) out += "-- as demonstrated by the following execution sequence\n";
  return out;
}

std::string emit_trace(const Trace& t, const std::string& header) {
  std::ostringstream out;
  out << header;
  if (t.kind == TraceKind::Simulation) {
    out << "Trace Description: Simulation Trace\nTrace Type: Simulation\n";
  } else {
    out << "Trace Description: LTL Counterexample\nTrace Type: Counterexample\n";
  }
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    if (t.loop_start && *t.loop_start == k) out << "-- Loop starts here\n";
    out << "-> State: 1." << (k + 1) << " <-\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (k > 0 && t.steps[k][c] == t.steps[k - 1][c]) continue;
      out << t.columns[c].name << " = " << format_value(t.columns[c], t.steps[k][c]) << "\n";
    }
  }
  return out.str();
}

Trace parse_trace(const std::string& text, const CompositeMachine* m) {
  Trace t;
  std::vector<std::vector<std::string>> raw;  // per step, per column (empty = carried)
  std::map<std::string, std::size_t> index;
  std::vector<std::string> names;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool loop_pending = false;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = line.find_first_not_of(' ');
    if (start == std::string::npos) continue;
    line = line.substr(start);
    if (line.rfind("-- Loop starts here", 0) == 0) {
      loop_pending = true;
      continue;
    }
    if (line.rfind("--", 0) == 0 || line.rfind("Trace ", 0) == 0 || line.rfind("***", 0) == 0) {
      if (line.rfind("Trace Type: Simulation", 0) == 0) t.kind = TraceKind::Simulation;
      continue;
    }
    if (line.rfind("->", 0) == 0) {
      if (line.find("State:") == std::string::npos) continue;  // input blocks
      raw.emplace_back(names.size());
      if (loop_pending) {
        t.loop_start = raw.size() - 1;
        loop_pending = false;
      }
      continue;
    }
    auto eq = line.find(" = ");
    if (eq == std::string::npos || raw.empty()) {
      throw Error(ErrorKind::Syntax, "trace line " + std::to_string(lineno) + ": unexpected '" + line + "'");
    }
    std::string name = line.substr(0, eq);
    std::string value = line.substr(eq + 3);
    auto [it, inserted] = index.emplace(name, names.size());
    if (inserted) {
      names.push_back(name);
      for (auto& step : raw) step.resize(names.size());
    }
    raw.back()[it->second] = value;
  }
  if (raw.empty()) throw Error(ErrorKind::Syntax, "trace has no states");

  for (std::size_t c = 0; c < names.size(); ++c) {
    Column col;
    col.name = names[c];
    bool typed = false;
    if (m) {
      // NuSMV echoes reserved-word fields with the emitter's trailing underscore.
      bool known_name = false;
      for (const Column& mc : m->columns()) known_name = known_name || mc.name == col.name;
      if (!known_name && col.name.size() > 1 && col.name.back() == '_') col.name.pop_back();
      for (const Column& mc : m->columns()) {
        if (mc.name == col.name) {
          col = mc;
          typed = true;
        }
      }
    }
    if (!typed) {
      bool all_bool = true, all_int = true;
      std::vector<std::string> labels;
      for (const auto& step : raw) {
        const std::string& v = step[c];
        if (v.empty()) continue;
        if (v != "TRUE" && v != "FALSE") all_bool = false;
        long parsed = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
        if (ec != std::errc{} || p != v.data() + v.size()) all_int = false;
        if (std::find(labels.begin(), labels.end(), v) == labels.end()) labels.push_back(v);
      }
      if (all_bool) {
        col.boolean = true;
      } else if (!all_int) {
        col.labels = labels;
      }
    }
    t.columns.push_back(std::move(col));
  }
  std::vector<long> current(names.size(), 0);
  std::vector<bool> known(names.size(), false);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      const std::string& v = raw[k][c];
      if (v.empty()) {
        if (!known[c]) {
          throw Error(ErrorKind::Syntax, "trace column '" + names[c] + "' has no value in state 1." +
                                             std::to_string(k + 1));
        }
        continue;
      }
      auto parsed = parse_value(t.columns[c], v);
      if (!parsed) {
        throw Error(ErrorKind::Syntax, "trace value '" + v + "' is not valid for '" + names[c] + "'");
      }
      current[c] = *parsed;
      known[c] = true;
    }
    t.steps.push_back(current);
  }
  return t;
}

}  // namespace sliced
