#pragma once

// Test-only reader for the SMV subset the emitter writes: enumerated and
// ranged VARs, DEFINEs, init() and next() case blocks, and main's instance
// declarations. Expressions go through parse_expr.

#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "sliced/error.hpp"
#include "sliced/expr.hpp"

namespace smv {

struct Var {
  std::string name;
  std::vector<std::string> labels;  // enumerated when non-empty
  std::string lo, hi;               // range bounds (literal or formal)
};

struct Module {
  std::string name;
  std::vector<std::string> formals;
  std::vector<Var> vars;
  std::vector<std::pair<std::string, std::string>> defines;
  std::map<std::string, std::string> init;
  std::map<std::string, std::string> next;  // full right-hand side text
};

struct Program {
  std::map<std::string, Module> modules;
  std::map<std::string, std::pair<std::string, std::vector<std::string>>> instances;  // name -> (module, args)
};

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

inline int case_depth(const std::string& text) {
  static const std::regex word(R"(\b(case|esac)\b)");
  int d = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), word); it != std::sregex_iterator(); ++it) {
    d += (*it)[1] == "case" ? 1 : -1;
  }
  return d;
}

inline Program read(const std::string& text) {
  Program p;
  std::istringstream in(text);
  std::string line;
  Module* cur = nullptr;
  std::string section;
  std::string pending;
  static const std::regex header(R"(MODULE\s+(\w+)(?:\((.*)\))?)");
  static const std::regex decl(R"((\w+)\s*:\s*(.*);)");
  static const std::regex assign(R"((\w+)(?:\((\w+)\))?\s*:=\s*([\s\S]*);)");
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (auto c = t.find("--"); c != std::string::npos) t = trim(t.substr(0, c));
    if (t.empty()) continue;
    std::smatch m;
    if (std::regex_match(t, m, header)) {
      cur = &p.modules[m[1]];
      cur->name = m[1];
      cur->formals = split(m[2], ',');
      section.clear();
      continue;
    }
    if (t == "VAR" || t == "DEFINE" || t == "ASSIGN") {
      section = t;
      continue;
    }
    if (t.rfind("LTLSPEC", 0) == 0) {
      cur = nullptr;
      continue;
    }
    if (!cur) continue;
    pending += (pending.empty() ? "" : "\n") + t;
    if (pending.back() != ';' || case_depth(pending) != 0) continue;
    std::string stmt = pending;
    pending.clear();
    if (section == "VAR") {
      if (!std::regex_match(stmt, m, decl)) throw std::runtime_error("bad VAR: " + stmt);
      std::string type = trim(m[2]);
      if (cur->name == "main") {
        auto open = type.find('(');
        std::string module = open == std::string::npos ? type : type.substr(0, open);
        std::vector<std::string> args;
        if (open != std::string::npos) args = split(type.substr(open + 1, type.rfind(')') - open - 1), ',');
        p.instances[m[1]] = {module, args};
        continue;
      }
      Var v;
      v.name = m[1];
      if (type.front() == '{') {
        v.labels = split(type.substr(1, type.size() - 2), ',');
      } else if (type == "boolean") {
        v.lo = "0";
        v.hi = "1";
      } else {
        auto dots = type.find("..");
        v.lo = trim(type.substr(0, dots));
        v.hi = trim(type.substr(dots + 2));
      }
      cur->vars.push_back(v);
    } else {
      if (!std::regex_match(stmt, m, assign)) throw std::runtime_error("bad statement: " + stmt);
      if (section == "DEFINE") {
        cur->defines.emplace_back(m[1], m[3]);
      } else if (m[1] == "init") {
        cur->init[m[2]] = m[3];
      } else if (m[1] == "next") {
        cur->next[m[2]] = m[3];
      }
    }
  }
  return p;
}

// Evaluates one instance of a module given its variable values and the
// values of every `<formal>.<field>` reference.
class Evaluator {
 public:
  Evaluator(const Module& mod, std::map<std::string, long> params) : mod_(mod), params_(std::move(params)) {}

  std::vector<long> domain(const Var& v) const {
    std::vector<long> out;
    if (!v.labels.empty()) {
      for (std::size_t i = 0; i < v.labels.size(); ++i) out.push_back(static_cast<long>(i));
      return out;
    }
    for (long x = number(v.lo); x <= number(v.hi); ++x) out.push_back(x);
    return out;
  }

  // Values allowed by a right-hand side: a single expression or a {a, b} set.
  std::vector<long> values(const Var& v, const std::string& rhs, const std::map<std::string, long>& env) const {
    std::string t = trim(rhs);
    if (t.front() == '{') {
      std::vector<long> out;
      for (const std::string& part : split(t.substr(1, t.size() - 2), ',')) {
        for (long x : values(v, part, env)) out.push_back(x);
      }
      return out;
    }
    for (std::size_t i = 0; i < v.labels.size(); ++i) {
      if (v.labels[i] == t) return {static_cast<long>(i)};
    }
    return {eval(t, env, &v)};
  }

  std::vector<long> init(const Var& v) const {
    auto it = mod_.init.find(v.name);
    if (it == mod_.init.end()) return domain(v);
    return values(v, it->second, {});
  }

  // Candidate next values of `v` from the first true arm of its case block,
  // or the whole domain when the module leaves it unassigned.
  std::vector<long> next(const Var& v, const std::map<std::string, long>& state,
                         const std::map<std::string, long>& inputs) const {
    auto env = environment(state, inputs);
    auto it = mod_.next.find(v.name);
    if (it == mod_.next.end()) return domain(v);
    std::string rhs = trim(it->second);
    if (rhs.rfind("case", 0) != 0) return values(v, rhs, env);
    std::istringstream arms(rhs);
    std::string arm;
    while (std::getline(arms, arm)) {
      arm = trim(arm);
      if (arm == "case" || arm == "esac" || arm.empty()) continue;
      auto colon = arm.rfind(" : ");
      std::string guard = arm.substr(0, colon);
      std::string value = arm.substr(colon + 3);
      if (value.back() == ';') value.pop_back();
      if (eval(guard, env, nullptr)) return values(v, value, env);
    }
    throw std::runtime_error("no arm applies for " + v.name);
  }

  std::map<std::string, long> environment(const std::map<std::string, long>& state,
                                          const std::map<std::string, long>& inputs) const {
    std::map<std::string, long> env = inputs;
    for (const auto& [k, v] : state) env[k] = v;
    for (const auto& [k, v] : params_) env[k] = v;
    for (const auto& [name, text] : mod_.defines) env[name] = eval(text, env, nullptr);
    return env;
  }

 private:
  const Module& mod_;
  std::map<std::string, long> params_;

  long number(const std::string& s) const {
    if (auto it = params_.find(s); it != params_.end()) return it->second;
    return std::stol(s);
  }

  long eval(const std::string& text, const std::map<std::string, long>& env, const Var* context) const {
    using namespace sliced;
    Expr e = parse_expr(text);
    Expr linked = resolve_names(
        e,
        [&](const std::string& name) -> std::optional<NameBinding> {
          auto it = env.find(name);
          if (it == env.end()) return std::nullopt;
          const std::vector<std::string>* labels = nullptr;
          for (const Var& v : mod_.vars) {
            if (v.name == name && !v.labels.empty()) labels = &v.labels;
          }
          return NameBinding{Expr::integer(it->second), labels};
        },
        context && !context->labels.empty() ? &context->labels : nullptr);
    if (auto left = collect_names(linked); !left.empty()) throw std::runtime_error("unbound " + left.front());
    return eval_expr(linked, {}, {});
  }
};

}  // namespace smv
