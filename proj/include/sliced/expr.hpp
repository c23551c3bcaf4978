#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sliced {

// Expression tree shared by archetype templates, linked machines and
// temporal assertions. Template expressions use Name/DownSum nodes; linking
// rewrites them to Var/Define/IntConst nodes that the evaluator understands.
enum class Op : unsigned char {
  IntConst,
  BoolConst,
  Label,    // enumeration literal; `value` holds the index once resolved
  Name,     // unresolved (possibly dotted) identifier
  Var,      // state variable, `value` = index into the machine's variables
  Define,   // defined output, `value` = index into the machine's defines
  DownSum,  // sum of `name` over every downstream binding (templates only)
  Not,
  And,
  Or,
  Implies,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Case,  // args = guard0, value0, guard1, value1, ...
  Globally,
  Finally,
  Next,
  Until,
};

struct Expr {
  Op op = Op::IntConst;
  long value = 0;
  std::string name;
  std::vector<Expr> args;

  static Expr integer(long v);
  static Expr boolean(bool v);
  static Expr label(std::string text);
  static Expr ref(std::string text);
  static Expr var(std::size_t index, std::string text);
  static Expr define(std::size_t index, std::string text);
  static Expr down_sum(std::string field);
  static Expr unary(Op op, Expr operand);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr nary(Op op, std::vector<Expr> operands);
  static Expr case_of(std::vector<std::pair<Expr, Expr>> arms);

  bool is_temporal() const;
  bool is_comparison() const;
  bool operator==(const Expr&) const = default;
};

// Parses the predicate/temporal grammar documented in docs/assertions.md.
// Throws Error(Syntax) carrying the column of the offending token.
Expr parse_expr(std::string_view text);

struct PrintStyle {
  // Renders Name, Var, Define and DownSum leaves. Defaults to `name`.
  std::function<std::string(const Expr&)> leaf;
  int indent = 2;
};

// NuSMV surface syntax: every binary operator is parenthesised, `!` wraps a
// bare operand in parentheses, `case` spans several lines.
std::string print_expr(const Expr& e, const PrintStyle& style = {});

// Every Name leaf, in first-occurrence order.
std::vector<std::string> collect_names(const Expr& e);

// Resolution of Name leaves. Returning nullopt leaves the name in place so the
// caller can report it; labels compared against an enumerated reference are
// rewritten to Label nodes holding their index.
struct NameBinding {
  Expr node;                              // replacement leaf
  const std::vector<std::string>* labels; // set for enumerated references
};
using NameLookup = std::function<std::optional<NameBinding>(const std::string&)>;

Expr resolve_names(const Expr& e, const NameLookup& lookup,
                   const std::vector<std::string>* label_context = nullptr);

// Evaluates a linked expression. Booleans are 0/1.
long eval_expr(const Expr& e, std::span<const long> vars, std::span<const long> defines);

// Interval bound of a linked expression given per-variable and per-define ranges.
struct Interval {
  long lo = 0;
  long hi = 0;
};
Interval eval_interval(const Expr& e, std::span<const Interval> vars,
                       std::span<const Interval> defines);

bool is_boolean_expr(const Expr& e, const std::function<bool(const Expr&)>& leaf_is_bool);

// Logical negation pushed through comparisons (De Morgan over And/Or).
Expr negate(const Expr& e);

// Splits a top-level conjunction into its conjuncts.
std::vector<Expr> conjuncts(const Expr& e);

}  // namespace sliced
