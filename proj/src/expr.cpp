#include "sliced/expr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "sliced/error.hpp"

namespace sliced {

Expr Expr::integer(long v) { return Expr{Op::IntConst, v, {}, {}}; }
Expr Expr::boolean(bool v) { return Expr{Op::BoolConst, v ? 1 : 0, {}, {}}; }
Expr Expr::label(std::string text) { return Expr{Op::Label, -1, std::move(text), {}}; }
Expr Expr::ref(std::string text) { return Expr{Op::Name, 0, std::move(text), {}}; }
Expr Expr::var(std::size_t index, std::string text) {
  return Expr{Op::Var, static_cast<long>(index), std::move(text), {}};
}
Expr Expr::define(std::size_t index, std::string text) {
  return Expr{Op::Define, static_cast<long>(index), std::move(text), {}};
}
Expr Expr::down_sum(std::string field) { return Expr{Op::DownSum, 0, std::move(field), {}}; }
Expr Expr::unary(Op op, Expr operand) { return Expr{op, 0, {}, {std::move(operand)}}; }
Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  return Expr{op, 0, {}, {std::move(lhs), std::move(rhs)}};
}
Expr Expr::nary(Op op, std::vector<Expr> operands) { return Expr{op, 0, {}, std::move(operands)}; }
Expr Expr::case_of(std::vector<std::pair<Expr, Expr>> arms) {
  Expr e{Op::Case, 0, {}, {}};
  for (auto& [guard, value] : arms) {
    e.args.push_back(std::move(guard));
    e.args.push_back(std::move(value));
  }
  return e;
}

bool Expr::is_temporal() const {
  return op == Op::Globally || op == Op::Finally || op == Op::Next || op == Op::Until;
}

bool Expr::is_comparison() const {
  return op == Op::Eq || op == Op::Ne || op == Op::Lt || op == Op::Le || op == Op::Gt ||
         op == Op::Ge;
}

namespace {

enum class Tok {
  End,
  Int,
  Ident,
  LParen,
  RParen,
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
  Plus,
  Minus,
  Colon,
  Semi,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long number = 0;
  std::size_t column = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.column = pos_ + 1;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        t.kind = Tok::Int;
        t.text = std::string(text_.substr(start, pos_ - start));
        t.number = std::stol(t.text);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
          char d = text_[pos_];
          if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
            ++pos_;
          } else {
            break;
          }
        }
        t.kind = Tok::Ident;
        t.text = std::string(text_.substr(start, pos_ - start));
        if (t.text.back() == '.') fail(t.column, "identifier ends with '.'");
      } else if (match("->") || match("\xE2\x86\x92")) {
        t.kind = Tok::Implies;
      } else if (match("!=") || match("\xE2\x89\xA0")) {
        t.kind = Tok::Ne;
      } else if (match("<=") || match("\xE2\x89\xA4")) {
        t.kind = Tok::Le;
      } else if (match(">=") || match("\xE2\x89\xA5")) {
        t.kind = Tok::Ge;
      } else if (match("\xC2\xAC")) {
        t.kind = Tok::Not;
      } else if (match("\xE2\x88\xA7")) {
        t.kind = Tok::And;
      } else if (match("\xE2\x88\xA8")) {
        t.kind = Tok::Or;
      } else {
        ++pos_;
        switch (c) {
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '!': t.kind = Tok::Not; break;
          case '&': t.kind = Tok::And; break;
          case '|': t.kind = Tok::Or; break;
          case '=': t.kind = Tok::Eq; break;
          case '<': t.kind = Tok::Lt; break;
          case '>': t.kind = Tok::Gt; break;
          case '+': t.kind = Tok::Plus; break;
          case '-': t.kind = Tok::Minus; break;
          case ':': t.kind = Tok::Colon; break;
          case ';': t.kind = Tok::Semi; break;
          default: fail(t.column, std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool match(std::string_view s) {
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }
  [[noreturn]] static void fail(std::size_t column, const std::string& what) {
    throw Error(ErrorKind::Syntax, "column " + std::to_string(column) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Expr parse() {
    Expr e = until();
    if (peek().kind != Tok::End) fail("trailing input");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }
  bool is_keyword(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Syntax, "column " + std::to_string(peek().column) + ": " + what);
  }

  Expr until() {
    Expr lhs = implies();
    if (is_keyword("U")) {
      ++pos_;
      return Expr::binary(Op::Until, std::move(lhs), until());
    }
    return lhs;
  }

  Expr implies() {
    Expr lhs = disjunction();
    if (accept(Tok::Implies)) return Expr::binary(Op::Implies, std::move(lhs), implies());
    return lhs;
  }

  Expr disjunction() {
    std::vector<Expr> parts{conjunction()};
    while (accept(Tok::Or)) parts.push_back(conjunction());
    if (parts.size() == 1) return std::move(parts.front());
    return Expr::nary(Op::Or, std::move(parts));
  }

  Expr conjunction() {
    std::vector<Expr> parts{temporal()};
    while (accept(Tok::And)) parts.push_back(temporal());
    if (parts.size() == 1) return std::move(parts.front());
    return Expr::nary(Op::And, std::move(parts));
  }

  Expr temporal() {
    if (peek().kind == Tok::Ident && toks_[pos_ + 1].kind != Tok::End) {
      const std::string& t = peek().text;
      Op op{};
      bool prefix = true;
      if (t == "G") {
        op = Op::Globally;
      } else if (t == "F") {
        op = Op::Finally;
      } else if (t == "X") {
        op = Op::Next;
      } else {
        prefix = false;
      }
      if (prefix) {
        ++pos_;
        return Expr::unary(op, temporal());
      }
    }
    return comparison();
  }

  Expr comparison() {
    Expr lhs = additive();
    Op op{};
    switch (peek().kind) {
      case Tok::Eq: op = Op::Eq; break;
      case Tok::Ne: op = Op::Ne; break;
      case Tok::Lt: op = Op::Lt; break;
      case Tok::Le: op = Op::Le; break;
      case Tok::Gt: op = Op::Gt; break;
      case Tok::Ge: op = Op::Ge; break;
      default: return lhs;
    }
    ++pos_;
    return Expr::binary(op, std::move(lhs), additive());
  }

  Expr additive() {
    Expr lhs = negation();
    std::vector<Expr> sum;
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      if (take().kind == Tok::Plus) {
        if (sum.empty()) sum.push_back(std::move(lhs));
        sum.push_back(negation());
      } else {
        if (!sum.empty()) {
          lhs = Expr::nary(Op::Add, std::move(sum));
          sum.clear();
        }
        lhs = Expr::binary(Op::Sub, std::move(lhs), negation());
      }
    }
    if (!sum.empty()) return Expr::nary(Op::Add, std::move(sum));
    return lhs;
  }

  Expr negation() {
    if (accept(Tok::Not)) return Expr::unary(Op::Not, negation());
    if (accept(Tok::Minus)) {
      if (peek().kind != Tok::Int) fail("expected integer after unary '-'");
      return Expr::integer(-take().number);
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: ++pos_; return Expr::integer(t.number);
      case Tok::LParen: {
        ++pos_;
        Expr e = until();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        if (t.text == "TRUE") {
          ++pos_;
          return Expr::boolean(true);
        }
        if (t.text == "FALSE") {
          ++pos_;
          return Expr::boolean(false);
        }
        if (t.text == "case") {
          ++pos_;
          std::vector<std::pair<Expr, Expr>> arms;
          while (!is_keyword("esac")) {
            if (peek().kind == Tok::End) fail("unterminated case");
            Expr g = until();
            expect(Tok::Colon, "':'");
            Expr v = until();
            expect(Tok::Semi, "';'");
            arms.emplace_back(std::move(g), std::move(v));
          }
          ++pos_;
          if (arms.empty()) fail("empty case");
          return Expr::case_of(std::move(arms));
        }
        if (t.text == "sum" && toks_[pos_ + 1].kind == Tok::LParen) {
          pos_ += 2;
          if (peek().kind != Tok::Ident) fail("expected field name");
          std::string field = take().text;
          expect(Tok::RParen, "')'");
          return Expr::down_sum(std::move(field));
        }
        if (t.text == "G" || t.text == "F" || t.text == "X" || t.text == "U" ||
            t.text == "esac") {
          fail("reserved word '" + t.text + "'");
        }
        ++pos_;
        return Expr::ref(t.text);
      }
      default: fail("expected an operand");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool parenthesised(Op op) {
  switch (op) {
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Add:
    case Op::Sub:
    case Op::Until: return true;
    default: return false;
  }
}

const char* infix(Op op) {
  switch (op) {
    case Op::And: return " & ";
    case Op::Or: return " | ";
    case Op::Implies: return " -> ";
    case Op::Eq: return " = ";
    case Op::Ne: return " != ";
    case Op::Lt: return " < ";
    case Op::Le: return " <= ";
    case Op::Gt: return " > ";
    case Op::Ge: return " >= ";
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Until: return " U ";
    default: return " ? ";
  }
}

void print_into(std::ostringstream& out, const Expr& e, const PrintStyle& style, int indent) {
  switch (e.op) {
    case Op::IntConst: out << e.value; return;
    case Op::BoolConst: out << (e.value ? "TRUE" : "FALSE"); return;
    case Op::Label: out << e.name; return;
    case Op::Name:
    case Op::Var:
    case Op::Define:
      if (style.leaf) {
        out << style.leaf(e);
      } else {
        out << e.name;
      }
      return;
    case Op::DownSum:
      if (style.leaf) {
        out << style.leaf(e);
      } else {
        out << "sum(" << e.name << ")";
      }
      return;
    case Op::Not:
      out << '!';
      if (parenthesised(e.args[0].op)) {
        print_into(out, e.args[0], style, indent);
      } else {
        out << '(';
        print_into(out, e.args[0], style, indent);
        out << ')';
      }
      return;
    case Op::Globally:
    case Op::Finally:
    case Op::Next: {
      out << (e.op == Op::Globally ? 'G' : e.op == Op::Finally ? 'F' : 'X');
      const Expr& a = e.args[0];
      if (a.op == Op::Globally || a.op == Op::Finally || a.op == Op::Next) {
        out << ' ';
        print_into(out, a, style, indent);
      } else if (parenthesised(a.op)) {
        print_into(out, a, style, indent);
      } else {
        out << '(';
        print_into(out, a, style, indent);
        out << ')';
      }
      return;
    }
    case Op::Case: {
      std::string pad(static_cast<std::size_t>(indent), ' ');
      out << "case\n";
      for (std::size_t i = 0; i + 1 < e.args.size(); i += 2) {
        out << pad << "  ";
        print_into(out, e.args[i], style, indent + 2);
        out << " : ";
        print_into(out, e.args[i + 1], style, indent + 2);
        out << ";\n";
      }
      out << pad << "esac";
      return;
    }
    default: {
      out << '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out << infix(e.op);
        print_into(out, e.args[i], style, indent);
      }
      out << ')';
      return;
    }
  }
}

void collect(const Expr& e, std::vector<std::string>& out) {
  if (e.op == Op::Name && std::find(out.begin(), out.end(), e.name) == out.end()) {
    out.push_back(e.name);
  }
  for (const Expr& a : e.args) collect(a, out);
}

struct Resolved {
  Expr expr;
  const std::vector<std::string>* labels = nullptr;
};

std::optional<Expr> as_label(const Expr& e, const std::vector<std::string>* labels) {
  if (e.op != Op::Name || labels == nullptr) return std::nullopt;
  auto it = std::find(labels->begin(), labels->end(), e.name);
  if (it == labels->end()) return std::nullopt;
  Expr l = Expr::label(e.name);
  l.value = it - labels->begin();
  return l;
}

Resolved resolve_rec(const Expr& e, const NameLookup& lookup,
                     const std::vector<std::string>* label_context) {
  switch (e.op) {
    case Op::Name: {
      if (auto bound = lookup(e.name)) return {bound->node, bound->labels};
      if (auto l = as_label(e, label_context)) return {*l, nullptr};
      return {e, nullptr};
    }
    case Op::Label: {
      if (auto l = as_label(Expr::ref(e.name), label_context)) return {*l, nullptr};
      return {e, nullptr};
    }
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
      Resolved lhs = resolve_rec(e.args[0], lookup, nullptr);
      Resolved rhs = resolve_rec(e.args[1], lookup, nullptr);
      if (lhs.labels && (rhs.expr.op == Op::Name || rhs.expr.op == Op::Label)) {
        if (auto l = as_label(Expr::ref(rhs.expr.name), lhs.labels)) rhs.expr = *l;
      }
      if (rhs.labels && (lhs.expr.op == Op::Name || lhs.expr.op == Op::Label)) {
        if (auto l = as_label(Expr::ref(lhs.expr.name), rhs.labels)) lhs.expr = *l;
      }
      return {Expr::binary(e.op, std::move(lhs.expr), std::move(rhs.expr)), nullptr};
    }
    case Op::Case: {
      Expr out{Op::Case, 0, {}, {}};
      const std::vector<std::string>* labels = nullptr;
      for (std::size_t i = 0; i + 1 < e.args.size(); i += 2) {
        out.args.push_back(resolve_rec(e.args[i], lookup, nullptr).expr);
        Resolved v = resolve_rec(e.args[i + 1], lookup, label_context);
        if (v.labels) labels = v.labels;
        out.args.push_back(std::move(v.expr));
      }
      return {std::move(out), labels};
    }
    default: {
      Expr out = e;
      for (Expr& a : out.args) a = resolve_rec(a, lookup, nullptr).expr;
      return {std::move(out), nullptr};
    }
  }
}

}  // namespace

Expr parse_expr(std::string_view text) {
  Lexer lexer(text);
  Parser parser(lexer.run());
  return parser.parse();
}

std::string print_expr(const Expr& e, const PrintStyle& style) {
  std::ostringstream out;
  print_into(out, e, style, style.indent);
  return out.str();
}

std::vector<std::string> collect_names(const Expr& e) {
  std::vector<std::string> out;
  collect(e, out);
  return out;
}

Expr resolve_names(const Expr& e, const NameLookup& lookup,
                   const std::vector<std::string>* label_context) {
  return resolve_rec(e, lookup, label_context).expr;
}

long eval_expr(const Expr& e, std::span<const long> vars, std::span<const long> defines) {
  switch (e.op) {
    case Op::IntConst:
    case Op::BoolConst:
    case Op::Label: return e.value;
    case Op::Var: return vars[static_cast<std::size_t>(e.value)];
    case Op::Define: return defines[static_cast<std::size_t>(e.value)];
    case Op::Not: return eval_expr(e.args[0], vars, defines) ? 0 : 1;
    case Op::And:
      for (const Expr& a : e.args) {
        if (!eval_expr(a, vars, defines)) return 0;
      }
      return 1;
    case Op::Or:
      for (const Expr& a : e.args) {
        if (eval_expr(a, vars, defines)) return 1;
      }
      return 0;
    case Op::Implies:
      return (!eval_expr(e.args[0], vars, defines) || eval_expr(e.args[1], vars, defines)) ? 1 : 0;
    case Op::Eq: return eval_expr(e.args[0], vars, defines) == eval_expr(e.args[1], vars, defines);
    case Op::Ne: return eval_expr(e.args[0], vars, defines) != eval_expr(e.args[1], vars, defines);
    case Op::Lt: return eval_expr(e.args[0], vars, defines) < eval_expr(e.args[1], vars, defines);
    case Op::Le: return eval_expr(e.args[0], vars, defines) <= eval_expr(e.args[1], vars, defines);
    case Op::Gt: return eval_expr(e.args[0], vars, defines) > eval_expr(e.args[1], vars, defines);
    case Op::Ge: return eval_expr(e.args[0], vars, defines) >= eval_expr(e.args[1], vars, defines);
    case Op::Add: {
      long sum = 0;
      for (const Expr& a : e.args) sum += eval_expr(a, vars, defines);
      return sum;
    }
    case Op::Sub: return eval_expr(e.args[0], vars, defines) - eval_expr(e.args[1], vars, defines);
    case Op::Case:
      for (std::size_t i = 0; i + 1 < e.args.size(); i += 2) {
        if (eval_expr(e.args[i], vars, defines)) return eval_expr(e.args[i + 1], vars, defines);
      }
      throw Error(ErrorKind::DomainViolation, "case expression has no matching arm");
    case Op::Name:
    case Op::DownSum: throw Error(ErrorKind::UnknownVariable, "unresolved name '" + e.name + "'");
    case Op::Globally:
    case Op::Finally:
    case Op::Next:
    case Op::Until:
      throw Error(ErrorKind::UnsupportedConstruct, "temporal operator inside a state predicate");
  }
  return 0;
}

Interval eval_interval(const Expr& e, std::span<const Interval> vars,
                       std::span<const Interval> defines) {
  switch (e.op) {
    case Op::IntConst:
    case Op::BoolConst:
    case Op::Label: return {e.value, e.value};
    case Op::Var: return vars[static_cast<std::size_t>(e.value)];
    case Op::Define: return defines[static_cast<std::size_t>(e.value)];
    case Op::Add: {
      Interval sum{0, 0};
      for (const Expr& a : e.args) {
        Interval i = eval_interval(a, vars, defines);
        sum.lo += i.lo;
        sum.hi += i.hi;
      }
      return sum;
    }
    case Op::Sub: {
      Interval a = eval_interval(e.args[0], vars, defines);
      Interval b = eval_interval(e.args[1], vars, defines);
      return {a.lo - b.hi, a.hi - b.lo};
    }
    case Op::Case: {
      Interval hull{0, 0};
      bool first = true;
      for (std::size_t i = 1; i < e.args.size(); i += 2) {
        Interval v = eval_interval(e.args[i], vars, defines);
        hull = first ? v : Interval{std::min(hull.lo, v.lo), std::max(hull.hi, v.hi)};
        first = false;
      }
      return hull;
    }
    case Op::Name:
    case Op::DownSum: throw Error(ErrorKind::UnknownVariable, "unresolved name '" + e.name + "'");
    default: return {0, 1};
  }
}

bool is_boolean_expr(const Expr& e, const std::function<bool(const Expr&)>& leaf_is_bool) {
  switch (e.op) {
    case Op::BoolConst:
    case Op::Not:
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Globally:
    case Op::Finally:
    case Op::Next:
    case Op::Until: return true;
    case Op::Case: return e.args.size() >= 2 && is_boolean_expr(e.args[1], leaf_is_bool);
    case Op::Name:
    case Op::Var:
    case Op::Define: return leaf_is_bool(e);
    default: return false;
  }
}

Expr negate(const Expr& e) {
  switch (e.op) {
    case Op::Eq: return Expr::binary(Op::Ne, e.args[0], e.args[1]);
    case Op::Ne: return Expr::binary(Op::Eq, e.args[0], e.args[1]);
    case Op::Lt: return Expr::binary(Op::Ge, e.args[0], e.args[1]);
    case Op::Le: return Expr::binary(Op::Gt, e.args[0], e.args[1]);
    case Op::Gt: return Expr::binary(Op::Le, e.args[0], e.args[1]);
    case Op::Ge: return Expr::binary(Op::Lt, e.args[0], e.args[1]);
    case Op::Not: return e.args[0];
    case Op::BoolConst: return Expr::boolean(e.value == 0);
    case Op::And:
    case Op::Or: {
      std::vector<Expr> parts;
      for (const Expr& a : e.args) parts.push_back(negate(a));
      return Expr::nary(e.op == Op::And ? Op::Or : Op::And, std::move(parts));
    }
    default: return Expr::unary(Op::Not, e);
  }
}

std::vector<Expr> conjuncts(const Expr& e) {
  if (e.op == Op::And) {
    std::vector<Expr> out;
    for (const Expr& a : e.args) {
      auto inner = conjuncts(a);
      out.insert(out.end(), inner.begin(), inner.end());
    }
    return out;
  }
  if (e.op == Op::BoolConst && e.value) return {};
  return {e};
}

}  // namespace sliced
