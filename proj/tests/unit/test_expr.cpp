#include <doctest.h>

#include "sliced/error.hpp"
#include "sliced/expr.hpp"

using namespace sliced;

TEST_CASE("parse and print") {
  CHECK(print_expr(parse_expr("a & b | c")) == "((a & b) | c)");
  CHECK(print_expr(parse_expr("x.y + 2 <= z")) == "((x.y + 2) <= z)");
  CHECK(print_expr(parse_expr("!p")) == "!(p)");
  CHECK(print_expr(parse_expr("a -> b -> c")) == "(a -> (b -> c))");
  Expr c = parse_expr("case a : 1; TRUE : 0; esac");
  CHECK(c.op == Op::Case);
  CHECK(c.args.size() == 4);
  CHECK(parse_expr(print_expr(c)) == c);
}

TEST_CASE("temporal operators") {
  Expr g = parse_expr("G(Battery1.state != dead)");
  CHECK(g.op == Op::Globally);
  CHECK(g.is_temporal());
  CHECK(print_expr(g) == "G(Battery1.state != dead)");
  Expr gf = parse_expr("G F(q)");
  CHECK(gf.op == Op::Globally);
  CHECK(gf.args.at(0).op == Op::Finally);
  CHECK(parse_expr(print_expr(gf)) == gf);
  CHECK(parse_expr("X p").op == Op::Next);
  CHECK(parse_expr("p U q").op == Op::Until);
}

TEST_CASE("negation") {
  CHECK(negate(parse_expr("a = 1")) == parse_expr("a != 1"));
  CHECK(negate(parse_expr("a < 1")) == parse_expr("a >= 1"));
  CHECK(negate(parse_expr("a <= 1 & b > 2")) == parse_expr("a > 1 | b <= 2"));
  CHECK(negate(parse_expr("!p")) == parse_expr("p"));
}

TEST_CASE("conjuncts") {
  auto cs = conjuncts(parse_expr("a = 1 & b = 2 & (c = 3 | d = 4)"));
  REQUIRE(cs.size() == 3);
  CHECK(cs[2].op == Op::Or);
  CHECK(conjuncts(parse_expr("a")).size() == 1);
}

TEST_CASE("collect names") {
  auto names = collect_names(parse_expr("x.s = on & y < x.s + z"));
  CHECK(names == std::vector<std::string>{"x.s", "on", "y", "z"});
}

TEST_CASE("syntax errors carry a column") {
  try {
    parse_expr("a & & b");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Syntax);
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_expr("(a"), Error);
  CHECK_THROWS_AS(parse_expr(""), Error);
}

TEST_CASE("evaluation") {
  std::vector<long> vars = {3, 4};
  Expr e = resolve_names(parse_expr("x + y = 7 & y > x"), [](const std::string& n) -> std::optional<NameBinding> {
    if (n == "x") return NameBinding{Expr::var(0, n), nullptr};
    if (n == "y") return NameBinding{Expr::var(1, n), nullptr};
    return std::nullopt;
  });
  CHECK(eval_expr(e, vars, {}) == 1);
  std::vector<Interval> ranges = {{0, 3}, {1, 5}};
  Interval i = eval_interval(resolve_names(parse_expr("x + y"), [](const std::string& n) -> std::optional<NameBinding> {
    return NameBinding{Expr::var(n == "x" ? 0 : 1, n), nullptr};
  }), ranges, {});
  CHECK(i.lo == 1);
  CHECK(i.hi == 8);
}
