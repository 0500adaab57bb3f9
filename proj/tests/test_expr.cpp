#include "doctest.h"

#include "finslerkit/expr.hpp"
#include "finslerkit/taylor.hpp"
#include "support/random_expr.hpp"

using namespace fk;

namespace {

ChartPoint pt(std::vector<double> x, std::vector<double> y) { return ChartPoint(std::move(x), std::move(y)); }

}  // namespace

TEST_CASE("sum of squares parses into Add(Pow, Pow)") {
    const Expr e = parse("y1^2 + y2^2", 2);
    const auto& r = e.root();
    REQUIRE(r.kind == ExprKind::Binary);
    CHECK(r.op == BinaryOp::Add);
    for (const auto& c : r.children) {
        CHECK(c->kind == ExprKind::Binary);
        CHECK(c->op == BinaryOp::Pow);
        CHECK(c->children[0]->kind == ExprKind::Variable);
        CHECK(c->children[0]->var == VarKind::Y);
        CHECK(c->children[1]->value == 2.0);
    }
    CHECK(r.children[0]->children[0]->index == 0);
    CHECK(r.children[1]->children[0]->index == 1);
}

TEST_CASE("half-plane norm parses into Div(Call(sqrt), x2)") {
    const Expr e = parse("sqrt(y1^2+y2^2)/x2", 2);
    REQUIRE(e.root().kind == ExprKind::Binary);
    CHECK(e.root().op == BinaryOp::Div);
    CHECK(e.root().children[0]->kind == ExprKind::Call);
    CHECK(e.root().children[0]->fn == Function::Sqrt);
    CHECK(e.root().children[1]->var == VarKind::X);
    CHECK(e.root().children[1]->index == 1);
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        parse("x1 + * y1", 2);
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 5);
    }
    CHECK_THROWS_AS(parse("", 2), ParseError);
    CHECK_THROWS_AS(parse("(x1 + y1", 2), ParseError);
    CHECK_THROWS_AS(parse("x1 y1", 2), ParseError);
}

TEST_CASE("unknown identifiers, indices and arities are rejected") {
    try {
        parse("x1 + foo(y1)", 2);
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 5);
    }
    CHECK_THROWS_AS(parse("y3", 2), ParseError);
    CHECK_THROWS_AS(parse("x0", 2), ParseError);
    CHECK_THROWS_AS(parse("sqrt(y1, y2)", 2), ParseError);
    CHECK_THROWS_AS(parse("pow(y1)", 2), ParseError);
    CHECK_THROWS_AS(parse("t + y1", 2), ParseError);
    CHECK_NOTHROW(parse("pow(y1, 2) + atan(x1) + tan(x2)", 2));
}

TEST_CASE("real evaluation") {
    CHECK(eval_real(parse("y1^2+y2^2", 2), pt({0, 0}, {3, 4})) == 25.0);
    CHECK(eval_real(parse("sqrt(y1^2+y2^2)/x2", 2), pt({0, 2}, {3, 4})) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(eval_real(parse("2+3*4^2", 2), pt({0, 0}, {1, 0})) == 50.0);
    CHECK(eval_real(parse("2^3^2", 2), pt({0, 0}, {1, 0})) == 512.0);
    CHECK(eval_real(parse("-2^2", 2), pt({0, 0}, {1, 0})) == -4.0);
    CHECK(eval_real(parse("1.5e1 - 2E-1", 1), pt({0}, {1})) == doctest::Approx(14.8));
    CHECK(eval_real(parse("(x1)^3", 1), pt({-2}, {1})) == -8.0);
    CHECK(eval_real(parse("x1^(-2)", 1), pt({-2}, {1})) == 0.25);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(eval_real(parse("log(x1)", 2), pt({-1, 0}, {1, 0})), DomainError);
    CHECK_THROWS_AS(eval_real(parse("sqrt(x1)", 2), pt({-1, 0}, {1, 0})), DomainError);
    CHECK_THROWS_AS(eval_real(parse("y1/x1", 2), pt({0, 0}, {1, 0})), SingularDivisionError);
    CHECK_THROWS_AS(eval_real(parse("x1^0.5", 2), pt({-1, 0}, {1, 0})), DomainError);
    CHECK_THROWS_AS(eval_real(parse("exp(x1)", 1), pt({1000}, {1})), DomainError);
    CHECK_THROWS_AS(ChartPoint({0, 0}, {0, 0}), DomainError);
}

TEST_CASE("pretty printing round-trips") {
    fktest::ExprGen gen(7, 2);
    for (int k = 0; k < 200; ++k) {
        const Expr e = parse(gen.generate(4), 2);
        const Expr again = parse(to_string(e), 2);
        CHECK(structurally_equal(e.root(), again.root()));
        CHECK(to_string(again) == to_string(e));
    }
    CHECK(structurally_equal(parse("2^3^2", 1).root(), parse(to_string(parse("2^3^2", 1)), 1).root()));
    CHECK(structurally_equal(parse("(2^3)^2", 1).root(), parse(to_string(parse("(2^3)^2", 1)), 1).root()));
    CHECK(to_string(parse("x1 - (y1 - x1)", 1)) != to_string(parse("x1 - y1 - x1", 1)));
}

TEST_CASE("real evaluation agrees with order-0 Taylor lifting") {
    fktest::ExprGen gen(2024, 2);
    for (int k = 0; k < 100; ++k) {
        const Expr e = parse(gen.generate(4), 2);
        const ChartPoint p({gen.uniform(-2, 2), gen.uniform(-2, 2)}, {gen.uniform(0.5, 2), gen.uniform(-2, 2)});
        const double a = eval_real(e, p);
        const double b = lift(e, p, 0).value();
        CHECK(a == doctest::Approx(b).epsilon(1e-14).scale(1.0));
    }
}

TEST_CASE("curve expressions use t only") {
    const Expr c = parse_curve("1 + cos(2*t)");
    CHECK(eval_curve(c, 0.0) == 2.0);
    CHECK_THROWS_AS(parse_curve("x1 + t"), ParseError);
}
