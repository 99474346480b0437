#include "wentzell/error.hpp"
#include "wentzell/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace wentzell;
using namespace wentzell::expr;

TEST_CASE("literals, calls and nesting")
{
    const Expression zero = parse("0");
    CHECK(zero.root().kind == NodeKind::Number);
    CHECK(zero.root().value == 0.0);
    CHECK(zero.free_variables().empty());

    const Expression e = parse("exp(-x)");
    REQUIRE(e.root().kind == NodeKind::Call);
    CHECK(e.root().function == Function::Exp);
    REQUIRE(e.root().children.size() == 1);
    const Node& neg = *e.root().children[0];
    CHECK(neg.kind == NodeKind::Negate);
    CHECK(neg.children[0]->kind == NodeKind::Variable);
    CHECK(neg.children[0]->variable == 'x');

    const Expression r = parse("1/(1+x^2)");
    REQUIRE(r.root().kind == NodeKind::Div);
    CHECK(r.root().children[0]->kind == NodeKind::Number);
    const Node& add = *r.root().children[1];
    REQUIRE(add.kind == NodeKind::Add);
    CHECK(add.children[1]->kind == NodeKind::Pow);
    CHECK(r.evaluate(1.0) == 0.5);
}

TEST_CASE("evaluation")
{
    CHECK(evaluate(parse("x+y"), 2, 3) == 5.0);
    CHECK(evaluate(parse("exp(0)"), 123.0) == 1.0);
    CHECK(evaluate(parse("min(1, x)"), 0.25) == 0.25);
    CHECK(evaluate(parse("max(1, x, 3)"), 2.0) == 3.0);
    CHECK(evaluate(parse("abs(-3) + sqrt(16) + tanh(0)"), 0.0) == 7.0);
    CHECK(evaluate(parse("sin(pi/2) * cos(0)"), 0.0) == doctest::Approx(1.0));
    CHECK(evaluate(parse("log(e)"), 0.0) == doctest::Approx(1.0));
    CHECK(evaluate(parse("1.5e-3*2E2"), 0.0) == doctest::Approx(0.3));
    CHECK(evaluate(parse(".5 + 2."), 0.0) == 2.5);
}

TEST_CASE("precedence and associativity")
{
    CHECK(evaluate(parse("2^3^2"), 0) == 512.0);
    CHECK(evaluate(parse("-2^2"), 0) == -4.0);
    CHECK(evaluate(parse("2^-1"), 0) == 0.5);
    CHECK(evaluate(parse("-x^2"), 3) == -9.0);
    CHECK(evaluate(parse("-2*3^2"), 0) == -18.0);
    CHECK(evaluate(parse("1 - 2 - 3"), 0) == -4.0);
    CHECK(evaluate(parse("8 / 4 / 2"), 0) == 1.0);
    CHECK(evaluate(parse("2 + 3 * 4"), 0) == 14.0);
    CHECK(evaluate(parse("(2 + 3) * 4"), 0) == 20.0);
    CHECK(evaluate(parse("--x"), 2) == 2.0);
}

TEST_CASE("syntax errors carry a position")
{
    auto position_of = [](const char* text) {
        try {
            parse(text);
        } catch (const ParseError& e) {
            return static_cast<long>(e.position());
        }
        return -1L;
    };
    CHECK(position_of("1 +") == 3);
    CHECK(position_of("(1 + 2") == 6);
    CHECK(position_of("1 2") == 2);
    CHECK(position_of("") == 0);
    CHECK(position_of("2 * * 3") == 4);

    CHECK_THROWS_WITH_AS(parse("foo(1)"), doctest::Contains("unknown function"), ParseError);
    CHECK_THROWS_WITH_AS(parse("z + 1"), doctest::Contains("unknown identifier"), ParseError);
    CHECK_THROWS_WITH_AS(parse("exp(1, 2)"), doctest::Contains("exp"), ParseError);
    CHECK_THROWS_WITH_AS(parse("min(1)"), doctest::Contains("min"), ParseError);
    CHECK_THROWS_WITH_AS(parse("1 +"), doctest::Contains("expected"), ParseError);
}

TEST_CASE("unbound variables and domain errors")
{
    const Expression e = parse("x + y");
    CHECK(e.uses('x'));
    CHECK(e.uses('y'));
    CHECK_THROWS_WITH_AS(e.require_only("x", "mu"), doctest::Contains("'y'"), EvalError);
    CHECK_NOTHROW(e.require_only("xy"));
    CHECK_THROWS_AS(e.evaluate(1.0), EvalError);

    CHECK_THROWS_WITH_AS(evaluate(parse("1 + log(x - 1)"), 0.5), doctest::Contains("log"), EvalError);
    CHECK_THROWS_WITH_AS(evaluate(parse("sqrt(x - 1)"), 0.0), doctest::Contains("x"), EvalError);
    CHECK(evaluate(parse("sqrt(x)"), 0.0) == 0.0);
}

namespace {

std::string random_expr(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 2);
    std::uniform_real_distribution<double> num(0.1, 3.0);
    char buf[40];
    switch (pick(rng)) {
    case 0: std::snprintf(buf, sizeof buf, "%.17g", num(rng)); return buf;
    case 1: return "x";
    case 2: return "y";
    case 3: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 4: return random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1);
    case 6: return random_expr(rng, depth - 1) + " / (1 + abs(" + random_expr(rng, depth - 1) + "))";
    case 7: return "-" + random_expr(rng, depth - 1);
    case 8: return "sin(" + random_expr(rng, depth - 1) + ")^2";
    default: return "max(" + random_expr(rng, depth - 1) + ", tanh(" + random_expr(rng, depth - 1) + "), 0.5)";
    }
}

} // namespace

TEST_CASE("pretty-print round trip is exact")
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> bind(-5.0, 5.0);
    for (int k = 0; k < 40; ++k) {
        const std::string text = random_expr(rng, 4);
        const Expression a = parse(text);
        const Expression b = parse(a.to_string());
        CHECK(b.to_string() == a.to_string());
        for (int j = 0; j < 100; ++j) {
            const double x = bind(rng), y = bind(rng);
            const double va = a.evaluate(x, y), vb = b.evaluate(x, y);
            // Tolerance zero: identical operations on identical literals.
            CHECK((va == vb || (std::isnan(va) && std::isnan(vb))));
        }
    }
}

TEST_CASE("concurrent evaluation is safe and deterministic")
{
    const Expression e = parse("exp(-x) * sin(3*x) + y^2");
    std::vector<double> out(4, 0.0);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < out.size(); ++t)
        workers.emplace_back([&, t] {
            double acc = 0.0;
            for (int i = 0; i < 10000; ++i) acc += e.evaluate(i * 1e-3, 0.5);
            out[t] = acc;
        });
    for (auto& w : workers) w.join();
    for (double v : out) CHECK(v == out[0]);
}
