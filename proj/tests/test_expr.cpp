#include "doctest.h"

#include "support/fixtures.hpp"
#include "tmkit/error.hpp"
#include "tmkit/expr.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>

using tmkit::Expr;

namespace {

double eval(const Expr& e, const std::map<std::string, double>& env = {}) {
    return e.evaluate([&](const std::string& n) { return env.at(n); });
}

Expr rule_expr(const std::string& text) {
    auto doc = tmtest::parse_text("model m { thimac A { process; } var x = 1; var y = 2; var z = 3; rule A.process { x = " +
                                  text + "; } }");
    return doc.model.rules.at(0).assignments.at(0).value;
}

}  // namespace

TEST_CASE("expressions evaluate left to right with usual precedence") {
    std::map<std::string, double> env{{"x", 2}, {"y", 3}, {"z", 4}};
    CHECK(eval(rule_expr("x + y * z"), env) == 14);
    CHECK(eval(rule_expr("(x + y) * z"), env) == 20);
    CHECK(eval(rule_expr("x - y - z"), env) == -5);
    CHECK(eval(rule_expr("x / y / z"), env) == doctest::Approx(2.0 / 3.0 / 4.0));
    CHECK(eval(rule_expr("-x * y"), env) == -6);
    CHECK(eval(rule_expr("x - -y"), env) == 5);
}

TEST_CASE("operation order is preserved bit for bit") {
    const double a = 0.1, b = 0.2, c = 0.3;
    std::map<std::string, double> env{{"x", a}, {"y", b}, {"z", c}};
    CHECK(eval(rule_expr("x + y + z"), env) == (a + b) + c);
    CHECK(eval(rule_expr("x + (y + z)"), env) == a + (b + c));
}

TEST_CASE("division by zero is reported") {
    Expr e = Expr::binary(Expr::Op::Div, Expr::number(1), Expr::variable("x"));
    try {
        eval(e, {{"x", 0.0}});
        FAIL("expected an error");
    } catch (const tmkit::Error& err) {
        CHECK(err.code() == tmkit::ErrorCode::DivisionByZero);
    }
}

TEST_CASE("variables are listed once in first-occurrence order") {
    auto vars = rule_expr("y * x + y - z * x").variables();
    CHECK(vars == std::vector<std::string>{"y", "x", "z"});
}

TEST_CASE("printing keeps the minimum parentheses") {
    CHECK(rule_expr("x + y * z").to_string() == "x + y * z");
    CHECK(rule_expr("(x + y) * z").to_string() == "(x + y) * z");
    CHECK(rule_expr("x - (y - z)").to_string() == "x - (y - z)");
    CHECK(rule_expr("x - y - z").to_string() == "x - y - z");
    CHECK(rule_expr("-(x + y)").to_string() == "-(x + y)");
}

TEST_CASE("printed expressions re-parse to the same tree") {
    const std::vector<Expr> cases{
        Expr::negate(Expr::number(3)),
        Expr::number(-3),
        Expr::binary(Expr::Op::Sub, Expr::variable("x"), Expr::number(-2.5)),
        Expr::binary(Expr::Op::Mul, Expr::number(-1), Expr::negate(Expr::variable("y"))),
        Expr::binary(Expr::Op::Div, Expr::binary(Expr::Op::Div, Expr::variable("x"), Expr::variable("y")),
                     Expr::binary(Expr::Op::Mul, Expr::variable("z"), Expr::number(1e-300))),
        Expr::negate(Expr::negate(Expr::variable("z"))),
    };
    for (const Expr& e : cases) {
        CAPTURE(e.to_string());
        CHECK(rule_expr(e.to_string()) == e);
    }
}

TEST_CASE("numbers print with the shortest exact text") {
    CHECK(tmkit::format_number(0.1) == "0.1");
    CHECK(tmkit::format_number(4.199999999999999) == "4.199999999999999");
    CHECK(tmkit::format_number(20) == "20");
    for (double v : {0.1 + 0.2, 1.0 / 3.0, 6.02214076e23, -1e-310, std::numeric_limits<double>::max()})
        CHECK(std::strtod(tmkit::format_number(v).c_str(), nullptr) == v);
}

TEST_CASE("negative zero stays distinct") {
    CHECK_FALSE(Expr::number(0.0) == Expr::number(-0.0));
}
