#include <doctest.h>

#include <cmath>

#include "varex/expression.hpp"

using varex::Expression;
using varex::ExprError;

namespace {
double ev(const std::string& src, double x = 0.0, double y = 0.0, double t = 0.0) {
  auto e = Expression::parse(src, {"x", "y", "t"});
  const double vals[3] = {x, y, t};
  return e.eval(vals);
}
}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(ev("1+2*3") == 7.0);
  CHECK(ev("(1+2)*3") == 9.0);
  CHECK(ev("2^3^2") == 512.0);      // right-assoc
  CHECK(ev("-2^2") == -4.0);        // unary minus binds looser than ^
  CHECK(ev("2^-1") == 0.5);
  CHECK(ev("6/3/2") == 1.0);
  CHECK(ev("x*10-t", 1.5, 0, 2.0) == 13.0);
}

TEST_CASE("functions") {
  CHECK(ev("sin(0)") == 0.0);
  CHECK(ev("cos(0)") == 1.0);
  CHECK(ev("exp(0)") == 1.0);
  CHECK(ev("log(exp(1))") == doctest::Approx(1.0));
  CHECK(ev("abs(-3)") == 3.0);
  CHECK(ev("min(2,3)") == 2.0);
  CHECK(ev("max(2,3)") == 3.0);
  CHECK(ev("min(1+1, max(0,5))") == 2.0);
}

TEST_CASE("parse errors name the offending input") {
  CHECK_THROWS_AS(ev("2+"), ExprError);
  CHECK_THROWS_AS(ev("foo(1)"), ExprError);
  CHECK_THROWS_AS(ev("bogus_var"), ExprError);
  CHECK_THROWS_AS(ev("min(1)"), ExprError);
  CHECK_THROWS_AS(ev("(1+2"), ExprError);
  CHECK_THROWS_AS(ev("1 2"), ExprError);
}

TEST_CASE("variables bind positionally") {
  auto e = Expression::parse("a+10*b", {"a", "b"});
  const double vals[2] = {3.0, 4.0};
  CHECK(e.eval(vals) == 43.0);
}
