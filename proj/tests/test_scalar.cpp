#include "doctest.h"

#include "absgame/scalar.hpp"

using absgame::Mode;
using absgame::Order;
using absgame::PrecisionExhausted;
using absgame::Scalar;
using absgame::SpecError;
using absgame::Ternary;

TEST_SUITE("scalar") {

TEST_CASE("mode parsing") {
  CHECK(Mode::parse("rational") == Mode::rational());
  CHECK(Mode::parse("double") == Mode::bigfloat(53));
  CHECK(Mode::parse("bigfloat:128") == Mode::bigfloat(128));
  CHECK(Mode::parse("bigfloat:128").str() == "bigfloat:128");
  CHECK(Mode::parse("rational").str() == "rational");
  CHECK_THROWS_AS(Mode::parse("float"), SpecError);
  CHECK_THROWS_AS(Mode::parse("bigfloat:"), SpecError);
  CHECK_THROWS_AS(Mode::parse("bigfloat:x"), SpecError);
  CHECK_THROWS_AS(Mode::parse("bigfloat:0"), SpecError);
}

TEST_CASE("rational literals are exact") {
  const Mode m = Mode::rational();
  CHECK(Scalar::compare(Scalar::parse("1/3", m) * 3, Scalar::one(m)) ==
        Order::eq);
  CHECK(Scalar::compare(Scalar::parse("0.25", m), Scalar::parse("1/4", m)) ==
        Order::eq);
  CHECK(Scalar::compare(Scalar::parse("-1.5e-3", m),
                        Scalar::parse("-3/2000", m)) == Order::eq);
  CHECK(Scalar::compare(Scalar::parse("12e2", m), Scalar::from_long(1200, m)) ==
        Order::eq);
  CHECK(Scalar::parse("1/3", m).str() == "1/3");
  CHECK(Scalar::parse("2/6", m).str() == "1/3");
  CHECK(Scalar::parse("0.2", m).str() == "1/5");
  CHECK_THROWS_AS(Scalar::parse("", m), SpecError);
  CHECK_THROWS_AS(Scalar::parse("1/0", m), SpecError);
  CHECK_THROWS_AS(Scalar::parse("1.2.3", m), SpecError);
  CHECK_THROWS_AS(Scalar::parse("0x10", m), SpecError);
}

TEST_CASE("rational arithmetic round trips") {
  const Mode m = Mode::rational();
  Scalar a = Scalar::parse("1/3", m);
  Scalar b = Scalar::parse("1/6", m);
  CHECK(Scalar::compare(a / b, Scalar::from_long(2, m)) == Order::eq);
  CHECK(Scalar::compare(a - b, b) == Order::eq);
  CHECK((a + b).str() == "1/2");
  Scalar p = Scalar::parse("2/3", m).pow_ui(5);
  CHECK(p.str() == "32/243");
  CHECK(Scalar::parse("-7/2", m).floor_integer() == -4);
  CHECK(Scalar::parse("7/2", m).floor_integer() == 3);
  CHECK(Scalar::compare(Scalar::min(a, b), b) == Order::eq);
  CHECK(Scalar::compare(Scalar::max(a, b), a) == Order::eq);
  CHECK(Scalar::parse("-1/3", m).abs().str() == "1/3");
  CHECK_THROWS_AS(a / Scalar::zero(m), SpecError);
}

TEST_CASE("ball arithmetic tracks rounding error") {
  const Mode m = Mode::bigfloat(53);
  Scalar tenth = Scalar::parse("0.1", m);
  CHECK(!tenth.is_point());  // 1/10 is not a binary fraction
  // The accumulated ball around 10 * 0.1 must still contain 1, so the
  // comparison with an exact 1 cannot be decided.
  Scalar prod = tenth * 10;
  CHECK(Scalar::compare(prod, Scalar::one(m)) == Order::indeterminate);
  // One-sided checks that have real margin stay decisive.
  CHECK(Scalar::lt(tenth, Scalar::one(m)) == Ternary::yes);
  CHECK(Scalar::lt(Scalar::one(m), tenth) == Ternary::no);
  CHECK(Scalar::lt(tenth, tenth) == Ternary::indeterminate);
  // Points compare decisively even against themselves.
  Scalar p = Scalar::parse("0.25", m);
  CHECK(p.is_point());
  CHECK(Scalar::lt(p, p) == Ternary::no);
  CHECK(Scalar::le(p, p) == Ternary::yes);
  CHECK(Scalar::compare(p, p) == Order::eq);
}

TEST_CASE("safe-side point extraction keeps predicates decisive") {
  const Mode m = Mode::bigfloat(53);
  Scalar gamma = Scalar::parse("1/5", m);  // not exactly representable
  Scalar r = Scalar::parse("0.25", m);     // exact point
  Scalar budget = gamma * r;               // genuine ball
  CHECK(!budget.is_point());
  Scalar hw = budget.lower_point();
  CHECK(hw.is_point());
  // Choosing the lower endpoint makes "hw <= budget" certain, which is
  // exactly what move legality needs.
  CHECK(Scalar::le(hw, budget) == Ternary::yes);
  CHECK(Scalar::le(budget.upper_point(), budget) == Ternary::indeterminate);
  CHECK(Scalar::le(budget, budget.upper_point()) == Ternary::yes);
  // lower <= midpoint <= upper as exact points.
  CHECK(Scalar::le(budget.lower_point(), budget.midpoint_point()) ==
        Ternary::yes);
  CHECK(Scalar::le(budget.midpoint_point(), budget.upper_point()) ==
        Ternary::yes);
}

TEST_CASE("floor of a straddling ball refuses to guess") {
  const Mode m = Mode::bigfloat(53);
  Scalar three = Scalar::from_long(3, m);
  CHECK(three.floor_integer() == 3);
  Scalar below = three - Scalar::parse("1e-9", m);
  CHECK(below.floor_integer() == 2);
  Scalar fuzzy = Scalar::parse("0.1", m) * 10;  // ball containing 1
  CHECK_THROWS_AS(fuzzy.floor_integer(), PrecisionExhausted);
}

TEST_CASE("square roots and the golden ratio") {
  const Mode m = Mode::bigfloat(128);
  Scalar s5 = Scalar::sqrt_ulong(5, m);
  CHECK(Scalar::lt(Scalar::parse("2.236067977", m), s5) == Ternary::yes);
  CHECK(Scalar::lt(s5, Scalar::parse("2.2360679775", m)) == Ternary::yes);
  Scalar phi = absgame::golden_ratio(m);
  // phi^2 - phi - 1 = 0; the computed ball must contain zero and be tiny.
  Scalar residue = phi * phi - phi - Scalar::one(m);
  CHECK(residue.sign() == Order::indeterminate);
  CHECK(Scalar::lt(residue.abs(), Scalar::parse("1e-30", m)) == Ternary::yes);
  CHECK_THROWS_AS(Scalar::sqrt_ulong(5, Mode::rational()), SpecError);
}

TEST_CASE("serialization is exact for points") {
  const Mode m = Mode::bigfloat(64);
  Scalar p = Scalar::parse("7/32", m);
  CHECK(p.is_point());
  CHECK(p.str() == "7/32");
  CHECK(p.point_mpq() == mpq_class(7, 32));
  // A ball center serializes exactly as a dyadic rational, and parsing it
  // back yields a point inside the original ball.
  Scalar third = Scalar::parse("1/3", m);
  Scalar back = Scalar::parse(third.str(), m);
  CHECK(back.is_point());
  CHECK(Scalar::le(third.lower_point(), back) == Ternary::yes);
  CHECK(Scalar::le(back, third.upper_point()) == Ternary::yes);
  CHECK_THROWS_AS(third.point_mpq(), PrecisionExhausted);
}

TEST_CASE("division guards") {
  const Mode m = Mode::bigfloat(53);
  Scalar tiny = Scalar::parse("0.1", m) * 10 - Scalar::one(m);  // ball at 0
  CHECK_THROWS_AS(Scalar::one(m) / tiny, PrecisionExhausted);
  Scalar safe = Scalar::one(m) / Scalar::parse("0.1", m);
  CHECK(Scalar::lt(safe, Scalar::from_long(11, m)) == Ternary::yes);
  CHECK(Scalar::lt(Scalar::from_long(9, m), safe) == Ternary::yes);
}

TEST_CASE("modes never mix silently") {
  Scalar a = Scalar::one(Mode::rational());
  Scalar b = Scalar::one(Mode::bigfloat(53));
  CHECK_THROWS_AS(a + b, SpecError);
  CHECK_THROWS_AS(Scalar::compare(a, b), SpecError);
  CHECK_THROWS_AS(Scalar::one(Mode::bigfloat(64)) + b, SpecError);
}

}  // TEST_SUITE
