#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "escdim/levelreal.hpp"

using namespace escdim;

namespace {

double rel_err(double got, double want) {
    if (want == 0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

LevelReal rand_value(SplitMix64& rng, int max_level) {
    int level = static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_level + 1));
    double m;
    if (level == 0) {
        m = std::exp(rng.uniform(-8.0, 30.0));
    } else {
        m = rng.uniform(35.0, 5000.0);
    }
    int sign = rng.next_unit() < 0.5 ? 1 : -1;
    return LevelReal::tower(sign, level, m);
}

}  // namespace

TEST_CASE("canonical form and ordering") {
    LevelReal x = LevelReal::tower(1, 2, 2.0);  // e^(e^2) ~ 1618, must renormalize to level 0
    CHECK(x.level() == 0);
    CHECK(x.mantissa() == doctest::Approx(std::exp(std::exp(2.0))));

    LevelReal y = LevelReal::tower(1, 1, 50.0);  // e^50, level 1
    CHECK(y.level() == 1);
    CHECK(cmp(x, y) == std::strong_ordering::less);  // e^(e^2) < e^50

    CHECK(cmp(x, x) == std::strong_ordering::equal);
    CHECK(cmp(LevelReal(-1.0), LevelReal::tower(1, 3, 40.0)) == std::strong_ordering::less);

    // threshold promotion
    LevelReal big(3e15);
    CHECK(big.level() == 1);
    CHECK(big.mantissa() == doctest::Approx(std::log(3e15)));
}

TEST_CASE("ln: level decrement and identity cases") {
    // ln(exp^2(3)) = exp^1(3) = e^3 (renormalized to level 0)
    LevelReal x = LevelReal::tower(1, 2, 3.0);
    LevelReal lx = lr_ln(x);
    CHECK(lx.fits_double());
    CHECK(rel_err(lx.to_double(), std::exp(3.0)) < 1e-12);

    CHECK(lr_ln(LevelReal(1.0)).is_zero());

    // ln(exp^1(700)) = 700 with no float evaluation of e^700
    LevelReal y = LevelReal::tower(1, 1, 700.0);
    CHECK(lr_ln(y).to_double() == 700.0);

    CHECK_THROWS_AS(lr_ln(LevelReal(0.0)), level_error);
    CHECK_THROWS_AS(lr_ln(LevelReal(-2.0)), level_error);
}

TEST_CASE("exp: promotion and deep comparison") {
    CHECK(lr_exp(LevelReal(0.0)).to_double() == 1.0);

    LevelReal e1000 = lr_exp(LevelReal(1000.0));
    CHECK(e1000.level() == 1);
    CHECK(e1000.mantissa() == 1000.0);  // exact promotion

    // oracle: compare ln(ln(.)) of both sides in binary64
    LevelReal t = lr_exp(lr_exp(lr_exp(LevelReal(2.0))));  // e^(e^(e^2)) = e^1618
    double lnln_t = std::exp(2.0);       // ln ln t = e^2 ~ 7.39
    double lnln_big = std::log(1e6);     // ln ln exp^1(1e6) = ln(1e6) ~ 13.8
    REQUIRE(lnln_t < lnln_big);
    CHECK(cmp(t, LevelReal::tower(1, 1, 1e6)) == std::strong_ordering::less);
    CHECK(cmp(t, LevelReal::tower(1, 1, 1000.0)) == std::strong_ordering::greater);

    CHECK_THROWS_AS(LevelReal::tower(1, 9, 100.0), level_error);  // level cap
}

TEST_CASE("add: exact level-0, log-sum-exp, absorption") {
    // 2^20 + 2^20 = 2^21 exactly
    CHECK(add(LevelReal(1048576.0), LevelReal(1048576.0)).to_double() == 2097152.0);

    // e^10 + e^10: ln = 10 + ln 2
    LevelReal s = add(LevelReal(std::exp(10.0)), LevelReal(std::exp(10.0)));
    CHECK(rel_err(std::log(s.to_double()), 10.0 + std::log(2.0)) < 1e-14);

    // absorption: exp^2(5) (canonically e^(e^5) ~ e^148) + 7 is unchanged
    LevelReal big = LevelReal::tower(1, 2, 5.0);
    LevelReal r = add(big, LevelReal(7.0));
    CHECK(r.identical(big));
    CHECK_FALSE(r.flagged());

    // same-magnitude opposite signs cancel exactly at level 0, unflagged
    LevelReal z = add(LevelReal(3.5), LevelReal(-3.5));
    CHECK(z.is_zero());
    CHECK_FALSE(z.flagged());

    // deep cancellation is flagged
    LevelReal d1 = LevelReal::tower(1, 2, 100.0);
    LevelReal d2 = LevelReal::tower(-1, 2, 100.0);
    LevelReal zz = add(d1, d2);
    CHECK(zz.is_zero());
    CHECK(zz.flagged());
}

TEST_CASE("sub absorbs tiny subtrahends and resolves moderate gaps") {
    LevelReal a = LevelReal::tower(1, 1, 50.0);
    LevelReal b = LevelReal::tower(1, 1, 40.0);
    LevelReal d = sub(a, b);  // e^50 - e^40 = e^40 (e^10 - 1)
    double want = 40.0 + std::log(std::expm1(10.0));
    CHECK(rel_err(lr_ln(d).to_double(), want) < 1e-12);

    // gap beyond the absorption cutoff leaves the minuend untouched
    LevelReal big = LevelReal::tower(1, 1, 500.0);
    CHECK(sub(big, b).identical(big));
}

TEST_CASE("scale: mantissa shift at level >= 1, absorbed factors flag") {
    LevelReal x = LevelReal::tower(1, 1, 100.0);
    LevelReal y = scale(x, 2.0);
    CHECK(y.level() == 1);
    CHECK(y.mantissa() == doctest::Approx(100.0 + std::log(2.0)));
    CHECK_FALSE(y.flagged());

    // at level 2 a constant factor falls below mantissa resolution
    LevelReal deep = LevelReal::tower(1, 2, 100.0);
    LevelReal z = scale(deep, 0.5);
    CHECK(z.flagged());
    CHECK(z.level() == 2);
    CHECK(z.mantissa() == 100.0);

    CHECK(scale(x, 1.0).identical(x));
    CHECK_FALSE(scale(x, 1.0).flagged());
}

TEST_CASE("pow on both shallow and deep values") {
    CHECK(rel_err(lr_pow(LevelReal(3.0), 2.0).to_double(), 9.0) < 1e-14);
    LevelReal x = LevelReal::tower(1, 1, 1000.0);  // e^1000
    LevelReal y = lr_pow(x, 2.0);                  // e^2000
    CHECK(y.level() == 1);
    CHECK(y.mantissa() == doctest::Approx(2000.0));
}

TEST_CASE("roundtrip: ln(exp(x)) and exp(ln(x)) across levels 0-3") {
    SplitMix64 rng(42);
    for (int i = 0; i < 2000; ++i) {
        LevelReal x = lr_abs(rand_value(rng, 3));
        if (x.is_zero()) continue;
        LevelReal r1 = lr_ln(lr_exp(x));
        CHECK(r1.level() == x.level());
        CHECK(rel_err(r1.mantissa(), x.mantissa()) < 1e-12);
        LevelReal r2 = lr_exp(lr_ln(x));
        CHECK(r2.level() == x.level());
        CHECK(rel_err(r2.mantissa(), x.mantissa()) < 1e-12);
    }
}

TEST_CASE("monotonicity of ln and exp on randomized pairs") {
    SplitMix64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        LevelReal x = lr_abs(rand_value(rng, 3));
        LevelReal y = lr_abs(rand_value(rng, 3));
        if (x.is_zero() || y.is_zero()) continue;
        auto ord = cmp(x, y);
        if (ord == std::strong_ordering::equal) continue;
        CHECK(cmp(lr_ln(x), lr_ln(y)) == ord);
        CHECK(cmp(lr_exp(x), lr_exp(y)) == ord);
    }
}

TEST_CASE("add is commutative; associative within final-ulp at level 0") {
    SplitMix64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        LevelReal x = rand_value(rng, 2);
        LevelReal y = rand_value(rng, 2);
        LevelReal l = add(x, y);
        LevelReal r = add(y, x);
        CHECK(l.identical(r));
        CHECK(l.flagged() == r.flagged());
    }
    for (int i = 0; i < 2000; ++i) {
        double a = std::exp(rng.uniform(-5.0, 25.0));
        double b = std::exp(rng.uniform(-5.0, 25.0));
        double c = std::exp(rng.uniform(-5.0, 25.0));
        LevelReal l = add(add(LevelReal(a), LevelReal(b)), LevelReal(c));
        LevelReal r = add(LevelReal(a), add(LevelReal(b), LevelReal(c)));
        CHECK(l.level() == 0);
        CHECK(rel_err(l.to_double(), r.to_double()) < 4e-16);
    }
}

TEST_CASE("oracle equivalence against binary64 below 1e300") {
    // acceptance: randomized operations on representable values track plain
    // binary64 arithmetic to 1e-12 relative error
    SplitMix64 rng(2024);
    int checked = 0;
    for (int i = 0; i < 100000; ++i) {
        double lx = rng.uniform(-40.0, 690.0);
        double ly = rng.uniform(-40.0, 690.0);
        double x = std::exp(lx), y = std::exp(ly);
        LevelReal X(x), Y(y);
        switch (rng.next() % 4) {
            case 0: {
                LevelReal s = add(X, Y);
                double got = s.fits_double() ? s.to_double()
                                             : std::exp(lr_ln(s).to_double());
                CHECK(rel_err(got, x + y) < 1e-12);
                break;
            }
            case 1: {
                // conditioning guard: skip near-cancellation where the
                // binary64 reference itself is meaningless
                if (std::abs(lx - ly) < 1e-6) continue;
                LevelReal d = add(X, LevelReal(-y));
                double want = x - y;
                double got = d.is_zero() ? 0.0
                                         : d.sign() * std::exp(lr_ln(lr_abs(d)).to_double());
                CHECK(rel_err(got, want) < 1e-12);
                break;
            }
            case 2: {
                CHECK(rel_err(lr_ln(X).to_double(), lx) < 1e-12);
                break;
            }
            case 3: {
                auto ord = cmp(X, Y);
                CHECK((x < y    ? ord == std::strong_ordering::less
                       : x > y ? ord == std::strong_ordering::greater
                               : ord == std::strong_ordering::equal));
                break;
            }
        }
        ++checked;
    }
    CHECK(checked > 90000);
}

TEST_CASE("serialization round-trips bit-exactly") {
    SplitMix64 rng(99);
    for (int i = 0; i < 500; ++i) {
        LevelReal x = rand_value(rng, 4);
        LevelReal y = LevelReal::parse(x.serialize());
        CHECK(y.identical(x));
    }
    CHECK(LevelReal::parse("+L0:0x0p+0").is_zero());
    CHECK_THROWS_AS(LevelReal::parse("garbage"), level_error);
    CHECK_THROWS_AS(LevelReal::parse("+L1:zzz"), level_error);
}

TEST_CASE("flags propagate through arithmetic") {
    LevelReal f = LevelReal(5.0).with_flag();
    CHECK(add(f, LevelReal(1.0)).flagged());
    CHECK(scale(f, 2.0).flagged());
    CHECK(lr_ln(f).flagged());
    CHECK(lr_exp(f).flagged());
    CHECK(sub(LevelReal(10.0), f).flagged());
}

TEST_CASE("saturating views") {
    LevelReal deep = LevelReal::tower(1, 3, 100.0);
    CHECK(sat_to_double(deep) == kSat);
    CHECK(sat_to_double(neg(deep)) == -kSat);

    // ratio of level-1 values resolves through mantissa differences
    LevelReal a = LevelReal::tower(1, 1, 1000.0);
    LevelReal b = LevelReal::tower(1, 1, 1000.0 - std::log(2.0));
    SatValue r = sat_ratio(a, b);
    CHECK(r.value == doctest::Approx(2.0));
    CHECK_FALSE(r.tight);

    // identical deep values: ratio 1 but flagged tight (resolution floor)
    LevelReal c = LevelReal::tower(1, 2, 500.0);
    SatValue r2 = sat_ratio(c, c);
    CHECK(r2.value == 1.0);
    CHECK(r2.tight);
}
