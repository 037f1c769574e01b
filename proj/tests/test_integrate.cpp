#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mmodes/integrate.hpp"

using namespace mmodes;

namespace {

Space x_ray() {
    return Space::real_line(Interval::make(Ext::fin(Scalar(1)), Ext::pos_inf(), true, false));
}

TestFunction x_squared(const Space& X) {
    return TestFunction::from_pieces(
        X, {FnPiece{X.domain(), PowerSum::monomial(Scalar(1), Rat(2))}}, Scalar(0), {});
}

Measure nu_x4() {
    auto X = x_ray();
    return Measure::with_density(X, X.domain(), PowerSum::monomial(Scalar(1), Rat(-4)));
}

}  // namespace

TEST_CASE("integral of x^2 against the x^-4 tail density is exactly 1") {
    // Antiderivative oracle: integral over [1,inf) of x^-2 dx = [-x^-1] = 1.
    auto X = x_ray();
    auto r = integrate(x_squared(X), nu_x4());
    REQUIRE(r.is_value());
    REQUIRE(r.value.is_exact());
    CHECK(r.value.rat() == Rat(1));
    CHECK(r.error_bound == 0.0);
}

TEST_CASE("integral of 1 against any probability measure is its mass") {
    auto X = Space::real_line(Interval::open(Scalar(0), Scalar(1)));
    Measure mu(X, {Atom{Scalar::rational(2, 3), Scalar::rational(1, 2)}},
               {DensityPiece{X.domain(), PowerSum::constant(Scalar::rational(1, 2))}});
    auto one = TestFunction::constant(X, Scalar(1));
    CHECK(integrate(one, mu).value.rat() == Rat(1));
}

TEST_CASE("g(n) = 1/n against counting tails diverges") {
    auto D = Space::discrete_nat();
    auto g = TestFunction::on_nat(D, {}, DiscreteTerm{Scalar(1), Rat(-1), Scalar(1)}, 1,
                                  Scalar(1),
                                  {Tag::Continuous, Tag::BoundedMeasurable,
                                   Tag::VanishesAtInfinity});
    for (i64 n : {1, 4, 64}) {
        auto nu_n = Measure::counting(D, NatSet::tail(n));
        auto r = integrate(g, nu_n);
        REQUIRE(!r.is_value());
        CHECK(r.direction == 1);
    }
    // while finite-support f stabilizes to zero
    auto f = TestFunction::on_nat(D, {{3, Scalar(2)}, {7, Scalar(1)}}, std::nullopt, 1,
                                  Scalar(2), {Tag::BoundedMeasurable});
    CHECK(integrate(f, Measure::counting(D, NatSet::tail(8))).value.rat() == Rat(0));
    CHECK(integrate(f, Measure::counting(D, NatSet::tail(5))).value.rat() == Rat(1));
    CHECK(integrate(f, Measure::counting(D, NatSet::tail(2))).value.rat() == Rat(3));
}

TEST_CASE("summable discrete tails get certified numeric sums") {
    auto D = Space::discrete_nat();
    auto g2 = TestFunction::on_nat(D, {}, DiscreteTerm{Scalar(1), Rat(-2), Scalar(1)}, 1,
                                   Scalar(1), {Tag::BoundedMeasurable});
    auto r = integrate(g2, Measure::counting(D, NatSet::all()));
    REQUIRE(r.is_value());
    CHECK(r.value.value() == doctest::Approx(1.6449340668482264).epsilon(1e-10));
    CHECK(r.error_bound < 1e-9);
    // geometric tail has an exact-style fast path
    auto gg = TestFunction::on_nat(D, {},
                                   DiscreteTerm{Scalar(1), Rat(0), Scalar::rational(1, 2)},
                                   1, Scalar(1), {Tag::BoundedMeasurable});
    auto rg = integrate(gg, Measure::counting(D, NatSet::all()));
    CHECK(rg.value.value() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integrate_truncated") {
    auto X = Space::real_line(Interval::closed(Scalar(1), Scalar(3)));
    auto leb = Measure::lebesgue(X, X.domain());
    auto f = x_squared(X);
    // cutoff set {x^2 < 4} n [1,3] = [1,2): integral of x^2 = 7/3
    Scalar v = integrate_truncated(f, leb, Scalar(4));
    REQUIRE(v.is_exact());
    CHECK(v.rat() == Rat(7, 3));
    // k = 0 -> 0
    CHECK(integrate_truncated(f, leb, Scalar(0)).rat() == Rat(0));
    // f bounded by k -> equals the plain integral (9 bounds x^2 at... 3^2=9, use 10)
    CHECK(integrate_truncated(f, leb, Scalar(10)) == integrate(f, leb).value);
    // monotone nondecreasing in k toward the full integral, here 26/3
    Scalar prev(0);
    for (i64 k : {1, 4, 9, 16}) {
        Scalar t = integrate_truncated(f, leb, Scalar(k));
        CHECK(t >= prev);
        prev = t;
    }
    CHECK(prev.rat() == Rat(26, 3));
}

TEST_CASE("truncated tail integrals approach the full value (rational exact)") {
    // integral of 1_{x^2<k} x^2 against x^-4 on [1,inf) = 1 - 1/sqrt(k)
    auto X = x_ray();
    auto f = x_squared(X);
    auto nu = nu_x4();
    for (i64 s : {2, 4, 10}) {
        Scalar v = integrate_truncated(f, nu, Scalar(s * s));
        REQUIRE(v.is_exact());
        CHECK(v.rat() == *Rat::checked_sub(Rat(1), Rat(1, s)));
    }
}

TEST_CASE("indicator consistency: integrate(1_A, m) == mass(m, A)") {
    std::mt19937_64 rng(202408);
    auto X = Space::real_line(Interval::closed(Scalar(0), Scalar(8)));
    Measure m(X,
              {Atom{Scalar::rational(3, 2), Scalar::rational(1, 4)},
               Atom{Scalar(5), Scalar::rational(3, 4)}},
              {DensityPiece{Interval::closed(Scalar(1), Scalar(6)),
                            PowerSum::linear(Scalar::rational(1, 8),
                                             Scalar::rational(1, 16))}});
    for (int t = 0; t < 60; ++t) {
        i64 a = static_cast<i64>(rng() % 33), b = static_cast<i64>(rng() % 33);
        if (a > b) std::swap(a, b);
        auto A = BorelSet::real(
            X, RealSet::of(Interval::make(Ext::fin(Scalar::rational(a, 4)),
                                          Ext::fin(Scalar::rational(b, 4)), rng() % 2,
                                          rng() % 2)));
        auto r = integrate(indicator(X, A), m);
        REQUIRE(r.is_value());
        CHECK(r.value == m.mass(A));
    }
}

TEST_CASE("linearity within error bounds") {
    auto X = x_ray();
    auto nu = nu_x4();
    // f = x^2, g = x, and 3f - 2g assembled directly
    auto f = x_squared(X);
    auto g = TestFunction::from_pieces(
        X, {FnPiece{X.domain(), PowerSum::monomial(Scalar(1), Rat(1))}}, Scalar(0), {});
    auto comb = TestFunction::from_pieces(
        X,
        {FnPiece{X.domain(), PowerSum::add(PowerSum::monomial(Scalar(3), Rat(2)),
                                           PowerSum::monomial(Scalar(-2), Rat(1)))}},
        Scalar(0), {});
    Scalar lhs = integrate(comb, nu).value;
    Scalar rhs = Scalar(3) * integrate(f, nu).value - Scalar(2) * integrate(g, nu).value;
    CHECK(lhs == rhs);  // exact rational path
}

TEST_CASE("undefined product: opposite divergences throw") {
    auto X = Space::real_line(Interval::make(Ext::fin(Scalar(0)), Ext::pos_inf(), false, false));
    Measure m(X, {},
              {DensityPiece{Interval::open(Scalar(0), Scalar::rational(1, 2)),
                            PowerSum::monomial(Scalar(1), Rat(-1))},
               DensityPiece{Interval::make(Ext::fin(Scalar(2)), Ext::pos_inf(), true, false),
                            PowerSum::monomial(Scalar(1), Rat(-1))}});
    auto f = TestFunction::from_pieces(
        X,
        {FnPiece{Interval::open(Scalar(0), Scalar(1)), PowerSum::constant(Scalar(-1))},
         FnPiece{Interval::make(Ext::fin(Scalar(1)), Ext::pos_inf(), true, false),
                 PowerSum::constant(Scalar(1))}},
        Scalar(1), {Tag::BoundedMeasurable});
    CHECK_THROWS_AS(integrate(f, m), UndefinedIntegralError);
}

TEST_CASE("quadrature agrees with the closed form within 1e-8") {
    auto X = x_ray();
    auto nu = nu_x4();
    auto f = x_squared(X);
    auto q = integrate_quadrature(f, nu, 1e-9);
    REQUIRE(q.is_value());
    CHECK(q.method == IntegralResult::Quadrature);
    CHECK(std::abs(q.value.value() - 1.0) < 1e-8);

    // piecewise-linear times piecewise density with interior knots
    auto X2 = Space::real_line(Interval::closed(Scalar(0), Scalar(4)));
    Measure m2(X2, {},
               {DensityPiece{Interval::closed(Scalar(0), Scalar(2)),
                             PowerSum::polynomial({Scalar::rational(1, 2), Scalar(0),
                                                   Scalar::rational(1, 8)})},
                DensityPiece{Interval::lopen(Scalar(2), Scalar(4)),
                             PowerSum::constant(Scalar(1))}});
    auto g = TestFunction::from_pieces(
        X2,
        {FnPiece{Interval::ropen(Scalar(0), Scalar(1)), PowerSum::linear(Scalar(0), Scalar(1))},
         FnPiece{Interval::closed(Scalar(1), Scalar(3)),
                 PowerSum::linear(Scalar(2), Scalar(-1))},
         FnPiece{Interval::lopen(Scalar(3), Scalar(4)),
                 PowerSum::linear(Scalar(-4), Scalar(1))}},
        Scalar(1), {Tag::Continuous, Tag::BoundedMeasurable});
    auto closed = integrate(g, m2);
    auto quad = integrate_quadrature(g, m2, 1e-9);
    REQUIRE(closed.is_value());
    REQUIRE(quad.is_value());
    CHECK(std::abs(closed.value.value() - quad.value.value()) < 1e-8);

    // divergent case matches the closed-form direction
    auto qd = integrate_quadrature(f, Measure::with_density(
                                          X, X.domain(), PowerSum::monomial(Scalar(1), Rat(-2))),
                                   1e-9);
    CHECK(!qd.is_value());
    CHECK(qd.direction == 1);
}
