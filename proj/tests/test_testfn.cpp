#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mmodes/integrate.hpp"

using namespace mmodes;

namespace {
Space line(double a, double b) {
    return Space::real_line(Interval::closed(Scalar::rational(static_cast<i64>(a * 4), 4),
                                             Scalar::rational(static_cast<i64>(b * 4), 4)));
}
}  // namespace

TEST_CASE("bump_over_closed values") {
    auto X = line(0, 4);
    auto A = BorelSet::real(X, RealSet::of(Interval::closed(Scalar(1), Scalar(2))));
    auto f = bump_over_closed(X, A, 2);
    CHECK(f.eval(Scalar::rational(5, 4)).rat() == Rat(1));       // inside A
    CHECK(f.eval(Scalar::rational(9, 4)).rat() == Rat(1, 2));    // 1 - 2*(1/4)
    CHECK(f.eval(Scalar::rational(13, 5)).rat() == Rat(0));      // rho >= 1/2
    CHECK(f.eval(Scalar::rational(1, 2)).rat() == Rat(0));
    CHECK(f.eval(Scalar::rational(3, 4)).rat() == Rat(1, 2));
    CHECK(f.has_tag(Tag::Continuous));
    CHECK(f.has_tag(Tag::CompactSupport));
    REQUIRE(f.holder().has_value());
    CHECK(f.holder()->constant == 2.0);
    CHECK(verify_tags(f, 99));
}

TEST_CASE("bump_over_closed handles multi-component closed sets") {
    auto X = line(0, 8);
    // two components closer than the dilation width plus an isolated point
    auto A = BorelSet::real(X, RealSet::make({Interval::closed(Scalar(1), Scalar(2)),
                                              Interval::closed(Scalar::rational(5, 2),
                                                               Scalar(3))},
                                             {Scalar(6)}));
    auto f = bump_over_closed(X, A, 4);
    CHECK(f.eval(Scalar(1)).rat() == Rat(1));
    CHECK(f.eval(Scalar(6)).rat() == Rat(1));  // isolated point keeps height 1
    CHECK(f.eval(Scalar::rational(9, 4)).rat() == Rat(0));  // midpoint of the gap, rho = 1/4
    CHECK(f.eval(Scalar::rational(49, 8)).rat() == Rat(1, 2));
    // pointwise monotone in n
    std::mt19937_64 rng(5);
    auto g = bump_over_closed(X, A, 5);
    for (int i = 0; i < 400; ++i) {
        double x = (rng() % 8000) / 1000.0;
        CHECK(g.eval(Scalar::approx(x)).value() <= f.eval(Scalar::approx(x)).value() + 1e-15);
    }
}

TEST_CASE("bump_under_open values") {
    auto X = line(0, 1);
    auto B = BorelSet::real(X, RealSet::of(Interval::open(Scalar(0), Scalar(1))));
    auto g = bump_under_open(X, B, 4);
    CHECK(g.eval(Scalar::rational(1, 2)).rat() == Rat(1));
    CHECK(g.eval(Scalar::rational(1, 8)).rat() == Rat(1, 2));  // 4 * 1/8
    CHECK(g.eval(Scalar(0)).rat() == Rat(0));                  // off B
    CHECK(g.eval(Scalar(1)).rat() == Rat(0));
    // sandwiched under the indicator and monotone in n
    auto g2 = bump_under_open(X, B, 8);
    std::mt19937_64 rng(6);
    for (int i = 0; i < 400; ++i) {
        double x = (rng() % 1000) / 1000.0;
        double vx = g.eval(Scalar::approx(x)).value();
        CHECK(vx <= g2.eval(Scalar::approx(x)).value() + 1e-15);
        CHECK(vx <= (B.contains(Scalar::approx(x)) ? 1.0 : 0.0) + 1e-15);
    }
    // degenerate margin: n = 1 leaves no 1-deep interior in (0,1)
    CHECK_THROWS_AS(bump_under_open(X, B, 1), DegenerateInputError);
}

TEST_CASE("indicator endpoint flags") {
    auto X = Space::real_line(Interval::open(Scalar(0), Scalar(1)));
    auto A = BorelSet::real(X, RealSet::of(Interval::lopen(Scalar::rational(1, 3),
                                                           Scalar::rational(2, 3))));
    auto f = indicator(X, A);
    CHECK(f.eval(Scalar::rational(2, 3)).rat() == Rat(1));
    CHECK(f.eval(Scalar::rational(1, 3)).rat() == Rat(0));
    CHECK(f.gamma().rat() == Rat(1));
    CHECK(f.has_tag(Tag::BoundedMeasurable));
}

TEST_CASE("indicator of a residue-class set on the naturals") {
    auto D = Space::discrete_nat();
    auto evens = BorelSet::nat(D, NatSet::residue_class(2, {0}));
    auto f = indicator(D, evens);
    CHECK(f.eval_nat(2).rat() == Rat(1));
    CHECK(f.eval_nat(3).rat() == Rat(0));
    CHECK(f.eval_nat(1000).rat() == Rat(1));
    CHECK(f.eval_nat(1001).rat() == Rat(0));
}

TEST_CASE("truncate") {
    auto X = line(0, 4);
    auto f = TestFunction::from_pieces(
        X, {FnPiece{X.domain(), PowerSum::monomial(Scalar(1), Rat(2))}}, Scalar(0), {});
    auto t = truncate(f, Scalar(4));
    CHECK(t.eval(Scalar(3)).rat() == Rat(0));        // x^2 >= 4 zeroed
    CHECK(t.eval(Scalar(2)).rat() == Rat(0));        // boundary excluded (strict <)
    CHECK(t.eval(Scalar::rational(3, 2)).rat() == Rat(9, 4));
    CHECK(truncate(f, Scalar(0)).eval(Scalar(1)).rat() == Rat(0));
}

TEST_CASE("random families carry certified tags") {
    auto X = line(0, 1);
    auto fam = random_family(X, Family::Cc, Scalar(1), 7, 5);
    REQUIRE(fam.size() == 5);
    for (const auto& f : fam) {
        CHECK(f.has_tag(Tag::Continuous));
        CHECK(f.has_tag(Tag::CompactSupport));
        CHECK(verify_tags(f, 123));
        auto supp = closure(X, f.support());
        CHECK(is_bounded(X, supp));
        CHECK(is_closed(X, supp));
    }
    // deterministic under the seed
    auto fam2 = random_family(X, Family::Cc, Scalar(1), 7, 5);
    for (std::size_t i = 0; i < fam.size(); ++i)
        CHECK(fam[i].str() == fam2[i].str());

    auto steps = random_family(X, Family::Mgamma, Scalar(2), 11, 6);
    for (const auto& f : steps) {
        CHECK(f.has_tag(Tag::BoundedMeasurable));
        CHECK(verify_tags(f, 55));
        CHECK(f.gamma().rat() == Rat(2));
    }

    // C0 on DiscreteNat includes g(n) = 1/n as its first member
    auto D = Space::discrete_nat();
    auto c0 = random_family(D, Family::C0, Scalar(1), 3, 4);
    REQUIRE(!c0.empty());
    CHECK(c0[0].eval_nat(1).rat() == Rat(1));
    CHECK(c0[0].eval_nat(7).rat() == Rat(1, 7));
    for (const auto& f : c0) CHECK(verify_tags(f, 5));

    // Continuous classes on CofiniteNat are constants; metric classes throw
    auto C = Space::cofinite_nat();
    auto cb = random_family(C, Family::Cb, Scalar(1), 9, 3);
    for (const auto& f : cb) {
        CHECK(f.table().empty());
        REQUIRE(f.tail().has_value());
        CHECK(f.tail()->p == Rat(0));
        CHECK(f.tail()->r == Scalar(1));
    }
    CHECK_THROWS_AS(random_family(C, Family::Holder, Scalar(1), 1, 1),
                    UnsupportedClassError);
}

TEST_CASE("C0 on an unbounded domain mixes decay tails") {
    auto X = Space::real_line(Interval::make(Ext::fin(Scalar(1)), Ext::pos_inf(), true, false));
    auto fam = random_family(X, Family::C0, Scalar(1), 21, 6);
    bool saw_tail = false;
    for (const auto& f : fam) {
        CHECK(f.has_tag(Tag::VanishesAtInfinity));
        CHECK(verify_tags(f, 77));
        if (!is_bounded(X, f.support())) {
            saw_tail = true;
            // decays: value far out is small but nonzero
            double far = f.eval(Scalar(1000)).value();
            CHECK(std::abs(far) < 0.1);
            CHECK(std::abs(far) > 0.0);
        }
    }
    CHECK(saw_tail);
}

TEST_CASE("bump envelope integrals squeeze the set mass (lattice-atomic case)") {
    auto X = line(0, 8);
    // atoms on the quarter-integer lattice, A with lattice endpoints
    Measure nu(X,
               {Atom{Scalar::rational(3, 4), Scalar::rational(1, 4)},
                Atom{Scalar(2), Scalar::rational(1, 2)},
                Atom{Scalar::rational(21, 4), Scalar::rational(1, 4)}},
               {});
    auto A = BorelSet::real(X, RealSet::of(Interval::closed(Scalar(1), Scalar(3))));
    Scalar target = nu.mass(A);
    Scalar prev = Scalar(10);
    for (i64 n : {1, 2, 4, 8, 16, 32}) {
        Scalar v = integrate(bump_over_closed(X, A, n), nu).value;
        CHECK(v >= target);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK(prev == target);  // exact once 1/n clears the lattice spacing

    auto B = BorelSet::real(X, RealSet::of(Interval::open(Scalar(1), Scalar(3))));
    Scalar targetB = nu.mass(B);
    prev = Scalar(-1);
    for (i64 n : {2, 4, 8, 16, 32}) {
        Scalar v = integrate(bump_under_open(X, B, n), nu).value;
        CHECK(v <= targetB);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(prev == targetB);
}

TEST_CASE("holder certificates verified on sampled pairs") {
    auto X = line(0, 4);
    auto A = BorelSet::real(X, RealSet::of(Interval::closed(Scalar(1), Scalar(2))));
    for (i64 n : {1, 3, 9}) {
        auto f = bump_over_closed(X, A, n);
        REQUIRE(f.holder().has_value());
        CHECK(f.holder()->constant == static_cast<double>(n));
        CHECK(verify_tags(f, 1000 + n, 10000));
    }
}
