#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mmodes/space.hpp"

using namespace mmodes;

TEST_CASE("Rat normalization and arithmetic") {
    CHECK(Rat(2, 4) == Rat(1, 2));
    CHECK(Rat(-2, -4) == Rat(1, 2));
    CHECK(Rat(2, -4) == Rat(-1, 2));
    CHECK(*Rat::checked_add(Rat(1, 3), Rat(1, 6)) == Rat(1, 2));
    CHECK(*Rat::checked_mul(Rat(2, 3), Rat(3, 4)) == Rat(1, 2));
    CHECK(*Rat::checked_pow(Rat(2, 3), -2) == Rat(9, 4));
    CHECK(Rat(1, 3) < Rat(1, 2));
    CHECK(Rat(1, 3).str() == "1/3");
    CHECK_THROWS_AS(Rat(1, 0), std::invalid_argument);
    // overflow degrades to nullopt rather than wrapping
    i64 big = (i64(1) << 62);
    CHECK(!Rat::checked_mul(Rat(big), Rat(big)).has_value());
    CHECK(*Rat::exact_sqrt(Rat(9, 4)) == Rat(3, 2));
    CHECK(!Rat::exact_sqrt(Rat(2)).has_value());
}

TEST_CASE("Scalar exactness and degradation") {
    Scalar a = Scalar::rational(1, 3);
    Scalar b = Scalar::rational(1, 6);
    CHECK((a + b).is_exact());
    CHECK((a + b).rat() == Rat(1, 2));
    Scalar c = Scalar::approx(0.25);
    CHECK(!(a + c).is_exact());
    CHECK((a + c).value() == doctest::Approx(1.0 / 3.0 + 0.25));
    // overflow in exact arithmetic falls back to double, never throws
    Scalar big(i64(1) << 62);
    Scalar prod = big * big;
    CHECK(!prod.is_exact());
    CHECK(prod.value() == doctest::Approx(std::pow(2.0, 124)));
    CHECK(Scalar::rational(2, 3).pow_int(-1) == Scalar::rational(3, 2));
}

TEST_CASE("Interval membership and flags") {
    auto iv = Interval::lopen(Scalar::rational(1, 3), Scalar::rational(2, 3));  // (1/3, 2/3]
    CHECK(!iv.contains(Scalar::rational(1, 3)));
    CHECK(iv.contains(Scalar::rational(2, 3)));
    CHECK(iv.contains(Scalar::rational(1, 2)));
    CHECK(Interval::make(Ext::fin(Scalar(1)), Ext::pos_inf(), true, true).hi_closed == false);
    CHECK(Interval::open(Scalar(1), Scalar(1)).is_empty());
    CHECK(Interval::closed(Scalar(1), Scalar(1)).is_point());
}

TEST_CASE("RealSet canonicalization merges touching pieces") {
    // (0,1/2] u (1/2,1) -> (0,1)
    auto s = RealSet::make({Interval::lopen(Scalar(0), Scalar::rational(1, 2)),
                            Interval::open(Scalar::rational(1, 2), Scalar(1))},
                           {});
    REQUIRE(s.intervals().size() == 1);
    CHECK(s.intervals()[0] == Interval::open(Scalar(0), Scalar(1)));

    // [0,1] u [1,2] -> [0,2]
    auto t = RealSet::make({Interval::closed(Scalar(0), Scalar(1)),
                            Interval::closed(Scalar(1), Scalar(2))},
                           {});
    REQUIRE(t.intervals().size() == 1);
    CHECK(t.intervals()[0] == Interval::closed(Scalar(0), Scalar(2)));

    // point absorbed into an open endpoint: (0,1) u {1} -> (0,1]
    auto u = RealSet::make({Interval::open(Scalar(0), Scalar(1))}, {Scalar(1)});
    REQUIRE(u.intervals().size() == 1);
    CHECK(u.intervals()[0] == Interval::lopen(Scalar(0), Scalar(1)));
    CHECK(u.points().empty());

    // disjoint pieces stay apart; degenerate interval becomes a point
    auto v = RealSet::make({Interval::open(Scalar(0), Scalar(1)),
                            Interval::closed(Scalar(5), Scalar(5))},
                           {Scalar(3)});
    CHECK(v.intervals().size() == 1);
    CHECK(v.points().size() == 2);
    CHECK(v.contains(Scalar(3)));
    CHECK(v.contains(Scalar(5)));
    CHECK(!v.contains(Scalar(4)));
}

TEST_CASE("RealSet boolean algebra") {
    auto a = RealSet::of(Interval::closed(Scalar(0), Scalar(2)));
    auto b = RealSet::of(Interval::open(Scalar(1), Scalar(3)));
    auto i = RealSet::intersect(a, b);
    REQUIRE(i.intervals().size() == 1);
    CHECK(i.intervals()[0] == Interval::lopen(Scalar(1), Scalar(2)));
    auto u = RealSet::unite(a, b);
    REQUIRE(u.intervals().size() == 1);
    CHECK(u.intervals()[0] == Interval::ropen(Scalar(0), Scalar(3)));
    auto d = RealSet::subtract(a, b);
    REQUIRE(d.intervals().size() == 1);
    CHECK(d.intervals()[0] == Interval::closed(Scalar(0), Scalar(1)));
    auto c = RealSet::complement_in(a, Interval::open(Scalar(-1), Scalar(4)));
    REQUIRE(c.intervals().size() == 2);
    CHECK(c.intervals()[0] == Interval::open(Scalar(-1), Scalar(0)));
    CHECK(c.intervals()[1] == Interval::open(Scalar(2), Scalar(4)));
}

TEST_CASE("NatSet canonical forms") {
    auto f = NatSet::finite({3, 1, 2, 3});
    CHECK(f.is_finite());
    CHECK(f.elements() == std::vector<i64>{1, 2, 3});
    auto cf = NatSet::cofinite({1, 2});
    CHECK(cf.is_cofinite());
    CHECK(!cf.contains(2));
    CHECK(cf.contains(3));
    CHECK(cf.excluded() == std::vector<i64>{1, 2});
    CHECK(NatSet::unite(f, cf).is_all());
    auto evens = NatSet::residue_class(2, {0});
    CHECK(evens.contains(2));
    CHECK(!evens.contains(3));
    CHECK(evens.complement().contains(3));
    CHECK(NatSet::intersect(evens, NatSet::finite({1, 2, 3, 4})).elements() ==
          std::vector<i64>{2, 4});
    // canonicalization reduces periods: evens u odds = N
    auto odds = NatSet::residue_class(2, {1});
    CHECK(NatSet::unite(evens, odds) == NatSet::all());
    // threshold minimization: tail(1) == all
    CHECK(NatSet::tail(1) == NatSet::all());
    CHECK(NatSet::tail(3) == NatSet::cofinite({1, 2}));
}

TEST_CASE("spec examples: canonicalize on DiscreteNat") {
    // {3} u [1,2] on DiscreteNat -> {1,2,3}
    auto s = NatSet::unite(NatSet::finite({3}), NatSet::finite({1, 2}));
    CHECK(s.elements() == std::vector<i64>{1, 2, 3});
}

TEST_CASE("topology on a real-line subspace") {
    auto X = Space::real_line(Interval::open(Scalar(0), Scalar(1)));
    auto third = Scalar::rational(1, 3);
    auto two_thirds = Scalar::rational(2, 3);

    // interior([1/3,2/3]) on (0,1) -> (1/3,2/3)
    auto A = BorelSet::real(X, RealSet::of(Interval::closed(third, two_thirds)));
    CHECK(interior(X, A) ==
          BorelSet::real(X, RealSet::of(Interval::open(third, two_thirds))));

    // boundary((1/3,2/3]) -> {1/3, 2/3}
    auto B = BorelSet::real(X, RealSet::of(Interval::lopen(third, two_thirds)));
    auto bd = boundary(X, B);
    CHECK(bd == BorelSet::real(X, RealSet::make({}, {third, two_thirds})));
    CHECK(!is_open(X, B));
    CHECK(!is_closed(X, B));

    // relative closure: closure of (0,1/2) in X is (0,1/2]
    auto C = BorelSet::real(X, RealSet::of(Interval::open(Scalar(0), Scalar::rational(1, 2))));
    CHECK(closure(X, C) ==
          BorelSet::real(X, RealSet::of(Interval::lopen(Scalar(0), Scalar::rational(1, 2)))));
    // (0,1/3] is closed in X=(0,1) but not compact
    auto D = BorelSet::real(X, RealSet::of(Interval::lopen(Scalar(0), third)));
    CHECK(is_closed(X, D));
    CHECK(!is_compact(X, D));
    auto E = BorelSet::real(X, RealSet::of(Interval::closed(third, two_thirds)));
    CHECK(is_compact(X, E));

    // domain validation
    CHECK_THROWS_AS(BorelSet::real(X, RealSet::of(Interval::closed(Scalar(0), Scalar(2)))),
                    DomainError);
}

TEST_CASE("topology on CofiniteNat") {
    auto X = Space::cofinite_nat();
    auto evens = BorelSet::nat(X, NatSet::residue_class(2, {0}));
    CHECK(closure(X, evens) == BorelSet::whole(X));  // every infinite set is dense
    CHECK(interior(X, evens).is_empty());
    auto co = BorelSet::nat(X, NatSet::cofinite({1, 2}));
    CHECK(is_open(X, co));
    CHECK(!is_closed(X, co));
    auto fin = BorelSet::nat(X, NatSet::finite({4, 7}));
    CHECK(is_closed(X, fin));
    CHECK(!is_open(X, fin));
    CHECK(is_compact(X, evens));
    CHECK_THROWS_AS(point_set_distance(X, Scalar(1), fin), UnsupportedMetricError);
    CHECK_THROWS_AS(is_bounded(X, fin), UnsupportedMetricError);
}

TEST_CASE("point_set_distance") {
    auto X = Space::real_line(Interval::make(Ext::neg_inf(), Ext::pos_inf(), false, false));
    auto A = BorelSet::real(X, RealSet::of(Interval::closed(Scalar(1), Scalar(2))));
    CHECK(point_set_distance(X, Scalar::approx(0.5), A).value().value() == doctest::Approx(0.5));
    CHECK(point_set_distance(X, Scalar::approx(1.5), A).value().is_zero());
    // x=3, A=(0,1) u {5} -> 2
    auto B = BorelSet::real(
        X, RealSet::make({Interval::open(Scalar(0), Scalar(1))}, {Scalar(5)}));
    CHECK(point_set_distance(X, Scalar(3), B).value() == Scalar(2));
    CHECK(point_set_distance(X, Scalar(0), B).value().is_zero());  // 0 in closure
    CHECK(point_set_distance(X, Scalar(1), BorelSet::empty(X)).is_pos_inf());
}

TEST_CASE("property: De Morgan, boundary identity, open/closed duality") {
    std::mt19937_64 rng(20240811);
    auto X = Space::real_line(Interval::closed(Scalar(0), Scalar(16)));
    auto rand_set = [&]() {
        std::uniform_int_distribution<int> nivs(0, 3), npts(0, 2), endp(0, 32), flag(0, 1);
        std::vector<Interval> ivs;
        std::vector<Scalar> pts;
        for (int i = nivs(rng); i > 0; --i) {
            i64 a = endp(rng), b = endp(rng);
            if (a > b) std::swap(a, b);
            ivs.push_back(Interval::make(Ext::fin(Scalar::rational(a, 2)),
                                         Ext::fin(Scalar::rational(b, 2)), flag(rng),
                                         flag(rng)));
        }
        for (int i = npts(rng); i > 0; --i) pts.push_back(Scalar::rational(endp(rng), 2));
        return BorelSet::real(X, RealSet::make(std::move(ivs), std::move(pts)));
    };
    for (int trial = 0; trial < 200; ++trial) {
        auto A = rand_set();
        auto B = rand_set();
        // De Morgan
        CHECK(complement(X, unite(X, A, B)) ==
              intersect(X, complement(X, A), complement(X, B)));
        // canonicalization idempotent, double complement
        CHECK(canonicalize(X, A) == A);
        CHECK(complement(X, complement(X, A)) == A);
        // boundary = closure minus interior, checked as membership on samples
        auto bd = boundary(X, A);
        auto cl = closure(X, A);
        auto in = interior(X, A);
        for (int s = 0; s <= 32; ++s) {
            Scalar x = Scalar::rational(s, 2);
            CHECK(bd.contains(x) == (cl.contains(x) && !in.contains(x)));
        }
        CHECK(is_open(X, A) == is_closed(X, complement(X, A)));
    }
}

TEST_CASE("property: cofinite opens always intersect") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> n_ex(0, 6), val(1, 30);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<i64> ex1, ex2;
        for (int i = n_ex(rng); i > 0; --i) ex1.push_back(val(rng));
        for (int i = n_ex(rng); i > 0; --i) ex2.push_back(val(rng));
        auto a = NatSet::cofinite(ex1);
        auto b = NatSet::cofinite(ex2);
        CHECK(!NatSet::intersect(a, b).is_empty());
    }
}
