#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mmodes/measure.hpp"

using namespace mmodes;

namespace {

Space x_unit() { return Space::real_line(Interval::open(Scalar(0), Scalar(1))); }
Space x_ray() {
    return Space::real_line(Interval::make(Ext::fin(Scalar(1)), Ext::pos_inf(), true, false));
}

// Example pair on (0,1): mu = 1/2 Leb + 1/2 delta_{2/3},
// nu = Leb|(0,1/3) + Leb|(2/3,1) + 1/3 delta_{1/3}.
Measure mu_pair() {
    auto X = x_unit();
    return Measure(X, {Atom{Scalar::rational(2, 3), Scalar::rational(1, 2)}},
                   {DensityPiece{Interval::open(Scalar(0), Scalar(1)),
                                 PowerSum::constant(Scalar::rational(1, 2))}});
}
Measure nu_pair() {
    auto X = x_unit();
    return Measure(X, {Atom{Scalar::rational(1, 3), Scalar::rational(1, 3)}},
                   {DensityPiece{Interval::open(Scalar(0), Scalar::rational(1, 3)),
                                 PowerSum::constant(Scalar(1))},
                    DensityPiece{Interval::open(Scalar::rational(2, 3), Scalar(1)),
                                 PowerSum::constant(Scalar(1))}});
}

// nu on [1,inf) with density x^-4.
Measure nu_x4() {
    auto X = x_ray();
    return Measure::with_density(X, X.domain(), PowerSum::monomial(Scalar(1), Rat(-4)));
}

// nu_n of the escaping-mass sequence: x^-4 on [1,n] plus Leb on [n,n+1].
Measure nu_n_escaping(i64 n) {
    auto X = x_ray();
    return Measure(X, {},
                   {DensityPiece{Interval::closed(Scalar(1), Scalar(n)),
                                 PowerSum::monomial(Scalar(1), Rat(-4))},
                    DensityPiece{Interval::closed(Scalar(n), Scalar(n + 1)),
                                 PowerSum::constant(Scalar(1))}});
}

}  // namespace

TEST_CASE("mass: tail density integral is exact") {
    auto X = x_ray();
    auto nu = nu_x4();
    // integral over [1,inf) of x^-4 = 1/3, exactly
    Scalar t = nu.mass(BorelSet::whole(X));
    REQUIRE(t.is_exact());
    CHECK(t.rat() == Rat(1, 3));
    CHECK(nu.total_mass().rat() == Rat(1, 3));
    // mass over [2, 4]: 1/3 (2^-3 - 4^-3) = 7/192
    auto A = BorelSet::real(X, RealSet::of(Interval::closed(Scalar(2), Scalar(4))));
    CHECK(nu.mass(A).rat() == Rat(7, 192));
}

TEST_CASE("mass: atom on a closed endpoint") {
    auto X = x_unit();
    auto m = Measure::dirac(X, Scalar::rational(2, 3));
    auto A = BorelSet::real(
        X, RealSet::of(Interval::lopen(Scalar::rational(1, 3), Scalar::rational(2, 3))));
    CHECK(m.mass(A).rat() == Rat(1));
    auto B = BorelSet::real(
        X, RealSet::of(Interval::open(Scalar::rational(1, 3), Scalar::rational(2, 3))));
    CHECK(m.mass(B).rat() == Rat(0));
}

TEST_CASE("escaping sequence: nu_n(X) -> nu(X) + 1") {
    auto X = x_ray();
    auto nu = nu_x4();
    for (i64 n : {2, 4, 8, 64}) {
        Scalar v = nu_n_escaping(n).mass(BorelSet::whole(X));
        // closed form 1/3 - 1/(3 n^3) + 1
        Rat expect = *Rat::checked_add(
            *Rat::checked_sub(Rat(1, 3), Rat(1, 3 * n * n * n)), Rat(1));
        CHECK(v.rat() == expect);
    }
    // bounded sets agree exactly once n clears the set
    auto A = BorelSet::real(X, RealSet::of(Interval::lopen(Scalar(2), Scalar(5))));
    for (i64 n : {8, 16, 32}) CHECK(nu_n_escaping(n).mass(A) == nu.mass(A));
}

TEST_CASE("restrict") {
    auto X = x_ray();
    // Lebesgue on [1,inf) restricted to [n,n+1] has total mass 1
    auto leb = Measure::lebesgue(X, X.domain());
    for (i64 n : {1, 5, 9}) {
        auto R = leb.restrict(
            BorelSet::real(X, RealSet::of(Interval::closed(Scalar(n), Scalar(n + 1)))));
        CHECK(R.total_mass().rat() == Rat(1));
    }
    // restrict to the empty set is the zero measure
    CHECK(nu_x4().restrict(BorelSet::empty(X)).total_mass().rat() == Rat(0));

    // counting measure restricted to {n, n+1, ...}: mass {1..2n} = n+1
    auto D = Space::discrete_nat();
    auto counting = Measure::counting(D, NatSet::all());
    for (i64 n : {3, 7, 12}) {
        auto R = counting.restrict(BorelSet::nat(D, NatSet::tail(n)));
        auto A = BorelSet::nat(D, NatSet::residue_class(1, {0}, 1));
        auto upto = BorelSet::nat(D, [&] {
            std::vector<i64> v;
            for (i64 i = 1; i <= 2 * n; ++i) v.push_back(i);
            return NatSet::finite(v);
        }());
        CHECK(R.mass(upto).rat() == Rat(n + 1));
    }
}

TEST_CASE("divergent counting tails raise the signal") {
    auto D = Space::discrete_nat();
    auto counting = Measure::counting(D, NatSet::all());
    CHECK(!counting.is_finite());
    CHECK_THROWS_AS(counting.total_mass(), DivergenceSignal);
    // finite sets still fine
    CHECK(counting.mass(BorelSet::nat(D, NatSet::finite({2, 4, 9}))).rat() == Rat(3));
    try {
        counting.mass(BorelSet::whole(D));
    } catch (const DivergenceSignal& d) {
        CHECK(d.direction == 1);
        CHECK(d.partial_sum > 1e6);  // partial sums pass the threshold
    }
}

TEST_CASE("difference: signed density and atoms of the attainability pair") {
    auto X = x_unit();
    auto d = SignedMeasure::difference(mu_pair(), nu_pair());
    // density of mu - nu: +1/2 on (1/3,2/3), -1/2 elsewhere
    Scalar third = Scalar::rational(1, 3), two_thirds = Scalar::rational(2, 3);
    for (const auto& p : d.pieces()) {
        REQUIRE((p.sign == 1 || p.sign == -1));
        if (p.sign == 1) {
            CHECK(p.on.lo == Ext::fin(third));
            CHECK(p.on.hi == Ext::fin(two_thirds));
            CHECK(p.density.eval(Scalar::rational(1, 2)).rat() == Rat(1, 2));
        }
    }
    // atoms +1/2 at 2/3 and -1/3 at 1/3
    REQUIRE(d.atoms().size() == 2);
    CHECK(d.atoms()[0].at == third);
    CHECK(d.atoms()[0].mass.rat() == Rat(-1, 3));
    CHECK(d.atoms()[1].at == two_thirds);
    CHECK(d.atoms()[1].mass.rat() == Rat(1, 2));
    // total signed mass zero (both probabilities)
    CHECK(d.total_mass().rat() == Rat(0));
    // difference(mu,mu) vanishes on every sampled set
    auto z = SignedMeasure::difference(mu_pair(), mu_pair());
    CHECK(z.mass(BorelSet::whole(X)).rat() == Rat(0));
    CHECK(z.mass(BorelSet::real(X, RealSet::of(Interval::lopen(third, two_thirds)))).rat() ==
          Rat(0));
}

TEST_CASE("difference splits at interior sign-change roots") {
    auto X = Space::real_line(Interval::closed(Scalar(0), Scalar(1)));
    // mu has density x, nu has density 1/2: difference changes sign at 1/2
    auto mu = Measure::with_density(X, X.domain(), PowerSum::linear(Scalar(0), Scalar(1)));
    auto nu = Measure::with_density(X, X.domain(),
                                    PowerSum::constant(Scalar::rational(1, 2)));
    auto d = SignedMeasure::difference(mu, nu);
    REQUIRE(d.pieces().size() == 2);
    CHECK(d.pieces()[0].sign == -1);
    CHECK(d.pieces()[0].on.hi == Ext::fin(Scalar::rational(1, 2)));
    CHECK(d.pieces()[1].sign == 1);
    CHECK(d.pieces()[1].on.lo == Ext::fin(Scalar::rational(1, 2)));
}

TEST_CASE("total_mass and probability checks") {
    CHECK(mu_pair().total_mass().rat() == Rat(1));
    CHECK(mu_pair().is_probability());
    CHECK(nu_pair().total_mass().rat() == Rat(1));
    auto X = x_unit();
    CHECK(Measure::zero(X).total_mass().rat() == Rat(0));
    // (n-1)/n delta_{2n} + (1/n) delta_1 on CofiniteNat is a probability
    auto C = Space::cofinite_nat();
    for (i64 n : {2, 5, 11}) {
        Measure m(C,
                  {Atom{Scalar(2 * n), Scalar::rational(n - 1, n)},
                   Atom{Scalar(1), Scalar::rational(1, n)}},
                  {});
        CHECK(m.is_probability());
    }
    // scale doubles total mass
    CHECK(mu_pair().scaled(Scalar(2)).total_mass().rat() == Rat(2));
}

TEST_CASE("Measure rejects invalid components") {
    auto X = x_unit();
    CHECK_THROWS_AS(Measure::dirac(X, Scalar(2)), DomainError);
    CHECK_THROWS_AS(Measure(X, {Atom{Scalar::rational(1, 2), Scalar(-1)}}, {}),
                    std::invalid_argument);
    // negative density rejected
    CHECK_THROWS_AS(Measure::with_density(X, Interval::open(Scalar(0), Scalar(1)),
                                          PowerSum::constant(Scalar(-1))),
                    std::invalid_argument);
    // sign change inside a piece rejected for an unsigned measure
    CHECK_THROWS_AS(
        Measure::with_density(X, Interval::open(Scalar(0), Scalar(1)),
                              PowerSum::linear(Scalar::rational(-1, 2), Scalar(1))),
        std::invalid_argument);
    // space mismatch
    auto Y = x_ray();
    CHECK_THROWS_AS(Measure::add(mu_pair(), nu_x4()), SpaceMismatchError);
}

TEST_CASE("property: finite additivity and complements") {
    std::mt19937_64 rng(42);
    auto X = Space::real_line(Interval::closed(Scalar(0), Scalar(8)));
    auto rand_measure = [&]() {
        std::vector<Atom> atoms;
        std::vector<DensityPiece> pieces;
        int na = static_cast<int>(rng() % 3);
        for (int i = 0; i < na; ++i)
            atoms.push_back(Atom{Scalar::rational(static_cast<i64>(rng() % 33), 4),
                                 Scalar::rational(1 + static_cast<i64>(rng() % 8), 8)});
        i64 a = static_cast<i64>(rng() % 16), b = a + 1 + static_cast<i64>(rng() % 16);
        pieces.push_back(DensityPiece{
            Interval::closed(Scalar::rational(a, 4), Scalar::rational(std::min<i64>(b, 32), 4)),
            PowerSum::constant(Scalar::rational(1 + static_cast<i64>(rng() % 4), 4))});
        return Measure(X, std::move(atoms), std::move(pieces));
    };
    auto rand_set = [&]() {
        i64 a = static_cast<i64>(rng() % 33), b = static_cast<i64>(rng() % 33);
        if (a > b) std::swap(a, b);
        return BorelSet::real(X, RealSet::of(Interval::make(
                                     Ext::fin(Scalar::rational(a, 4)),
                                     Ext::fin(Scalar::rational(b, 4)), rng() % 2, rng() % 2)));
    };
    for (int t = 0; t < 100; ++t) {
        auto m = rand_measure();
        auto A = rand_set();
        auto B = rand_set();
        auto AmB = subtract(X, A, B);
        auto AiB = intersect(X, A, B);
        auto AuB = unite(X, A, B);
        // additivity over the disjoint split A u B = (A. B) + (A n B) + (B . A)
        Scalar lhs = m.mass(AuB);
        Scalar rhs = m.mass(AmB) + m.mass(AiB) + m.mass(subtract(X, B, A));
        CHECK(lhs == rhs);
        // complement identity
        CHECK(m.mass(A) + m.mass(complement(X, A)) == m.total_mass());
        // restriction composition
        CHECK(m.restrict(A).restrict(B).mass(BorelSet::whole(X)) == m.mass(AiB));
    }
}

TEST_CASE("exact path and float path agree") {
    auto X = x_unit();
    auto mu = mu_pair();
    // same measure with float-valued parameters
    Measure muf(X,
                {Atom{Scalar::approx(2.0 / 3.0), Scalar::approx(0.5)}},
                {DensityPiece{Interval::open(Scalar(0), Scalar(1)),
                              PowerSum::constant(Scalar::approx(0.5))}});
    for (auto [a, b] : std::vector<std::pair<double, double>>{
             {0.1, 0.9}, {0.2, 2.0 / 3.0 + 1e-9}, {0.0, 0.5}}) {
        auto A = BorelSet::real(
            X, RealSet::of(Interval::open(Scalar::approx(a), Scalar::approx(b))));
        CHECK(std::abs(mu.mass(A).value() - muf.mass(A).value()) < 1e-12);
    }
}
