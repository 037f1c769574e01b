#pragma once

#include <optional>
#include <vector>

#include "mmodes/space.hpp"

namespace mmodes {

/// Signals a divergent sum or integral.  Carries the direction and the
/// partial sum reached before the computation certified divergence.
struct DivergenceSignal : std::runtime_error {
    DivergenceSignal(int dir, double partial)
        : std::runtime_error(std::string("divergent (") + (dir > 0 ? "+inf" : "-inf") +
                             "), partial sum reached " + std::to_string(partial)),
          direction(dir),
          partial_sum(partial) {}
    int direction;       // +1 -> +inf, -1 -> -inf
    double partial_sum;  // monotone partial sum reached at the cap
};

/// Integrand combination with no consistent improper value (opposite-sign
/// divergences at the endpoints).
struct UndefinedIntegralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PSTerm {
    Scalar coef;
    Rat expo;  // exponent; integer exponents keep the exact path
};

/// Finite sum of power terms c * x^p (a Laurent-style polynomial when all
/// exponents are integers).  This family is closed under products and under
/// the antiderivatives needed for mass evaluation, including the p = -1 log
/// case, which is what makes the symbolic integration exact.
class PowerSum {
public:
    PowerSum() = default;
    static PowerSum constant(const Scalar& c) { return monomial(c, Rat(0)); }
    static PowerSum monomial(const Scalar& c, const Rat& p);
    /// c0 + c1 x + c2 x^2 + ...
    static PowerSum polynomial(const std::vector<Scalar>& coeffs);
    /// a + b x
    static PowerSum linear(const Scalar& a, const Scalar& b) { return polynomial({a, b}); }

    const std::vector<PSTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool all_integer_expos() const;

    Scalar eval(const Scalar& x) const;

    static PowerSum add(const PowerSum& a, const PowerSum& b);
    static PowerSum sub(const PowerSum& a, const PowerSum& b);
    static PowerSum mul(const PowerSum& a, const PowerSum& b);
    PowerSum scaled(const Scalar& c) const;
    PowerSum operator-() const { return scaled(Scalar(-1)); }

    std::string str() const;

private:
    std::vector<PSTerm> terms_;  // sorted by exponent, nonzero coefficients
    void normalize();
};

/// Definite integral outcome of a PowerSum over an extended-real interval,
/// improper endpoints included.
struct IntegOutcome {
    enum Kind { Finite, DivergesPos, DivergesNeg } kind = Finite;
    Scalar value;        // Finite only
    double error_bound = 0.0;  // 0 on the exact path

    static IntegOutcome finite(const Scalar& v, double eb = 0.0) {
        IntegOutcome o;
        o.kind = Finite;
        o.value = v;
        o.error_bound = eb;
        return o;
    }
    static IntegOutcome diverges(int sign) {
        IntegOutcome o;
        o.kind = sign > 0 ? DivergesPos : DivergesNeg;
        return o;
    }
    bool is_finite() const { return kind == Finite; }
    int direction() const { return kind == DivergesPos ? 1 : (kind == DivergesNeg ? -1 : 0); }
};

/// Integrate f over (a, b).  Endpoint flags never matter (single points are
/// Lebesgue-null).  Improper endpoints (0 with negative exponents, +-inf)
/// are resolved exactly from the dominant exponent.  Throws
/// UndefinedIntegralError when the two endpoints diverge with opposite signs.
IntegOutcome integrate_powersum(const PowerSum& f, const Ext& a, const Ext& b);

/// Partition of an interval into maximal open gaps of constant sign of f.
/// cuts are the interior sign-change locations (exact for degree <= 2 with
/// rational roots, double-precision bisection beyond); signs[i] is the sign
/// of f on the i-th gap.
struct SignPartition {
    std::vector<Scalar> cuts;
    std::vector<int> signs;  // size cuts.size() + 1
};
SignPartition sign_partition(const PowerSum& f, const Interval& on);

/// Weight rule w(n) = c * n^p * r^n on the naturals, r in (0, 1].
struct DiscreteTerm {
    Scalar c;
    Rat p;        // rational exponent; integer keeps exactness
    Scalar r = Scalar(1);

    Scalar eval(i64 n) const;
    bool is_zero() const { return c.is_zero() || r.is_zero(); }
    /// Tail classification over an infinite support: converges iff r < 1 or
    /// (r == 1 and p < -1).
    bool tail_summable() const;
};

/// Product stays in the family: exponents add, ratios multiply.
DiscreteTerm discrete_product(const DiscreteTerm& a, const DiscreteTerm& b);

struct DiscreteSum {
    Scalar value;
    double error_bound = 0.0;
};

/// Sum of term(n) over the NatSet.  Finite supports are summed exactly;
/// infinite tails use Euler-Maclaurin midpoint estimates with certified
/// bounds for r == 1, geometric-ratio bounds for r < 1.  Divergent tails
/// (r == 1, p >= -1, c != 0) raise DivergenceSignal carrying the partial sum
/// reached at the cap.
DiscreteSum sum_discrete(const DiscreteTerm& term, const NatSet& over,
                         double divergence_threshold = 1e6);

/// Weight rule restricted to a support set.
struct DiscreteComp {
    DiscreteTerm term;
    NatSet support;
};

/// Net sum of several signed rules over A.  Rules sharing (p, r) are merged
/// per arrangement cell of their supports before classification, so exactly
/// canceling divergent tails net out instead of raising a false divergence.
/// Genuinely divergent nets raise DivergenceSignal; opposite-direction
/// divergences raise UndefinedIntegralError.
DiscreteSum sum_discrete_signed(const std::vector<DiscreteComp>& comps, const NatSet& A,
                                double divergence_threshold = 1e6);

}  // namespace mmodes
