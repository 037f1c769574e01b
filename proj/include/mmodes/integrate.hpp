#pragma once

#include "mmodes/testfn.hpp"

namespace mmodes {

/// Adaptive quadrature exceeded its subdivision cap; the result is
/// inconclusive rather than wrong.
struct QuadratureCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegralResult {
    enum Kind { Value, Divergent } kind = Value;
    enum Method { ClosedForm, Quadrature } method = ClosedForm;
    Scalar value;              // Kind::Value only
    double error_bound = 0.0;  // 0 on the exact path
    int direction = 0;         // Kind::Divergent: +1 / -1
    double partial_sum = 0.0;  // Divergent: partial sum reached

    bool is_value() const { return kind == Value; }
    static IntegralResult of(const Scalar& v, double eb, Method m) {
        IntegralResult r;
        r.kind = Value;
        r.value = v;
        r.error_bound = eb;
        r.method = m;
        return r;
    }
    static IntegralResult divergent(int dir, double partial, Method m) {
        IntegralResult r;
        r.kind = Divergent;
        r.direction = dir;
        r.partial_sum = partial;
        r.method = m;
        return r;
    }
};

/// Integral of f against m: exact atom sums plus closed-form piece integrals
/// (the product of piecewise power-sum forms stays in the family) plus
/// discrete sums with divergence detection.  Throws UndefinedIntegralError
/// when positive and negative parts both diverge.
IntegralResult integrate(const TestFunction& f, const Measure& m);
IntegralResult integrate(const TestFunction& f, const SignedMeasure& m);

/// Same value through the independent numeric route: breakpoint-aware
/// adaptive Gauss-Kronrod on every density cell, with certified tail cutoffs
/// on unbounded pieces.  Atom and discrete parts are shared with the closed
/// form; this second route exists to cross-check the density integrals.
IntegralResult integrate_quadrature(const TestFunction& f, const Measure& m,
                                    double tol = 1e-9);

/// integral of 1_{f < k} * f dm; monotone nondecreasing in k.
Scalar integrate_truncated(const TestFunction& f, const Measure& m, const Scalar& k);

}  // namespace mmodes
