#include "mmodes/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace mmodes {

namespace {

struct Accum {
    Scalar value = Scalar(0);
    double eb = 0.0;
    bool div_pos = false;
    bool div_neg = false;
    double partial = 0.0;

    void add_finite(const Scalar& v, double e) {
        value += v;
        eb += e;
    }
    void add_divergent(int dir, double p) {
        (dir > 0 ? div_pos : div_neg) = true;
        partial += p;
    }
    IntegralResult finish(IntegralResult::Method m) const {
        if (div_pos && div_neg)
            throw UndefinedIntegralError(
                "integral undefined: positive and negative parts both diverge");
        if (div_pos || div_neg)
            return IntegralResult::divergent(div_pos ? 1 : -1, partial + value.value(), m);
        return IntegralResult::of(value, eb, m);
    }
};

// Atom contributions; exact.
void add_atoms(Accum& acc, const TestFunction& f, const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) acc.add_finite(f.eval(a.at) * a.mass, 0.0);
}

// Closed-form product integral of f against one density piece.
void add_density_closed(Accum& acc, const TestFunction& f, const Interval& on,
                        const PowerSum& density) {
    for (const auto& fp : f.pieces()) {
        RealSet cells = RealSet::intersect(RealSet::of(on), RealSet::of(fp.on));
        if (cells.is_empty()) continue;
        PowerSum prod = PowerSum::mul(fp.expr, density);
        for (const auto& cell : cells.intervals()) {
            auto out = integrate_powersum(prod, cell.lo, cell.hi);
            if (out.is_finite())
                acc.add_finite(out.value, out.error_bound);
            else
                acc.add_divergent(out.direction(), 0.0);
        }
    }
}

// Discrete sum of f * w over all discrete components, netted so exactly
// canceling divergent tails do not raise a false divergence.
void add_discrete(Accum& acc, const TestFunction& f,
                  const std::vector<DiscreteComp>& comps) {
    if (comps.empty()) return;
    for (const auto& comp : comps)
        for (const auto& [n, v] : f.table())
            if (comp.support.contains(n)) acc.add_finite(v * comp.term.eval(n), 0.0);
    if (!f.tail() || f.tail()->is_zero()) return;
    NatSet tail_region =
        NatSet::intersect(NatSet::tail(f.tail_from()), f.tail_on());
    // Table entries override the tail rule pointwise.
    std::vector<i64> keys;
    for (const auto& [n, v] : f.table()) keys.push_back(n);
    tail_region = NatSet::subtract(tail_region, NatSet::finite(std::move(keys)));
    std::vector<DiscreteComp> prods;
    for (const auto& comp : comps)
        prods.push_back(DiscreteComp{discrete_product(*f.tail(), comp.term),
                                     NatSet::intersect(comp.support, tail_region)});
    try {
        auto s = sum_discrete_signed(prods, NatSet::all());
        acc.add_finite(s.value, s.error_bound);
    } catch (const DivergenceSignal& d) {
        acc.add_divergent(d.direction, d.partial_sum);
    }
}

void check_same_space(const TestFunction& f, const Space& s) {
    if (f.space() != s)
        throw SpaceMismatchError("integrate: function and measure on different spaces");
}

}  // namespace

IntegralResult integrate(const TestFunction& f, const Measure& m) {
    check_same_space(f, m.space());
    Accum acc;
    add_atoms(acc, f, m.atoms());
    for (const auto& p : m.pieces()) add_density_closed(acc, f, p.on, p.density);
    add_discrete(acc, f, m.discrete());
    return acc.finish(IntegralResult::ClosedForm);
}

IntegralResult integrate(const TestFunction& f, const SignedMeasure& m) {
    check_same_space(f, m.space());
    Accum acc;
    add_atoms(acc, f, m.atoms());
    for (const auto& p : m.pieces()) add_density_closed(acc, f, p.on, p.density);
    add_discrete(acc, f, m.discrete());
    return acc.finish(IntegralResult::ClosedForm);
}

Scalar integrate_truncated(const TestFunction& f, const Measure& m, const Scalar& k) {
    auto r = integrate(truncate(f, k), m);
    if (!r.is_value()) throw DivergenceSignal(r.direction, r.partial_sum);
    return r.value;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature (independent numeric route).

namespace {

// G7/K15 nodes and weights on [-1, 1].
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.0};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                            0.140653259715525, 0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

template <typename F>
void gk15(const F& fn, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = fn(c);
    double k15 = kWgk[7] * fc;
    double g7 = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double x = h * kXgk[i];
        double fsum = fn(c - x) + fn(c + x);
        k15 += kWgk[i] * fsum;
        if (i % 2 == 1) g7 += kWg[i / 2] * fsum;
    }
    k15 *= h;
    g7 *= h;
    result = k15;
    err = 200.0 * std::abs(k15 - g7);
    err = err * std::sqrt(err);
    if (!std::isfinite(err)) err = std::abs(k15 - g7);
}

struct QuadState {
    long budget = 1'000'000;  // remaining subdivisions across all cells
};

template <typename F>
double adaptive(const F& fn, double a, double b, double tol, QuadState& st, double& err_out) {
    std::deque<std::array<double, 2>> stack{{a, b}};
    double sum = 0, err_sum = 0;
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        double r, e;
        gk15(fn, lo, hi, r, e);
        double local_tol = tol * (hi - lo) / (b - a);
        if (e <= std::max(local_tol, 1e-17 * std::abs(r)) || hi - lo < 1e-14 * (1 + std::abs(lo))) {
            sum += r;
            err_sum += e;
            continue;
        }
        if (--st.budget <= 0)
            throw QuadratureCapError("quadrature: subdivision cap reached, inconclusive");
        double mid = 0.5 * (lo + hi);
        stack.push_back({lo, mid});
        stack.push_back({mid, hi});
    }
    err_out += err_sum;
    return sum;
}

double eval_powersum_d(const PowerSum& f, double x) {
    double acc = 0;
    for (const auto& t : f.terms()) acc += t.coef.value() * std::pow(x, t.expo.to_double());
    return acc;
}

}  // namespace

IntegralResult integrate_quadrature(const TestFunction& f, const Measure& m, double tol) {
    check_same_space(f, m.space());
    Accum acc;
    add_atoms(acc, f, m.atoms());
    add_discrete(acc, f, m.discrete());

    // Collect density cells, split at every knot of f and of the measure.
    struct Cell {
        Interval iv;
        PowerSum prod;
    };
    std::vector<Cell> cells;
    for (const auto& p : m.pieces())
        for (const auto& fp : f.pieces()) {
            RealSet cut = RealSet::intersect(RealSet::of(p.on), RealSet::of(fp.on));
            PowerSum prod = PowerSum::mul(fp.expr, p.density);
            if (prod.is_zero()) continue;
            for (const auto& iv : cut.intervals()) cells.push_back(Cell{iv, prod});
        }
    if (cells.empty()) return acc.finish(IntegralResult::Quadrature);

    QuadState st;
    double cell_tol = tol / static_cast<double>(cells.size());
    double err = 0;
    double total = 0;
    for (const auto& cell : cells) {
        auto fn = [&](double x) { return eval_powersum_d(cell.prod, x); };
        double a = cell.iv.lo.to_double();
        double b = cell.iv.hi.to_double();
        if (std::isinf(b)) {
            // Certified power-law tail cutoff: sum |c| M^(p+1)/(-p-1) <= tol/4.
            bool divergent = false;
            int dir = 0;
            for (auto it = cell.prod.terms().rbegin(); it != cell.prod.terms().rend(); ++it)
                if (it->expo >= Rat(-1)) {
                    divergent = true;
                    dir = it->coef.sign();
                    break;
                }
            if (divergent) {
                acc.add_divergent(dir, 0.0);
                continue;
            }
            double M = std::max(std::abs(a), 1.0) * 2;
            auto tail_bound = [&](double Mv) {
                double s = 0;
                for (const auto& t : cell.prod.terms()) {
                    double p = t.expo.to_double();
                    s += std::abs(t.coef.value()) * std::pow(Mv, p + 1) / (-p - 1);
                }
                return s;
            };
            while (tail_bound(M) > cell_tol / 4 && M < 1e300) M *= 2;
            total += adaptive(fn, a, M, cell_tol / 2, st, err);
            err += tail_bound(M);
        } else if (std::isinf(a)) {
            bool divergent = false;
            int dir = 0;
            for (auto it = cell.prod.terms().rbegin(); it != cell.prod.terms().rend(); ++it)
                if (it->expo >= Rat(-1)) {
                    divergent = true;
                    int par = it->expo.is_integer() && it->expo.num() % 2 != 0 ? -1 : 1;
                    dir = it->coef.sign() * par;
                    break;
                }
            if (divergent) {
                acc.add_divergent(dir, 0.0);
                continue;
            }
            double M = std::max(std::abs(b), 1.0) * 2;
            auto tail_bound = [&](double Mv) {
                double s = 0;
                for (const auto& t : cell.prod.terms()) {
                    double p = t.expo.to_double();
                    s += std::abs(t.coef.value()) * std::pow(Mv, p + 1) / (-p - 1);
                }
                return s;
            };
            while (tail_bound(M) > cell_tol / 4 && M < 1e300) M *= 2;
            total += adaptive(fn, -M, b, cell_tol / 2, st, err);
            err += tail_bound(M);
        } else {
            total += adaptive(fn, a, b, cell_tol, st, err);
        }
    }
    acc.add_finite(Scalar::approx(total), err);
    IntegralResult r = acc.finish(IntegralResult::Quadrature);
    r.method = IntegralResult::Quadrature;
    return r;
}

}  // namespace mmodes
