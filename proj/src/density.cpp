#include "mmodes/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mmodes {

// ---------------------------------------------------------------------------
// PowerSum

void PowerSum::normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const PSTerm& a, const PSTerm& b) { return a.expo < b.expo; });
    std::vector<PSTerm> out;
    for (const auto& t : terms_) {
        if (!out.empty() && out.back().expo == t.expo)
            out.back().coef = out.back().coef + t.coef;
        else
            out.push_back(t);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const PSTerm& t) { return t.coef.is_zero(); }),
              out.end());
    terms_ = std::move(out);
}

PowerSum PowerSum::monomial(const Scalar& c, const Rat& p) {
    PowerSum s;
    if (!c.is_zero()) s.terms_.push_back({c, p});
    return s;
}

PowerSum PowerSum::polynomial(const std::vector<Scalar>& coeffs) {
    PowerSum s;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (!coeffs[i].is_zero()) s.terms_.push_back({coeffs[i], Rat(static_cast<i64>(i))});
    s.normalize();
    return s;
}

bool PowerSum::all_integer_expos() const {
    for (const auto& t : terms_)
        if (!t.expo.is_integer()) return false;
    return true;
}

namespace {
Scalar pow_scalar(const Scalar& x, const Rat& p) {
    if (p.is_integer()) return x.pow_int(p.num());
    if (x.sign() < 0)
        throw std::domain_error("PowerSum: fractional power of a negative value");
    return Scalar::approx(std::pow(x.value(), p.to_double()));
}
}  // namespace

Scalar PowerSum::eval(const Scalar& x) const {
    Scalar acc(0);
    for (const auto& t : terms_) acc += t.coef * pow_scalar(x, t.expo);
    return acc;
}

PowerSum PowerSum::add(const PowerSum& a, const PowerSum& b) {
    PowerSum s;
    s.terms_ = a.terms_;
    s.terms_.insert(s.terms_.end(), b.terms_.begin(), b.terms_.end());
    s.normalize();
    return s;
}

PowerSum PowerSum::sub(const PowerSum& a, const PowerSum& b) {
    return add(a, b.scaled(Scalar(-1)));
}

PowerSum PowerSum::mul(const PowerSum& a, const PowerSum& b) {
    PowerSum s;
    for (const auto& ta : a.terms_)
        for (const auto& tb : b.terms_) {
            auto e = Rat::checked_add(ta.expo, tb.expo);
            if (!e) throw std::overflow_error("PowerSum: exponent overflow");
            s.terms_.push_back({ta.coef * tb.coef, *e});
        }
    s.normalize();
    return s;
}

PowerSum PowerSum::scaled(const Scalar& c) const {
    PowerSum s;
    if (c.is_zero()) return s;
    s.terms_ = terms_;
    for (auto& t : s.terms_) t.coef = t.coef * c;
    return s;
}

std::string PowerSum::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) os << " + ";
        os << t.coef.str();
        if (!(t.expo == Rat(0))) os << "*x^" << t.expo.str();
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Definite integration with improper endpoints.
//
// The antiderivative of sum c x^p is sum (c/(p+1)) x^(p+1) plus a log term
// for p = -1.  Its one-sided limits always exist in the extended reals, and
// the dominant exponent decides infinite limits.

namespace {

struct AntiDeriv {
    std::vector<PSTerm> terms;  // exponents all nonzero
    Scalar log_coef;            // coefficient of ln|x|
};

AntiDeriv antiderivative(const PowerSum& f) {
    AntiDeriv F;
    F.log_coef = Scalar(0);
    for (const auto& t : f.terms()) {
        if (t.expo == Rat(-1)) {
            F.log_coef += t.coef;
            continue;
        }
        auto e = Rat::checked_add(t.expo, Rat(1));
        if (!e) throw std::overflow_error("PowerSum: exponent overflow");
        F.terms.push_back({t.coef / Scalar(*e), *e});
    }
    return F;
}

struct LimitVal {
    int inf = 0;  // -1, 0, +1
    Scalar v;     // finite value when inf == 0
    bool exact = true;
};

// x -> e^q for integer q at x -> -inf / 0- needs the parity of q.
int parity_sign(const Rat& q) { return (q.num() % 2 == 0) ? 1 : -1; }

LimitVal limit_at(const AntiDeriv& F, const Ext& e, bool from_above) {
    LimitVal out;
    out.v = Scalar(0);
    if (e.is_pos_inf()) {
        // Dominant positive exponent, then the log term.
        for (auto it = F.terms.rbegin(); it != F.terms.rend(); ++it) {
            if (it->expo > Rat(0)) {
                out.inf = it->coef.sign();
                return out;
            }
        }
        if (!F.log_coef.is_zero()) {
            out.inf = F.log_coef.sign();
            return out;
        }
        return out;  // all exponents negative: limit 0
    }
    if (e.is_neg_inf()) {
        for (auto it = F.terms.rbegin(); it != F.terms.rend(); ++it) {
            if (it->expo > Rat(0)) {
                if (!it->expo.is_integer())
                    throw UndefinedIntegralError("fractional power toward -inf");
                out.inf = it->coef.sign() * parity_sign(it->expo);
                return out;
            }
        }
        if (!F.log_coef.is_zero()) {
            out.inf = F.log_coef.sign();  // ln|x| -> +inf
            return out;
        }
        return out;
    }
    const Scalar& x = e.value();
    if (x.is_zero()) {
        // Most negative exponent dominates, then the log term (-> -inf).
        for (const auto& t : F.terms) {
            if (t.expo < Rat(0)) {
                int side = from_above ? 1 : (t.expo.is_integer() ? parity_sign(t.expo) : 0);
                if (side == 0)
                    throw UndefinedIntegralError("fractional power at 0 from below");
                out.inf = t.coef.sign() * side;
                return out;
            }
        }
        if (!F.log_coef.is_zero()) {
            out.inf = -F.log_coef.sign();
            return out;
        }
        return out;  // positive exponents vanish at 0
    }
    Scalar acc(0);
    bool exact = true;
    for (const auto& t : F.terms) {
        if (!t.expo.is_integer() && x.sign() < 0)
            throw UndefinedIntegralError("fractional power at a negative endpoint");
        Scalar term = t.coef * pow_scalar(x.sign() < 0 && !t.expo.is_integer() ? x.abs() : x,
                                          t.expo);
        exact = exact && term.is_exact();
        acc += term;
    }
    if (!F.log_coef.is_zero()) {
        acc += F.log_coef * Scalar::approx(std::log(std::abs(x.value())));
        exact = false;
    }
    out.v = acc;
    out.exact = exact && acc.is_exact();
    return out;
}

}  // namespace

IntegOutcome integrate_powersum(const PowerSum& f, const Ext& a, const Ext& b) {
    if (f.is_zero() || a >= b) return IntegOutcome::finite(Scalar(0));
    // Interior singularity at 0 is not integrable for negative exponents.
    bool has_neg = false;
    for (const auto& t : f.terms()) has_neg = has_neg || t.expo < Rat(0);
    Ext zero = Ext::fin(Scalar(0));
    if (has_neg && a < zero && zero < b)
        throw UndefinedIntegralError("integrand singular inside the interval");

    AntiDeriv F = antiderivative(f);
    LimitVal Fa = limit_at(F, a, /*from_above=*/true);
    LimitVal Fb = limit_at(F, b, /*from_above=*/false);

    if (Fa.inf == 0 && Fb.inf == 0) {
        Scalar v = Fb.v - Fa.v;
        double eb = (Fa.exact && Fb.exact && v.is_exact())
                        ? 0.0
                        : 1e-14 * (1.0 + std::abs(Fa.v.value()) + std::abs(Fb.v.value()));
        return IntegOutcome::finite(v, eb);
    }
    int dir_b = Fb.inf;            // contribution +lim F(b)
    int dir_a = -Fa.inf;           // contribution -lim F(a)
    if (Fb.inf != 0 && Fa.inf != 0) {
        if (dir_b == dir_a) return IntegOutcome::diverges(dir_b);
        throw UndefinedIntegralError("opposite-sign divergence at both endpoints");
    }
    return IntegOutcome::diverges(Fb.inf != 0 ? dir_b : dir_a);
}

// ---------------------------------------------------------------------------
// Sign partition

namespace {

// Roots of a polynomial (coefficient vector, low degree first) strictly
// inside (lo, hi).  Exact for degree <= 2 when the roots are rational.
std::vector<Scalar> poly_roots_in(const std::vector<Scalar>& c, double lo, double hi) {
    std::vector<Scalar> roots;
    std::size_t deg = c.size();
    while (deg > 0 && c[deg - 1].is_zero()) --deg;
    if (deg <= 1) return roots;  // constant
    if (deg == 2) {
        Scalar r = -c[0] / c[1];
        double rv = r.value();
        if (rv > lo && rv < hi) roots.push_back(r);
        return roots;
    }
    if (deg == 3) {
        // c0 + c1 x + c2 x^2
        Scalar A = c[2], B = c[1], C = c[0];
        Scalar disc = B * B - Scalar(4) * A * C;
        if (disc.sign() < 0) return roots;
        Scalar sq = Scalar::approx(std::sqrt(disc.value()));
        if (disc.is_exact()) {
            if (auto s = Rat::exact_sqrt(disc.rat())) sq = Scalar(*s);
        }
        Scalar two_a = Scalar(2) * A;
        for (Scalar r : {(-B - sq) / two_a, (-B + sq) / two_a}) {
            double rv = r.value();
            if (rv > lo && rv < hi &&
                (roots.empty() || !(roots.back() == r)))
                roots.push_back(r);
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }
    // Bisection on sign changes over a sample grid; doubles are enough here.
    auto evald = [&](double x) {
        double acc = 0, xp = 1;
        for (std::size_t i = 0; i < deg; ++i) {
            acc += c[i].value() * xp;
            xp *= x;
        }
        return acc;
    };
    // Cauchy bound keeps infinite search windows finite.
    double bound = 1.0;
    for (std::size_t i = 0; i + 1 < deg; ++i)
        bound = std::max(bound, std::abs(c[i].value() / c[deg - 1].value()));
    bound += 1.0;
    double a = std::max(lo, -bound), b = std::min(hi, bound);
    if (!(a < b)) return roots;
    const int N = 512;
    double prev_x = a + (b - a) * 1e-12, prev_f = evald(prev_x);
    for (int i = 1; i <= N; ++i) {
        double x = a + (b - a) * i / N;
        if (i == N) x = b - (b - a) * 1e-12;
        double fx = evald(x);
        if (fx == 0.0) {
            roots.push_back(Scalar::approx(x));
        } else if (prev_f * fx < 0) {
            double l = prev_x, r = x;
            for (int it = 0; it < 100 && r - l > 1e-15 * (1 + std::abs(l)); ++it) {
                double m = 0.5 * (l + r);
                double fm = evald(m);
                if (fm == 0) {
                    l = r = m;
                } else if (fm * prev_f < 0)
                    r = m;
                else
                    l = m;
            }
            roots.push_back(Scalar::approx(0.5 * (l + r)));
        }
        prev_x = x;
        prev_f = fx;
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

}  // namespace

SignPartition sign_partition(const PowerSum& f, const Interval& on) {
    SignPartition out;
    if (f.is_zero() || on.is_empty()) {
        out.signs = {0};
        return out;
    }

    bool has_nonpoly = false;
    Rat min_expo = f.terms().front().expo;
    for (const auto& t : f.terms()) {
        if (!t.expo.is_integer()) has_nonpoly = true;
        if (t.expo < min_expo) min_expo = t.expo;
    }
    double lo = on.lo.to_double(), hi = on.hi.to_double();

    std::vector<Scalar> cuts;
    if (!has_nonpoly) {
        // Clear negative exponents: f(x) = x^m * g(x) with g a polynomial;
        // on intervals avoiding 0 the sign structure of f is that of g.
        i64 shift = min_expo < Rat(0) ? -min_expo.num() : 0;
        i64 deg_max = 0;
        for (const auto& t : f.terms()) deg_max = std::max(deg_max, t.expo.num() + shift);
        std::vector<Scalar> coef(static_cast<std::size_t>(deg_max) + 1, Scalar(0));
        for (const auto& t : f.terms())
            coef[static_cast<std::size_t>(t.expo.num() + shift)] = t.coef;
        cuts = poly_roots_in(coef, lo, hi);
        if (shift > 0 && lo < 0 && hi > 0)
            throw UndefinedIntegralError("sign_partition: singular at interior 0");
    } else {
        // Numeric sampling for fractional exponents (x > 0 territory).
        auto evald = [&](double x) {
            double acc = 0;
            for (const auto& t : f.terms()) acc += t.coef.value() * std::pow(x, t.expo.to_double());
            return acc;
        };
        double a = std::max(lo, 1e-12), b = std::min(hi, 1e12);
        const int N = 1024;
        double px = a, pf = evald(a);
        for (int i = 1; i <= N; ++i) {
            double x = a + (b - a) * i / N;
            double fx = evald(x);
            if (pf * fx < 0) {
                double l = px, r = x;
                for (int it = 0; it < 100; ++it) {
                    double m = 0.5 * (l + r);
                    if (evald(m) * pf < 0)
                        r = m;
                    else
                        l = m;
                }
                cuts.push_back(Scalar::approx(0.5 * (l + r)));
            }
            px = x;
            pf = fx;
        }
    }

    // Keep cuts strictly inside the interval.
    std::vector<Scalar> inside;
    for (const auto& r : cuts) {
        Ext e = Ext::fin(r);
        if (on.lo < e && e < on.hi) inside.push_back(r);
    }
    out.cuts = std::move(inside);

    auto sample_sign = [&](const Ext& a, const Ext& b) -> int {
        Scalar x(0);
        if (a.is_finite() && b.is_finite())
            x = (a.value() + b.value()) / Scalar(2);
        else if (a.is_finite())
            x = a.value() + Scalar(1);
        else if (b.is_finite())
            x = b.value() - Scalar(1);
        double xv = x.value();
        double acc = 0;
        bool exact_ok = f.all_integer_expos() && x.is_exact();
        if (exact_ok && !(xv == 0.0 && f.terms().front().expo < Rat(0)))
            return f.eval(x).sign();
        for (const auto& t : f.terms()) acc += t.coef.value() * std::pow(xv, t.expo.to_double());
        return acc > 0 ? 1 : (acc < 0 ? -1 : 0);
    };

    Ext prev = on.lo;
    for (std::size_t i = 0; i <= out.cuts.size(); ++i) {
        Ext next = i < out.cuts.size() ? Ext::fin(out.cuts[i]) : on.hi;
        out.signs.push_back(sample_sign(prev, next));
        prev = next;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Discrete terms

Scalar DiscreteTerm::eval(i64 n) const {
    if (n < 1) throw std::domain_error("DiscreteTerm: n must be >= 1");
    Scalar np = p.is_integer() ? Scalar(n).pow_int(p.num())
                               : Scalar::approx(std::pow(static_cast<double>(n), p.to_double()));
    Scalar rn = r == Scalar(1) ? Scalar(1) : r.pow_int(n);
    return c * np * rn;
}

bool DiscreteTerm::tail_summable() const {
    if (is_zero()) return true;
    if (r < Scalar(1)) return true;
    if (r == Scalar(1)) return p < Rat(-1);
    return false;  // r > 1
}

DiscreteTerm discrete_product(const DiscreteTerm& a, const DiscreteTerm& b) {
    auto e = Rat::checked_add(a.p, b.p);
    if (!e) throw std::overflow_error("DiscreteTerm: exponent overflow");
    return DiscreteTerm{a.c * b.c, *e, a.r * b.r};
}

DiscreteSum sum_discrete(const DiscreteTerm& term, const NatSet& over,
                         double divergence_threshold) {
    DiscreteSum out;
    out.value = Scalar(0);
    if (term.is_zero() || over.is_empty()) return out;

    // Explicit members below the pattern threshold: exact.
    for (i64 n = 1; n < over.threshold(); ++n)
        if (over.contains(n)) out.value += term.eval(n);

    if (over.is_finite()) return out;

    if (!term.tail_summable()) {
        // The analytic test already certifies divergence (monotone terms with
        // p >= -1); the partial sum up to the cap is informational.
        int dir = term.c.sign();
        double partial = out.value.value();
        const double cd = term.c.value();
        const double pd = term.p.to_double();
        const double rd = term.r.value();
        const i64 n_cap = over.threshold() + 100'000 * over.period();
        for (i64 n = over.threshold();
             n < n_cap && std::abs(partial) <= divergence_threshold; ++n) {
            if (!over.contains(n)) continue;
            partial += cd * std::pow(static_cast<double>(n), pd) *
                       (rd == 1.0 ? 1.0 : std::pow(rd, static_cast<double>(n)));
        }
        throw DivergenceSignal(dir, partial);
    }

    // Convergent tail, summed per residue class of the pattern.
    const i64 P = over.period();
    const double cd = term.c.value();
    const double pd = term.p.to_double();
    const double rd = term.r.value();
    double tail = 0.0, err = 0.0;
    for (i64 res = 0; res < P; ++res) {
        if (!over.residues()[res]) continue;
        i64 start = over.threshold() + ((res - over.threshold()) % P + P) % P;
        if (rd < 1.0) {
            // Geometric decay: sum until the geometric remainder bound is dust.
            double rr = std::pow(rd, static_cast<double>(P));
            double acc = 0;
            i64 n = start;
            for (int it = 0; it < 100000; ++it, n += P) {
                double g = cd * std::pow(static_cast<double>(n), pd) *
                           std::pow(rd, static_cast<double>(n));
                acc += g;
                double ratio = rr * std::pow((n + P + 0.0) / n, std::max(pd, 0.0));
                if (ratio < 1.0) {
                    double rem = std::abs(g) * ratio / (1.0 - ratio);
                    if (rem < 1e-15 * (1.0 + std::abs(acc))) {
                        err += rem;
                        break;
                    }
                }
            }
            tail += acc;
        } else {
            // r == 1, p < -1: Euler-Maclaurin midpoint tail after a direct run.
            double acc = 0;
            double n = static_cast<double>(start);
            const double stop_scale = std::abs(cd) * (P / 24.0) * std::abs(pd);
            i64 k = 0;
            for (; k < 2'000'000; ++k, n += P) {
                double bound = stop_scale * std::pow(n - P / 2.0, pd - 1.0);
                if (k > 0 && bound < 1e-13 * (1.0 + std::abs(acc))) break;
                acc += cd * std::pow(n, pd);
            }
            // integral of c x^p from n - P/2 to inf, divided by the step
            double tail_int = cd * std::pow(n - P / 2.0, pd + 1.0) / (P * (-pd - 1.0));
            tail += acc + tail_int;
            err += stop_scale * std::pow(n - P / 2.0, pd - 1.0);
        }
    }
    out.value = out.value + Scalar::approx(tail);
    out.error_bound = err + 1e-15 * (1.0 + std::abs(out.value.value()));
    return out;
}

DiscreteSum sum_discrete_signed(const std::vector<DiscreteComp>& comps, const NatSet& A,
                                double divergence_threshold) {
    DiscreteSum out;
    out.value = Scalar(0);
    bool have_div = false;
    int div_dir = 0;
    double div_partial = 0.0;

    // Group rules by (p, r); within a group, decompose the supports into
    // arrangement cells and net the coefficients per cell.
    std::vector<bool> used(comps.size(), false);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (used[i] || comps[i].term.is_zero()) continue;
        std::vector<std::size_t> group;
        for (std::size_t j = i; j < comps.size(); ++j) {
            if (used[j] || comps[j].term.is_zero()) continue;
            if (comps[j].term.p == comps[i].term.p && comps[j].term.r == comps[i].term.r) {
                group.push_back(j);
                used[j] = true;
            }
        }
        struct Cell {
            NatSet set;
            Scalar coef;
        };
        std::vector<Cell> cells{{A, Scalar(0)}};
        for (std::size_t j : group) {
            std::vector<Cell> next;
            for (const auto& cell : cells) {
                NatSet in = NatSet::intersect(cell.set, comps[j].support);
                NatSet rest = NatSet::subtract(cell.set, comps[j].support);
                if (!in.is_empty()) next.push_back(Cell{in, cell.coef + comps[j].term.c});
                if (!rest.is_empty()) next.push_back(Cell{rest, cell.coef});
            }
            if (next.size() > 512)
                throw std::invalid_argument("sum_discrete_signed: arrangement too large");
            cells = std::move(next);
        }
        for (const auto& cell : cells) {
            if (cell.coef.is_zero()) continue;
            DiscreteTerm t{cell.coef, comps[i].term.p, comps[i].term.r};
            try {
                auto s = sum_discrete(t, cell.set, divergence_threshold);
                out.value += s.value;
                out.error_bound += s.error_bound;
            } catch (const DivergenceSignal& ds) {
                if (have_div && div_dir != ds.direction)
                    throw UndefinedIntegralError(
                        "discrete sum undefined: opposite-direction divergences");
                have_div = true;
                div_dir = ds.direction;
                div_partial += ds.partial_sum;
            }
        }
    }
    if (have_div) throw DivergenceSignal(div_dir, div_partial + out.value.value());
    return out;
}

}  // namespace mmodes
