#include "mmodes/testfn.hpp"
#include <limits>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace mmodes {

// ---------------------------------------------------------------------------
// TestFunction

TestFunction TestFunction::from_pieces(const Space& space, std::vector<FnPiece> pieces,
                                       Scalar gamma, std::set<Tag> tags,
                                       std::optional<HolderCert> holder) {
    if (!space.is_real())
        throw SpaceMismatchError("TestFunction::from_pieces: needs a real space");
    TestFunction f;
    f.space_ = space;
    for (auto& p : pieces) {
        if (p.on.is_empty()) continue;
        RealSet on = RealSet::of(p.on);
        if (!RealSet::subtract(on, RealSet::of(space.domain())).is_empty())
            throw DomainError("TestFunction: piece outside the space domain");
        f.pieces_.push_back(std::move(p));
    }
    std::sort(f.pieces_.begin(), f.pieces_.end(),
              [](const FnPiece& a, const FnPiece& b) { return a.on.lo < b.on.lo; });
    f.gamma_ = std::move(gamma);
    f.tags_ = std::move(tags);
    f.holder_ = holder;
    return f;
}

TestFunction TestFunction::on_nat(const Space& space, std::map<i64, Scalar> table,
                                  std::optional<DiscreteTerm> tail, i64 tail_from,
                                  Scalar gamma, std::set<Tag> tags, NatSet tail_on) {
    if (space.is_real()) throw SpaceMismatchError("TestFunction::on_nat: needs a nat space");
    TestFunction f;
    f.space_ = space;
    f.table_ = std::move(table);
    f.tail_ = std::move(tail);
    f.tail_from_ = std::max<i64>(tail_from, 1);
    f.tail_on_ = std::move(tail_on);
    f.gamma_ = std::move(gamma);
    f.tags_ = std::move(tags);
    return f;
}

TestFunction TestFunction::constant(const Space& space, const Scalar& c) {
    std::set<Tag> tags{Tag::Continuous, Tag::BoundedMeasurable};
    if (space.has_metric()) tags.insert(Tag::UniformlyContinuous);
    if (space.is_real()) {
        return from_pieces(space, {FnPiece{space.domain(), PowerSum::constant(c)}},
                           c.abs(), std::move(tags), HolderCert{1.0, 0.0});
    }
    return on_nat(space, {}, DiscreteTerm{c, Rat(0), Scalar(1)}, 1, c.abs(),
                  std::move(tags));
}

Scalar TestFunction::eval(const Scalar& x) const {
    if (!space_.is_real()) {
        if (!x.is_exact() || !x.rat().is_integer())
            throw DomainError("TestFunction: point not a natural");
        return eval_nat(x.rat().num());
    }
    for (const auto& p : pieces_)
        if (p.on.contains(x)) return p.expr.eval(x);
    return Scalar(0);
}

Scalar TestFunction::eval_nat(i64 n) const {
    if (space_.is_real()) return eval(Scalar(n));
    auto it = table_.find(n);
    if (it != table_.end()) return it->second;
    if (tail_ && n >= tail_from_ && tail_on_.contains(n)) return tail_->eval(n);
    return Scalar(0);
}

BorelSet TestFunction::support() const {
    if (space_.is_real()) {
        std::vector<Interval> ivs;
        std::vector<Scalar> pts;
        for (const auto& p : pieces_) {
            if (p.expr.is_zero()) continue;
            if (p.on.is_point())
                pts.push_back(p.on.lo.value());
            else
                ivs.push_back(p.on);
        }
        return BorelSet::real(space_, RealSet::make(std::move(ivs), std::move(pts)));
    }
    std::vector<i64> elems;
    for (const auto& [n, v] : table_)
        if (!v.is_zero()) elems.push_back(n);
    NatSet s = NatSet::finite(elems);
    if (tail_ && !tail_->is_zero())
        s = NatSet::unite(s, NatSet::intersect(NatSet::tail(tail_from_), tail_on_));
    return BorelSet::nat(space_, s);
}

std::string TestFunction::str() const {
    std::ostringstream os;
    if (space_.is_real()) {
        os << "pw[";
        bool first = true;
        for (const auto& p : pieces_) {
            if (!first) os << "; ";
            os << p.on.str() << ": " << p.expr.str();
            first = false;
        }
        os << "]";
    } else {
        os << "nat[";
        bool first = true;
        for (const auto& [n, v] : table_) {
            if (!first) os << "; ";
            os << n << ": " << v.str();
            first = false;
        }
        if (tail_) {
            if (!first) os << "; ";
            os << "n>=" << tail_from_ << ": " << tail_->c.str() << "*n^" << tail_->p.str();
            if (!(tail_->r == Scalar(1))) os << "*" << tail_->r.str() << "^n";
        }
        os << "]";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Piecewise-linear assembly shared by the two bump constructions.

namespace {

// Build a continuous piecewise-linear function from breakpoint values,
// restricted to `within`, as disjoint FnPieces.  Values between consecutive
// breakpoints interpolate linearly; beyond the extreme breakpoints the
// function is constant at the edge values.
std::vector<FnPiece> linear_pieces(const Space& space, const std::vector<Scalar>& bps,
                                   const std::vector<Scalar>& vals, const RealSet& within) {
    std::vector<FnPiece> pieces;
    RealSet covered = RealSet::empty();
    auto emit = [&](const Interval& seg, const PowerSum& expr) {
        if (expr.is_zero()) return;
        RealSet target = RealSet::subtract(RealSet::intersect(RealSet::of(seg), within),
                                           covered);
        for (const auto& iv : target.intervals()) pieces.push_back(FnPiece{iv, expr});
        for (const auto& pt : target.points())
            pieces.push_back(FnPiece{Interval::closed(pt, pt), expr});
        covered = RealSet::unite(covered, target);
    };

    const Interval& D = space.domain();
    if (bps.empty()) return pieces;
    // Left constant tail, interior segments, right constant tail.
    emit(Interval::make(D.lo, Ext::fin(bps.front()), D.lo_closed, true),
         PowerSum::constant(vals.front()));
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const Scalar &u = bps[i], &v = bps[i + 1];
        if (!(u < v)) continue;
        Scalar slope = (vals[i + 1] - vals[i]) / (v - u);
        Scalar icept = vals[i] - slope * u;
        emit(Interval::closed(u, v), PowerSum::linear(icept, slope));
    }
    emit(Interval::make(Ext::fin(bps.back()), D.hi, true, D.hi_closed),
         PowerSum::constant(vals.back()));
    return pieces;
}

std::vector<Scalar> sorted_unique_in_domain(std::vector<Scalar> v, const Interval& D) {
    std::vector<Scalar> out;
    for (const auto& x : v)
        if (D.contains(x)) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Scalar dist_to(const Space& space, const Scalar& x, const BorelSet& A) {
    Ext d = point_set_distance(space, x, A);
    return d.is_finite() ? d.value() : Scalar(0);  // callers guard the empty case
}

}  // namespace

TestFunction bump_over_closed(const Space& space, const BorelSet& A, i64 n) {
    if (!space.has_metric())
        throw UnsupportedMetricError("bump_over_closed: CofiniteNat has no metric");
    if (n < 1) throw std::invalid_argument("bump_over_closed: n must be >= 1");
    if (!is_closed(space, A)) throw std::invalid_argument("bump_over_closed: A must be closed");

    if (space.kind() == SpaceKind::DiscreteNat) {
        // The discrete metric collapses the ramp: 1 - n*rho is the indicator.
        TestFunction f = indicator(space, A);
        auto tags = f.tags();
        tags.insert(Tag::Continuous);
        tags.insert(Tag::UniformlyContinuous);
        if (A.nat_set().is_finite()) tags.insert(Tag::CompactSupport);
        return TestFunction::on_nat(space, f.table(), f.tail(), f.tail_from(), f.gamma(),
                                    tags);
    }

    if (A.is_empty())
        return TestFunction::from_pieces(space, {}, Scalar(1),
                                         {Tag::Continuous, Tag::UniformlyContinuous,
                                          Tag::BoundedMeasurable, Tag::CompactSupport,
                                          Tag::BoundedSupport, Tag::VanishesAtInfinity},
                                         HolderCert{1.0, static_cast<double>(n)});

    const Interval& D = space.domain();
    Scalar inv_n = Scalar::rational(1, n);
    std::vector<Scalar> bps;
    auto add_endpoint = [&](const Scalar& e) {
        bps.push_back(e);
        bps.push_back(e - inv_n);
        bps.push_back(e + inv_n);
    };
    const RealSet& rs = A.real_set();
    for (const auto& iv : rs.intervals()) {
        if (iv.lo.is_finite()) add_endpoint(iv.lo.value());
        if (iv.hi.is_finite()) add_endpoint(iv.hi.value());
    }
    for (const auto& p : rs.points()) add_endpoint(p);
    // Gap midpoints, where the nearest component switches.
    auto brk = rs.breakpoints();
    for (std::size_t i = 0; i + 1 < brk.size(); ++i)
        bps.push_back((brk[i] + brk[i + 1]) / Scalar(2));
    bps = sorted_unique_in_domain(std::move(bps), D);

    std::vector<Scalar> vals;
    vals.reserve(bps.size());
    for (const auto& x : bps) {
        Scalar v = Scalar(1) - Scalar(n) * dist_to(space, x, A);
        vals.push_back(Scalar::max(Scalar(0), v));
    }
    auto pieces = linear_pieces(space, bps, vals, RealSet::of(D));

    TestFunction f = TestFunction::from_pieces(
        space, std::move(pieces), Scalar(1),
        {Tag::Continuous, Tag::UniformlyContinuous, Tag::Holder, Tag::BoundedMeasurable},
        HolderCert{1.0, static_cast<double>(n)});
    std::set<Tag> tags = f.tags();
    BorelSet supp = closure(space, f.support());
    if (is_bounded(space, supp)) {
        tags.insert(Tag::BoundedSupport);
        if (is_compact(space, supp)) {
            tags.insert(Tag::CompactSupport);
            tags.insert(Tag::VanishesAtInfinity);
        }
    }
    return TestFunction::from_pieces(space, f.pieces(), f.gamma(), std::move(tags),
                                     f.holder());
}

TestFunction bump_under_open(const Space& space, const BorelSet& B, i64 n) {
    if (!space.has_metric())
        throw UnsupportedMetricError("bump_under_open: CofiniteNat has no metric");
    if (n < 1) throw std::invalid_argument("bump_under_open: n must be >= 1");
    if (!is_open(space, B)) throw std::invalid_argument("bump_under_open: B must be open");

    if (space.kind() == SpaceKind::DiscreteNat) {
        TestFunction f = indicator(space, B);
        auto tags = f.tags();
        tags.insert(Tag::Continuous);
        tags.insert(Tag::UniformlyContinuous);
        if (B.nat_set().is_finite()) tags.insert(Tag::CompactSupport);
        return TestFunction::on_nat(space, f.table(), f.tail(), f.tail_from(), f.gamma(),
                                    tags);
    }

    BorelSet bd = boundary(space, B);
    if (bd.is_empty()) {
        // No boundary inside the space: the inner margin is all of B.
        TestFunction f = indicator(space, B);
        auto tags = f.tags();
        tags.insert(Tag::Continuous);
        tags.insert(Tag::UniformlyContinuous);
        return TestFunction::from_pieces(space, f.pieces(), f.gamma(), std::move(tags),
                                         HolderCert{1.0, static_cast<double>(n)});
    }

    const Interval& D = space.domain();
    Scalar inv_n = Scalar::rational(1, n);

    std::vector<Scalar> bps;
    for (const auto& p : bd.real_set().points()) {
        bps.push_back(p);
        bps.push_back(p - inv_n);
        bps.push_back(p + inv_n);
    }
    const RealSet& rb = B.real_set();
    for (const auto& iv : rb.intervals()) {
        if (iv.lo.is_finite()) bps.push_back(iv.lo.value());
        if (iv.hi.is_finite()) bps.push_back(iv.hi.value());
        if (iv.lo.is_finite() && iv.hi.is_finite())
            bps.push_back((iv.lo.value() + iv.hi.value()) / Scalar(2));
    }
    bps = sorted_unique_in_domain(std::move(bps), D);

    std::vector<Scalar> vals;
    bool margin_nonempty = false;
    for (const auto& x : bps) {
        Scalar v(0);
        if (B.contains(x)) {
            Ext d = point_set_distance(space, x, bd);
            v = d.is_finite() ? Scalar::min(Scalar(1), Scalar(n) * d.value()) : Scalar(1);
            if (v == Scalar(1)) margin_nonempty = true;
        }
        vals.push_back(v);
    }
    // Unbounded components reach full height far out even with no breakpoint
    // there; check one sample beyond each unbounded end.
    for (const auto& iv : rb.intervals()) {
        if (!iv.hi.is_finite() && iv.lo.is_finite()) {
            Scalar x = iv.lo.value() + Scalar(1) + inv_n;
            margin_nonempty = margin_nonempty ||
                              (B.contains(x) &&
                               !(point_set_distance(space, x, bd) < Ext::fin(inv_n)));
        }
        if (!iv.lo.is_finite() && iv.hi.is_finite()) {
            Scalar x = iv.hi.value() - Scalar(1) - inv_n;
            margin_nonempty = margin_nonempty ||
                              (B.contains(x) &&
                               !(point_set_distance(space, x, bd) < Ext::fin(inv_n)));
        }
    }
    if (!margin_nonempty)
        throw DegenerateInputError("bump_under_open: empty 1/n inner margin");

    auto pieces = linear_pieces(space, bps, vals, rb);
    TestFunction f = TestFunction::from_pieces(
        space, std::move(pieces), Scalar(1),
        {Tag::Continuous, Tag::UniformlyContinuous, Tag::Holder, Tag::BoundedMeasurable},
        HolderCert{1.0, static_cast<double>(n)});
    std::set<Tag> tags = f.tags();
    BorelSet supp = closure(space, f.support());
    if (is_bounded(space, supp)) {
        tags.insert(Tag::BoundedSupport);
        if (is_compact(space, supp)) {
            tags.insert(Tag::CompactSupport);
            tags.insert(Tag::VanishesAtInfinity);
        }
    }
    return TestFunction::from_pieces(space, f.pieces(), f.gamma(), std::move(tags),
                                     f.holder());
}

TestFunction indicator(const Space& space, const BorelSet& A) {
    std::set<Tag> tags{Tag::BoundedMeasurable};
    if (space.is_real()) {
        std::vector<FnPiece> pieces;
        for (const auto& iv : A.real_set().intervals())
            pieces.push_back(FnPiece{iv, PowerSum::constant(Scalar(1))});
        for (const auto& p : A.real_set().points())
            pieces.push_back(FnPiece{Interval::closed(p, p), PowerSum::constant(Scalar(1))});
        if (is_bounded(space, A)) tags.insert(Tag::BoundedSupport);
        if (is_open(space, A) && is_closed(space, A)) {
            tags.insert(Tag::Continuous);
            tags.insert(Tag::UniformlyContinuous);
        }
        return TestFunction::from_pieces(space, std::move(pieces), Scalar(1),
                                         std::move(tags));
    }
    const NatSet& s = A.nat_set();
    if (space.kind() == SpaceKind::DiscreteNat) {
        tags.insert(Tag::Continuous);
        tags.insert(Tag::UniformlyContinuous);
        if (s.is_finite()) {
            tags.insert(Tag::CompactSupport);
            tags.insert(Tag::VanishesAtInfinity);
        }
    }
    if (s.is_finite()) {
        std::map<i64, Scalar> table;
        for (i64 v : s.elements()) table[v] = Scalar(1);
        return TestFunction::on_nat(space, std::move(table), std::nullopt, 1, Scalar(1),
                                    std::move(tags));
    }
    std::map<i64, Scalar> table;
    for (i64 v : s.elements_up_to(s.threshold() - 1)) table[v] = Scalar(1);
    // On the pattern part the indicator is the constant tail gated by the set.
    return TestFunction::on_nat(space, std::move(table),
                                DiscreteTerm{Scalar(1), Rat(0), Scalar(1)}, s.threshold(),
                                Scalar(1), std::move(tags), s);
}

TestFunction truncate(const TestFunction& f, const Scalar& k) {
    if (k.sign() <= 0) {
        // {f < k} misses the nonnegative range entirely.
        if (f.space().is_real())
            return TestFunction::from_pieces(f.space(), {}, Scalar(0),
                                             {Tag::BoundedMeasurable});
        return TestFunction::on_nat(f.space(), {}, std::nullopt, 1, Scalar(0),
                                    {Tag::BoundedMeasurable});
    }
    Scalar gamma = Scalar::min(f.gamma(), k);
    if (f.space().is_real()) {
        std::vector<FnPiece> pieces;
        for (const auto& p : f.pieces()) {
            PowerSum shifted = PowerSum::sub(p.expr, PowerSum::constant(k));
            auto sp = sign_partition(shifted, p.on);
            Ext prev = p.on.lo;
            bool prev_closed = p.on.lo_closed;
            for (std::size_t i = 0; i <= sp.cuts.size(); ++i) {
                Ext next = i < sp.cuts.size() ? Ext::fin(sp.cuts[i]) : p.on.hi;
                bool next_closed = i < sp.cuts.size() ? false : p.on.hi_closed;
                if (sp.signs[i] < 0) {  // f - k < 0 here
                    Interval sub = Interval::make(prev, next, prev_closed, next_closed);
                    if (!sub.is_empty()) pieces.push_back(FnPiece{sub, p.expr});
                }
                prev = next;
                prev_closed = false;  // cut points have f == k, excluded
            }
        }
        return TestFunction::from_pieces(f.space(), std::move(pieces), gamma,
                                         {Tag::BoundedMeasurable, Tag::BoundedSupport});
    }
    std::map<i64, Scalar> table;
    for (const auto& [n, v] : f.table())
        if (v < k) table[n] = v;
    std::optional<DiscreteTerm> tail;
    i64 tail_from = f.tail_from();
    NatSet tail_on = f.tail_on();
    if (f.tail() && !f.tail()->is_zero()) {
        const DiscreteTerm& t = *f.tail();
        if (t.c.sign() < 0) {
            tail = t;  // negative tail always below a positive k
        } else if (t.r == Scalar(1) && t.p == Rat(0)) {
            if (t.c < k) tail = t;  // constant tail kept or dropped whole
        } else {
            // Locate the peak of c n^p r^n, then the first below-k index past it.
            double peak = f.tail_from();
            if (t.r < Scalar(1) && t.p > Rat(0))
                peak = std::max(peak, -t.p.to_double() / std::log(t.r.value()));
            i64 start = std::max<i64>(f.tail_from(), static_cast<i64>(std::ceil(peak)));
            if (t.r == Scalar(1) && t.p > Rat(0)) {
                // Unbounded growth: {f < k} within the tail is finite.
                for (i64 m = f.tail_from(); m < start + 2'000'000; ++m) {
                    Scalar v = t.eval(m);
                    if (!(v < k)) break;
                    if (tail_on.contains(m)) table[m] = v;
                }
            } else {
                i64 m = f.tail_from();
                for (; m < start + 2'000'000; ++m) {
                    Scalar v = t.eval(m);
                    if (m >= start && v < k) break;
                    if (v < k && tail_on.contains(m)) table[m] = v;
                }
                tail = t;
                tail_from = m;
            }
        }
    }
    return TestFunction::on_nat(f.space(), std::move(table), tail, tail_from, gamma,
                                {Tag::BoundedMeasurable}, tail_on);
}

// ---------------------------------------------------------------------------
// Seeded families

namespace {

i64 draw(std::mt19937_64& rng, i64 lo, i64 hi) {  // inclusive
    return lo + static_cast<i64>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Bounded closed window inside the domain for compact supports.
std::pair<Scalar, Scalar> pick_window(const Interval& D) {
    Scalar lo, hi;
    if (D.lo.is_finite() && D.hi.is_finite()) {
        Scalar w = D.hi.value() - D.lo.value();
        Scalar inset = w / Scalar(8);
        lo = D.lo_closed ? D.lo.value() : D.lo.value() + inset;
        hi = D.hi_closed ? D.hi.value() : D.hi.value() - inset;
    } else if (D.lo.is_finite()) {
        lo = D.lo_closed ? D.lo.value() : D.lo.value() + Scalar(1);
        hi = lo + Scalar(8);
    } else if (D.hi.is_finite()) {
        hi = D.hi_closed ? D.hi.value() : D.hi.value() - Scalar(1);
        lo = hi - Scalar(8);
    } else {
        lo = Scalar(-4);
        hi = Scalar(4);
    }
    return {lo, hi};
}

struct Chain {
    std::vector<Scalar> knots;
    std::vector<Scalar> vals;
    double max_slope;
};

Chain random_chain(std::mt19937_64& rng, const Scalar& w0, const Scalar& w1,
                   const Scalar& gamma, bool zero_ends) {
    Chain c;
    int m = static_cast<int>(draw(rng, 2, 5));
    std::vector<i64> grid;
    grid.push_back(0);
    grid.push_back(64);
    for (int i = 0; i < m; ++i) grid.push_back(draw(rng, 1, 63));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    Scalar width = w1 - w0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        c.knots.push_back(w0 + width * Scalar::rational(grid[i], 64));
        bool edge = i == 0 || i + 1 == grid.size();
        Scalar v = (edge && zero_ends) ? Scalar(0)
                                       : gamma * Scalar::rational(draw(rng, -8, 8), 8);
        c.vals.push_back(v);
    }
    c.max_slope = 0;
    for (std::size_t i = 0; i + 1 < c.knots.size(); ++i) {
        double dv = std::abs(c.vals[i + 1].value() - c.vals[i].value());
        double dk = c.knots[i + 1].value() - c.knots[i].value();
        if (dk > 0) c.max_slope = std::max(c.max_slope, dv / dk);
    }
    return c;
}

TestFunction chain_function(const Space& space, const Chain& c, const Scalar& gamma,
                            std::set<Tag> tags, bool clip_outside) {
    std::vector<FnPiece> pieces;
    for (std::size_t i = 0; i + 1 < c.knots.size(); ++i) {
        const Scalar &u = c.knots[i], &v = c.knots[i + 1];
        if (!(u < v)) continue;
        Scalar slope = (c.vals[i + 1] - c.vals[i]) / (v - u);
        Scalar icept = c.vals[i] - slope * u;
        bool last = i + 2 == c.knots.size();
        pieces.push_back(FnPiece{last ? Interval::closed(u, v) : Interval::ropen(u, v),
                                 PowerSum::linear(icept, slope)});
    }
    if (!clip_outside) {
        // Extend edge values to the whole domain as plateaus.
        const Interval& D = space.domain();
        if (!c.vals.empty() && !c.vals.front().is_zero()) {
            Interval left = Interval::make(D.lo, Ext::fin(c.knots.front()), D.lo_closed, false);
            if (!left.is_empty())
                pieces.push_back(FnPiece{left, PowerSum::constant(c.vals.front())});
        }
        if (!c.vals.empty() && !c.vals.back().is_zero()) {
            Interval right = Interval::make(Ext::fin(c.knots.back()), D.hi, false, D.hi_closed);
            if (!right.is_empty())
                pieces.push_back(FnPiece{right, PowerSum::constant(c.vals.back())});
        }
    }
    return TestFunction::from_pieces(space, std::move(pieces), gamma, std::move(tags),
                                     HolderCert{1.0, c.max_slope});
}

TestFunction nat_c0_member(const Space& space, std::mt19937_64& rng, const Scalar& gamma,
                           int index) {
    std::set<Tag> tags{Tag::Continuous, Tag::UniformlyContinuous, Tag::BoundedMeasurable,
                       Tag::VanishesAtInfinity};
    switch (index % 4) {
        case 0:  // gamma * 1/n, the C_0 witness from the discrete space
            return TestFunction::on_nat(space, {},
                                        DiscreteTerm{gamma, Rat(-1), Scalar(1)}, 1, gamma,
                                        tags);
        case 1:
            return TestFunction::on_nat(space, {},
                                        DiscreteTerm{gamma, Rat(-2), Scalar(1)}, 1, gamma,
                                        tags);
        case 2:
            return TestFunction::on_nat(
                space, {}, DiscreteTerm{gamma, Rat(0), Scalar::rational(1, 2)}, 1, gamma,
                tags);
        default: {
            std::map<i64, Scalar> table;
            i64 sz = draw(rng, 1, 6);
            for (i64 i = 0; i < sz; ++i)
                table[draw(rng, 1, 40)] = gamma * Scalar::rational(draw(rng, -8, 8), 8);
            tags.insert(Tag::CompactSupport);
            tags.insert(Tag::BoundedSupport);
            return TestFunction::on_nat(space, std::move(table), std::nullopt, 1, gamma,
                                        tags);
        }
    }
}

}  // namespace

std::vector<TestFunction> random_family(const Space& space, Family family,
                                        const Scalar& gamma, std::uint64_t seed,
                                        int count) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<TestFunction> out;
    if (gamma.sign() < 0) throw std::invalid_argument("random_family: gamma must be >= 0");

    if (space.kind() == SpaceKind::CofiniteNat) {
        switch (family) {
            case Family::Cc:
            case Family::C0:
            case Family::Cb: {
                // Continuous functions on a hyperconnected space are constants.
                for (int i = 0; i < count; ++i) {
                    Scalar c = gamma * Scalar::rational(draw(rng, -8, 8), 8);
                    out.push_back(TestFunction::constant(space, c));
                }
                return out;
            }
            case Family::Mgamma: {
                for (int i = 0; i < count; ++i) {
                    std::map<i64, Scalar> table;
                    for (i64 j = draw(rng, 1, 6); j > 0; --j)
                        table[draw(rng, 1, 40)] = gamma * Scalar::rational(draw(rng, -8, 8), 8);
                    out.push_back(TestFunction::on_nat(space, std::move(table), std::nullopt,
                                                       1, gamma, {Tag::BoundedMeasurable}));
                }
                return out;
            }
            default:
                throw UnsupportedClassError(
                    "random_family: metric function class on CofiniteNat");
        }
    }

    if (space.kind() == SpaceKind::DiscreteNat) {
        for (int i = 0; i < count; ++i) {
            switch (family) {
                case Family::Cc:
                case Family::Holder:
                case Family::UniformlyContinuous: {
                    // Compact = finite support.
                    std::map<i64, Scalar> table;
                    for (i64 j = draw(rng, 1, 6); j > 0; --j)
                        table[draw(rng, 1, 40)] = gamma * Scalar::rational(draw(rng, -8, 8), 8);
                    std::set<Tag> tags{Tag::Continuous, Tag::UniformlyContinuous,
                                       Tag::BoundedMeasurable, Tag::CompactSupport,
                                       Tag::BoundedSupport, Tag::VanishesAtInfinity};
                    out.push_back(TestFunction::on_nat(space, std::move(table), std::nullopt,
                                                       1, gamma, std::move(tags)));
                    break;
                }
                case Family::C0:
                    out.push_back(nat_c0_member(space, rng, gamma, i));
                    break;
                case Family::Cb: {
                    std::map<i64, Scalar> table;
                    for (i64 j = draw(rng, 1, 4); j > 0; --j)
                        table[draw(rng, 1, 40)] = gamma * Scalar::rational(draw(rng, -8, 8), 8);
                    Scalar c = gamma * Scalar::rational(draw(rng, -8, 8), 8);
                    out.push_back(TestFunction::on_nat(
                        space, std::move(table), DiscreteTerm{c, Rat(0), Scalar(1)}, 1,
                        gamma,
                        {Tag::Continuous, Tag::UniformlyContinuous, Tag::BoundedMeasurable}));
                    break;
                }
                case Family::Mgamma: {
                    std::map<i64, Scalar> table;
                    for (i64 j = draw(rng, 1, 8); j > 0; --j)
                        table[draw(rng, 1, 40)] = gamma * Scalar::rational(draw(rng, -8, 8), 8);
                    out.push_back(TestFunction::on_nat(space, std::move(table), std::nullopt,
                                                       1, gamma, {Tag::BoundedMeasurable}));
                    break;
                }
            }
        }
        return out;
    }

    // Real line.
    auto [w0, w1] = pick_window(space.domain());
    bool domain_unbounded = !space.domain().hi.is_finite();
    for (int i = 0; i < count; ++i) {
        switch (family) {
            case Family::Cc:
            case Family::Holder:
            case Family::UniformlyContinuous: {
                Chain c = random_chain(rng, w0, w1, gamma, /*zero_ends=*/true);
                std::set<Tag> tags{Tag::Continuous, Tag::UniformlyContinuous, Tag::Holder,
                                   Tag::BoundedMeasurable, Tag::CompactSupport,
                                   Tag::BoundedSupport, Tag::VanishesAtInfinity};
                out.push_back(chain_function(space, c, gamma, std::move(tags), true));
                break;
            }
            case Family::C0: {
                if (domain_unbounded && i % 2 == 1) {
                    // Ramp up then a power-law decay toward infinity.
                    Scalar a = w0 + (w1 - w0) / Scalar(4);
                    Scalar b = w1;
                    i64 q = draw(rng, 1, 2);
                    Scalar peak = gamma * Scalar::rational(draw(rng, 2, 8), 8);
                    Scalar slope = peak / (b - a);
                    std::vector<FnPiece> pieces{
                        FnPiece{Interval::ropen(a, b),
                                PowerSum::linear(-slope * a, slope)},
                        FnPiece{Interval::make(Ext::fin(b), Ext::pos_inf(), true, false),
                                PowerSum::monomial(peak * b.pow_int(q), Rat(-q))}};
                    out.push_back(TestFunction::from_pieces(
                        space, std::move(pieces), gamma,
                        {Tag::Continuous, Tag::UniformlyContinuous, Tag::BoundedMeasurable,
                         Tag::VanishesAtInfinity},
                        HolderCert{1.0, std::abs(slope.value()) +
                                            std::abs(q * peak.value() / b.value())}));
                } else {
                    Chain c = random_chain(rng, w0, w1, gamma, true);
                    out.push_back(chain_function(
                        space, c, gamma,
                        {Tag::Continuous, Tag::UniformlyContinuous, Tag::Holder,
                         Tag::BoundedMeasurable, Tag::CompactSupport, Tag::BoundedSupport,
                         Tag::VanishesAtInfinity},
                        true));
                }
                break;
            }
            case Family::Cb: {
                Chain c = random_chain(rng, w0, w1, gamma, /*zero_ends=*/false);
                out.push_back(chain_function(space, c, gamma,
                                             {Tag::Continuous, Tag::UniformlyContinuous,
                                              Tag::Holder, Tag::BoundedMeasurable},
                                             false));
                break;
            }
            case Family::Mgamma: {
                // Step function on a random partition of the window.
                std::vector<i64> grid{0, 64};
                for (i64 j = draw(rng, 1, 5); j > 0; --j) grid.push_back(draw(rng, 1, 63));
                std::sort(grid.begin(), grid.end());
                grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
                Scalar width = w1 - w0;
                std::vector<FnPiece> pieces;
                for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
                    Scalar u = w0 + width * Scalar::rational(grid[j], 64);
                    Scalar v = w0 + width * Scalar::rational(grid[j + 1], 64);
                    Scalar val = gamma * Scalar::rational(draw(rng, -8, 8), 8);
                    if (val.is_zero()) continue;
                    bool last = j + 2 == grid.size();
                    pieces.push_back(
                        FnPiece{last ? Interval::closed(u, v) : Interval::ropen(u, v),
                                PowerSum::constant(val)});
                }
                out.push_back(TestFunction::from_pieces(
                    space, std::move(pieces), gamma,
                    {Tag::BoundedMeasurable, Tag::BoundedSupport}));
                break;
            }
        }
    }
    return out;
}

bool verify_tags(const TestFunction& f, std::uint64_t seed, int samples) {
    std::mt19937_64 rng(seed);
    const bool bounded = f.has_tag(Tag::BoundedMeasurable);
    const double g = bounded ? f.gamma().value() + 1e-12
                             : std::numeric_limits<double>::infinity();
    if (!f.space().is_real()) {
        for (i64 n = 1; n <= 512; ++n)
            if (std::abs(f.eval_nat(n).value()) > g) return false;
        return true;
    }
    const Interval& D = f.space().domain();
    double lo = D.lo.is_finite() ? D.lo.value().value() : -64.0;
    double hi = D.hi.is_finite() ? D.hi.value().value() : 64.0;
    // Stay strictly inside open ends.
    double pad = (hi - lo) * 1e-9;
    if (!D.lo_closed) lo += pad;
    if (!D.hi_closed) hi -= pad;
    std::uniform_real_distribution<double> u(lo, hi);
    auto evald = [&](double x) { return f.eval(Scalar::approx(x)).value(); };
    for (int i = 0; i < samples; ++i) {
        double x = u(rng);
        if (std::abs(evald(x)) > g) return false;
    }
    if (f.has_tag(Tag::Holder) && f.holder()) {
        const double C = f.holder()->constant + 1e-9;
        const double a = f.holder()->alpha;
        for (int i = 0; i < samples; ++i) {
            double x = u(rng), y = u(rng);
            if (std::abs(evald(x) - evald(y)) > C * std::pow(std::abs(x - y), a) + 1e-9)
                return false;
        }
    }
    BorelSet supp = closure(f.space(), f.support());
    if (f.has_tag(Tag::CompactSupport) &&
        !(is_bounded(f.space(), supp) && is_compact(f.space(), supp)))
        return false;
    if (f.has_tag(Tag::BoundedSupport) && !is_bounded(f.space(), supp)) return false;
    return true;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Cc: return "Cc";
        case Family::C0: return "C0";
        case Family::Cb: return "Cb";
        case Family::Mgamma: return "Mgamma";
        case Family::Holder: return "holder";
        case Family::UniformlyContinuous: return "uniformly_continuous";
    }
    return "?";
}

}  // namespace mmodes
