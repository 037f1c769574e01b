#include "mmodes/space.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mmodes {

// ---------------------------------------------------------------------------
// Interval

Interval Interval::make(Ext lo, Ext hi, bool lc, bool hc) {
    Interval iv;
    iv.lo = lo;
    iv.hi = hi;
    iv.lo_closed = lo.is_finite() && lc;  // infinite ends are open
    iv.hi_closed = hi.is_finite() && hc;
    return iv;
}

bool Interval::is_empty() const {
    if (lo > hi) return true;
    if (lo == hi) return !(lo.is_finite() && lo_closed && hi_closed);
    return false;
}

bool Interval::contains(const Scalar& x) const {
    Ext p = Ext::fin(x);
    if (p < lo || (p == lo && !lo_closed)) return false;
    if (p > hi || (p == hi && !hi_closed)) return false;
    return true;
}

std::string Interval::str() const {
    if (is_point()) return "{" + lo.value().str() + "}";
    std::string s;
    s += lo_closed ? '[' : '(';
    s += lo.str() + "," + hi.str();
    s += hi_closed ? ']' : ')';
    return s;
}

// ---------------------------------------------------------------------------
// RealSet: canonical form is rebuilt from a membership predicate sampled on
// the breakpoint partition.  Membership is constant on every open gap between
// consecutive breakpoints, so one sample per gap plus the breakpoints
// themselves determine the set exactly.

namespace {

std::vector<Scalar> sorted_unique(std::vector<Scalar> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<Scalar> collect_breakpoints(const std::vector<Interval>& ivs,
                                        const std::vector<Scalar>& pts) {
    std::vector<Scalar> b;
    for (const auto& iv : ivs) {
        if (iv.lo.is_finite()) b.push_back(iv.lo.value());
        if (iv.hi.is_finite()) b.push_back(iv.hi.value());
    }
    for (const auto& p : pts) b.push_back(p);
    return sorted_unique(std::move(b));
}

}  // namespace

RealSet RealSet::make(std::vector<Interval> ivs, std::vector<Scalar> pts) {
    // Degenerate closed intervals are stored as isolated points.
    std::vector<Interval> keep;
    for (auto& iv : ivs) {
        if (iv.is_empty()) continue;
        if (iv.is_point())
            pts.push_back(iv.lo.value());
        else
            keep.push_back(iv);
    }
    auto bps = collect_breakpoints(keep, pts);

    auto member = [&](const Scalar& x) {
        for (const auto& iv : keep)
            if (iv.contains(x)) return true;
        for (const auto& p : pts)
            if (p == x) return true;
        return false;
    };

    const std::size_t k = bps.size();
    std::vector<bool> in(2 * k + 1, false);
    auto gap_sample = [&](std::size_t g) -> Scalar {
        if (k == 0) return Scalar(0);
        if (g == 0) return bps.front() - Scalar(1);
        if (g == k) return bps.back() + Scalar(1);
        return (bps[g - 1] + bps[g]) / Scalar(2);
    };
    for (std::size_t g = 0; g <= k; ++g) in[2 * g] = member(gap_sample(g));
    for (std::size_t i = 0; i < k; ++i) in[2 * i + 1] = member(bps[i]);

    RealSet out;
    std::size_t r = 0;
    const std::size_t nregions = 2 * k + 1;
    while (r < nregions) {
        if (!in[r]) {
            ++r;
            continue;
        }
        std::size_t start = r;
        while (r < nregions && in[r]) ++r;
        std::size_t end = r - 1;
        if (start == end && start % 2 == 1) {
            out.pts_.push_back(bps[start / 2]);
            continue;
        }
        Ext lo, hi;
        bool lc = false, hc = false;
        if (start % 2 == 1) {
            lo = Ext::fin(bps[start / 2]);
            lc = true;
        } else if (start == 0) {
            lo = Ext::neg_inf();
        } else {
            lo = Ext::fin(bps[start / 2 - 1]);
        }
        if (end % 2 == 1) {
            hi = Ext::fin(bps[end / 2]);
            hc = true;
        } else if (end == nregions - 1) {
            hi = Ext::pos_inf();
        } else {
            hi = Ext::fin(bps[end / 2]);
        }
        out.ivs_.push_back(Interval::make(lo, hi, lc, hc));
    }
    return out;
}

bool RealSet::contains(const Scalar& x) const {
    for (const auto& iv : ivs_)
        if (iv.contains(x)) return true;
    for (const auto& p : pts_)
        if (p == x) return true;
    return false;
}

bool RealSet::is_bounded() const {
    for (const auto& iv : ivs_)
        if (!iv.is_bounded()) return false;
    return true;
}

std::vector<Scalar> RealSet::breakpoints() const {
    return collect_breakpoints(ivs_, pts_);
}

namespace {

template <typename Member>
RealSet sweep(const std::vector<Scalar>& bps, Member member) {
    std::vector<Interval> ivs;
    std::vector<Scalar> pts;
    const std::size_t k = bps.size();
    // Delegate assembly to RealSet::make by emitting primitive regions.
    for (std::size_t g = 0; g <= k; ++g) {
        Scalar sample = k == 0              ? Scalar(0)
                        : g == 0            ? bps.front() - Scalar(1)
                        : g == k            ? bps.back() + Scalar(1)
                                            : (bps[g - 1] + bps[g]) / Scalar(2);
        if (!member(sample)) continue;
        Ext lo = g == 0 ? Ext::neg_inf() : Ext::fin(bps[g - 1]);
        Ext hi = g == k ? Ext::pos_inf() : Ext::fin(bps[g]);
        ivs.push_back(Interval::make(lo, hi, false, false));
    }
    for (std::size_t i = 0; i < k; ++i)
        if (member(bps[i])) pts.push_back(bps[i]);
    return RealSet::make(std::move(ivs), std::move(pts));
}

std::vector<Scalar> merged_breakpoints(const RealSet& a, const RealSet& b) {
    auto ba = a.breakpoints();
    auto bb = b.breakpoints();
    ba.insert(ba.end(), bb.begin(), bb.end());
    return sorted_unique(std::move(ba));
}

}  // namespace

RealSet RealSet::unite(const RealSet& a, const RealSet& b) {
    return sweep(merged_breakpoints(a, b),
                 [&](const Scalar& x) { return a.contains(x) || b.contains(x); });
}

RealSet RealSet::intersect(const RealSet& a, const RealSet& b) {
    return sweep(merged_breakpoints(a, b),
                 [&](const Scalar& x) { return a.contains(x) && b.contains(x); });
}

RealSet RealSet::subtract(const RealSet& a, const RealSet& b) {
    return sweep(merged_breakpoints(a, b),
                 [&](const Scalar& x) { return a.contains(x) && !b.contains(x); });
}

RealSet RealSet::complement_in(const RealSet& a, const Interval& domain) {
    auto bps = a.breakpoints();
    if (domain.lo.is_finite()) bps.push_back(domain.lo.value());
    if (domain.hi.is_finite()) bps.push_back(domain.hi.value());
    bps = sorted_unique(std::move(bps));
    return sweep(bps, [&](const Scalar& x) { return domain.contains(x) && !a.contains(x); });
}

std::string RealSet::str() const {
    if (is_empty()) return "{}";
    std::ostringstream os;
    bool first = true;
    std::size_t pi = 0;
    auto emit_pts_before = [&](const Ext& bound) {
        while (pi < pts_.size() && (!bound.is_finite() || Ext::fin(pts_[pi]) < bound)) {
            if (!first) os << " u ";
            os << "{" << pts_[pi].str() << "}";
            first = false;
            ++pi;
        }
    };
    for (const auto& iv : ivs_) {
        emit_pts_before(iv.lo);
        if (!first) os << " u ";
        os << iv.str();
        first = false;
    }
    emit_pts_before(Ext::pos_inf());
    return os.str();
}

// ---------------------------------------------------------------------------
// NatSet

NatSet::NatSet() : period_(1), residues_{false}, threshold_(1) {}

NatSet NatSet::make(i64 period, std::vector<bool> residues, i64 threshold,
                    std::vector<i64> low) {
    if (period < 1 || static_cast<i64>(residues.size()) != period)
        throw std::invalid_argument("NatSet: bad period");
    if (threshold < 1) threshold = 1;
    std::sort(low.begin(), low.end());
    low.erase(std::unique(low.begin(), low.end()), low.end());
    std::vector<i64> kept;
    for (i64 v : low) {
        if (v < 1) throw std::invalid_argument("NatSet: elements must be >= 1");
        if (v < threshold) kept.push_back(v);
        // values >= threshold are governed by the pattern; require consistency
        else if (!residues[v % period])
            throw std::invalid_argument("NatSet: element contradicts pattern");
    }

    // Minimal period.
    for (i64 d = 1; d < period; ++d) {
        if (period % d != 0) continue;
        bool ok = true;
        for (i64 i = 0; i < period && ok; ++i) ok = residues[i] == residues[i % d];
        if (ok) {
            residues.resize(d);
            period = d;
            break;
        }
    }

    // Minimal threshold: fold explicit members that already match the pattern.
    while (threshold > 1) {
        i64 t = threshold - 1;
        bool in_low = !kept.empty() && kept.back() == t;
        if (in_low != static_cast<bool>(residues[t % period])) break;
        if (in_low) kept.pop_back();
        threshold = t;
    }

    NatSet s;
    s.period_ = period;
    s.residues_ = std::move(residues);
    s.threshold_ = threshold;
    s.low_ = std::move(kept);
    return s;
}

NatSet NatSet::all() { return make(1, {true}, 1, {}); }

NatSet NatSet::finite(std::vector<i64> elems) {
    i64 t = 1;
    for (i64 v : elems) t = std::max(t, v + 1);
    return make(1, {false}, t, std::move(elems));
}

NatSet NatSet::cofinite(std::vector<i64> excluded) {
    i64 t = 1;
    for (i64 v : excluded) t = std::max(t, v + 1);
    std::sort(excluded.begin(), excluded.end());
    std::vector<i64> low;
    for (i64 n = 1; n < t; ++n)
        if (!std::binary_search(excluded.begin(), excluded.end(), n)) low.push_back(n);
    return make(1, {true}, t, std::move(low));
}

NatSet NatSet::residue_class(i64 period, std::vector<i64> residues, i64 from) {
    std::vector<bool> r(period, false);
    for (i64 v : residues) {
        if (v < 0 || v >= period) throw std::invalid_argument("NatSet: residue out of range");
        r[v] = true;
    }
    std::vector<i64> low;  // none below `from`
    return make(period, std::move(r), std::max<i64>(from, 1), std::move(low));
}

bool NatSet::contains(i64 n) const {
    if (n < 1) return false;
    if (n < threshold_) return std::binary_search(low_.begin(), low_.end(), n);
    return residues_[n % period_];
}

bool NatSet::is_empty() const {
    if (!low_.empty()) return false;
    for (bool b : residues_)
        if (b) return false;
    return true;
}

bool NatSet::is_finite() const {
    for (bool b : residues_)
        if (b) return false;
    return true;
}

bool NatSet::is_cofinite() const {
    for (bool b : residues_)
        if (!b) return false;
    return true;
}

bool NatSet::is_all() const {
    return is_cofinite() && threshold_ == 1;
}

std::vector<i64> NatSet::elements() const {
    if (!is_finite()) throw std::logic_error("NatSet: elements() on infinite set");
    return low_;
}

std::vector<i64> NatSet::excluded() const {
    if (!is_cofinite()) throw std::logic_error("NatSet: excluded() on non-cofinite set");
    std::vector<i64> out;
    for (i64 n = 1; n < threshold_; ++n)
        if (!contains(n)) out.push_back(n);
    return out;
}

std::vector<i64> NatSet::elements_up_to(i64 n) const {
    std::vector<i64> out;
    for (i64 v = 1; v <= n; ++v)
        if (contains(v)) out.push_back(v);
    return out;
}

NatSet NatSet::complement() const {
    std::vector<bool> r(residues_);
    r.flip();
    std::vector<i64> low;
    for (i64 n = 1; n < threshold_; ++n)
        if (!contains(n)) low.push_back(n);
    return make(period_, std::move(r), threshold_, std::move(low));
}

namespace {
i64 lcm_capped(i64 a, i64 b) {
    i64 l = std::lcm(a, b);
    if (l > (1 << 20)) throw std::invalid_argument("NatSet: combined period too large");
    return l;
}
}  // namespace

NatSet NatSet::unite(const NatSet& a, const NatSet& b) {
    i64 period = lcm_capped(a.period_, b.period_);
    i64 threshold = std::max(a.threshold_, b.threshold_);
    std::vector<bool> r(period);
    for (i64 i = 0; i < period; ++i) {
        i64 n = threshold + ((i - threshold) % period + period) % period;
        r[i] = a.contains(n) || b.contains(n);
    }
    std::vector<i64> low;
    for (i64 n = 1; n < threshold; ++n)
        if (a.contains(n) || b.contains(n)) low.push_back(n);
    return make(period, std::move(r), threshold, std::move(low));
}

NatSet NatSet::intersect(const NatSet& a, const NatSet& b) {
    i64 period = lcm_capped(a.period_, b.period_);
    i64 threshold = std::max(a.threshold_, b.threshold_);
    std::vector<bool> r(period);
    for (i64 i = 0; i < period; ++i) {
        i64 n = threshold + ((i - threshold) % period + period) % period;
        r[i] = a.contains(n) && b.contains(n);
    }
    std::vector<i64> low;
    for (i64 n = 1; n < threshold; ++n)
        if (a.contains(n) && b.contains(n)) low.push_back(n);
    return make(period, std::move(r), threshold, std::move(low));
}

NatSet NatSet::subtract(const NatSet& a, const NatSet& b) {
    return intersect(a, b.complement());
}

std::string NatSet::str() const {
    if (is_empty()) return "{}";
    if (is_all()) return "N";
    if (is_finite()) {
        std::ostringstream os;
        os << "{";
        bool first = true;
        for (i64 v : low_) {
            if (!first) os << ",";
            os << v;
            first = false;
        }
        os << "}";
        return os.str();
    }
    if (is_cofinite()) {
        auto ex = excluded();
        std::ostringstream os;
        os << "co{";
        bool first = true;
        for (i64 v : ex) {
            if (!first) os << ",";
            os << v;
            first = false;
        }
        os << "}";
        return os.str();
    }
    std::ostringstream os;
    os << "mod(" << period_ << ":";
    bool first = true;
    for (i64 i = 0; i < period_; ++i) {
        if (!residues_[i]) continue;
        if (!first) os << ",";
        os << i;
        first = false;
    }
    os << ")";
    if (threshold_ > 1 || !low_.empty()) {
        os << " from " << threshold_;
        if (!low_.empty()) {
            os << " u {";
            first = true;
            for (i64 v : low_) {
                if (!first) os << ",";
                os << v;
                first = false;
            }
            os << "}";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Space

Space Space::real_line(const Interval& domain) {
    if (domain.is_empty()) throw DomainError("Space: empty real-line domain");
    Space s(SpaceKind::RealLine);
    s.domain_ = domain;
    return s;
}

const Interval& Space::domain() const {
    if (kind_ != SpaceKind::RealLine) throw std::logic_error("Space: no real domain");
    return domain_;
}

std::string Space::str() const {
    switch (kind_) {
        case SpaceKind::RealLine:
            return "real_line " + domain_.str();
        case SpaceKind::DiscreteNat:
            return "discrete_nat";
        case SpaceKind::CofiniteNat:
            return "cofinite_nat";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// BorelSet

BorelSet BorelSet::real(const Space& space, RealSet s) {
    if (!space.is_real()) throw SpaceMismatchError("BorelSet: real set on non-real space");
    if (!RealSet::subtract(s, RealSet::of(space.domain())).is_empty())
        throw DomainError("BorelSet: component outside the space domain");
    BorelSet b;
    b.kind_ = SpaceKind::RealLine;
    b.real_ = std::move(s);
    return b;
}

BorelSet BorelSet::nat(const Space& space, NatSet s) {
    if (!space.is_nat()) throw SpaceMismatchError("BorelSet: nat set on real space");
    BorelSet b;
    b.kind_ = space.kind();
    b.nat_ = std::move(s);
    return b;
}

BorelSet BorelSet::empty(const Space& space) {
    return space.is_real() ? real(space, RealSet::empty()) : nat(space, NatSet::empty());
}

BorelSet BorelSet::whole(const Space& space) {
    return space.is_real() ? real(space, RealSet::of(space.domain()))
                           : nat(space, NatSet::all());
}

const RealSet& BorelSet::real_set() const {
    if (kind_ != SpaceKind::RealLine) throw std::logic_error("BorelSet: not a real set");
    return real_;
}

const NatSet& BorelSet::nat_set() const {
    if (kind_ == SpaceKind::RealLine) throw std::logic_error("BorelSet: not a nat set");
    return nat_;
}

bool BorelSet::is_empty() const {
    return kind_ == SpaceKind::RealLine ? real_.is_empty() : nat_.is_empty();
}

bool BorelSet::contains(const Scalar& x) const {
    if (kind_ == SpaceKind::RealLine) return real_.contains(x);
    if (!x.is_exact() || !x.rat().is_integer()) return false;
    return nat_.contains(x.rat().num());
}

bool BorelSet::contains_nat(i64 n) const {
    if (kind_ == SpaceKind::RealLine) return real_.contains(Scalar(n));
    return nat_.contains(n);
}

std::string BorelSet::str() const {
    return kind_ == SpaceKind::RealLine ? real_.str() : nat_.str();
}

// ---------------------------------------------------------------------------
// Set algebra and topology

namespace {
void check_kind(const Space& space, const BorelSet& a) {
    if (space.kind() != a.kind()) throw SpaceMismatchError("BorelSet kind mismatch");
}
}  // namespace

BorelSet canonicalize(const Space& space, const BorelSet& raw) {
    check_kind(space, raw);
    // Construction canonicalizes; rebuilding is the identity and validates.
    if (space.is_real())
        return BorelSet::real(space, RealSet::make(raw.real_set().intervals(),
                                                   raw.real_set().points()));
    return BorelSet::nat(space, raw.nat_set());
}

BorelSet unite(const Space& space, const BorelSet& a, const BorelSet& b) {
    check_kind(space, a);
    check_kind(space, b);
    if (space.is_real())
        return BorelSet::real(space, RealSet::unite(a.real_set(), b.real_set()));
    return BorelSet::nat(space, NatSet::unite(a.nat_set(), b.nat_set()));
}

BorelSet intersect(const Space& space, const BorelSet& a, const BorelSet& b) {
    check_kind(space, a);
    check_kind(space, b);
    if (space.is_real())
        return BorelSet::real(space, RealSet::intersect(a.real_set(), b.real_set()));
    return BorelSet::nat(space, NatSet::intersect(a.nat_set(), b.nat_set()));
}

BorelSet subtract(const Space& space, const BorelSet& a, const BorelSet& b) {
    check_kind(space, a);
    check_kind(space, b);
    if (space.is_real())
        return BorelSet::real(space, RealSet::subtract(a.real_set(), b.real_set()));
    return BorelSet::nat(space, NatSet::subtract(a.nat_set(), b.nat_set()));
}

BorelSet complement(const Space& space, const BorelSet& a) {
    check_kind(space, a);
    if (space.is_real())
        return BorelSet::real(space, RealSet::complement_in(a.real_set(), space.domain()));
    return BorelSet::nat(space, a.nat_set().complement());
}

BorelSet closure(const Space& space, const BorelSet& a) {
    check_kind(space, a);
    if (space.is_real()) {
        std::vector<Interval> ivs;
        for (const auto& iv : a.real_set().intervals())
            ivs.push_back(Interval::make(iv.lo, iv.hi, true, true));
        RealSet closed = RealSet::make(std::move(ivs), a.real_set().points());
        // Relative closure: closure in R clipped back into the domain.
        return BorelSet::real(space,
                              RealSet::intersect(closed, RealSet::of(space.domain())));
    }
    if (space.kind() == SpaceKind::DiscreteNat) return a;
    // Cofinite topology: finite sets are closed, every infinite set is dense.
    return a.nat_set().is_finite() ? a : BorelSet::nat(space, NatSet::all());
}

BorelSet interior(const Space& space, const BorelSet& a) {
    check_kind(space, a);
    if (space.kind() == SpaceKind::DiscreteNat) return a;
    if (space.kind() == SpaceKind::CofiniteNat)
        return a.nat_set().is_cofinite() ? a : BorelSet::nat(space, NatSet::empty());
    return complement(space, closure(space, complement(space, a)));
}

BorelSet boundary(const Space& space, const BorelSet& a) {
    return subtract(space, closure(space, a), interior(space, a));
}

bool is_open(const Space& space, const BorelSet& a) {
    return a == interior(space, a);
}

bool is_closed(const Space& space, const BorelSet& a) {
    return a == closure(space, a);
}

bool is_bounded(const Space& space, const BorelSet& a) {
    check_kind(space, a);
    switch (space.kind()) {
        case SpaceKind::RealLine:
            return a.real_set().is_bounded();
        case SpaceKind::DiscreteNat:
            return true;  // discrete metric: diameter <= 1
        case SpaceKind::CofiniteNat:
            throw UnsupportedMetricError("is_bounded: CofiniteNat has no metric");
    }
    return false;
}

bool is_compact(const Space& space, const BorelSet& a) {
    check_kind(space, a);
    switch (space.kind()) {
        case SpaceKind::RealLine: {
            if (!a.real_set().is_bounded()) return false;
            // Compact iff already closed in R (all endpoints closed), which
            // also forces closedness in the subspace.
            std::vector<Interval> ivs;
            for (const auto& iv : a.real_set().intervals())
                ivs.push_back(Interval::make(iv.lo, iv.hi, true, true));
            RealSet closed_r = RealSet::make(std::move(ivs), a.real_set().points());
            return closed_r == a.real_set();
        }
        case SpaceKind::DiscreteNat:
            return a.nat_set().is_finite();
        case SpaceKind::CofiniteNat:
            return true;  // every subset of a cofinite space is compact
    }
    return false;
}

Ext point_set_distance(const Space& space, const Scalar& x, const BorelSet& a) {
    check_kind(space, a);
    if (!space.has_metric())
        throw UnsupportedMetricError("point_set_distance: CofiniteNat has no metric");
    if (a.is_empty()) return Ext::pos_inf();
    if (space.kind() == SpaceKind::DiscreteNat) {
        if (!x.is_exact() || !x.rat().is_integer())
            throw DomainError("point_set_distance: point not a natural");
        return Ext::fin(a.nat_set().contains(x.rat().num()) ? Scalar(0) : Scalar(1));
    }
    Scalar best;
    bool has = false;
    auto consider = [&](const Scalar& d) {
        if (!has || d < best) {
            best = d;
            has = true;
        }
    };
    for (const auto& iv : a.real_set().intervals()) {
        Scalar d(0);
        if (iv.lo.is_finite() && x < iv.lo.value())
            d = iv.lo.value() - x;
        else if (iv.hi.is_finite() && x > iv.hi.value())
            d = x - iv.hi.value();
        consider(d);
    }
    for (const auto& p : a.real_set().points()) consider((p - x).abs());
    return Ext::fin(best);
}

}  // namespace mmodes
