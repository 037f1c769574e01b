#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mmodes/numeric.hpp"

namespace mmodes {

struct SpaceMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One interval on the real line with per-endpoint open/closed flags.
/// Infinite endpoints are always open.  Degenerate [a,a] is allowed in raw
/// input and normalizes away during canonicalization.
struct Interval {
    Ext lo = Ext::fin(Scalar(0));
    Ext hi = Ext::fin(Scalar(0));
    bool lo_closed = false;
    bool hi_closed = false;

    static Interval closed(const Scalar& a, const Scalar& b) {
        return make(Ext::fin(a), Ext::fin(b), true, true);
    }
    static Interval open(const Scalar& a, const Scalar& b) {
        return make(Ext::fin(a), Ext::fin(b), false, false);
    }
    static Interval lopen(const Scalar& a, const Scalar& b) {  // (a, b]
        return make(Ext::fin(a), Ext::fin(b), false, true);
    }
    static Interval ropen(const Scalar& a, const Scalar& b) {  // [a, b)
        return make(Ext::fin(a), Ext::fin(b), true, false);
    }
    static Interval make(Ext lo, Ext hi, bool lc, bool hc);
    static Interval whole_line() { return make(Ext::neg_inf(), Ext::pos_inf(), false, false); }

    bool is_empty() const;
    bool is_point() const { return lo == hi && lo.is_finite() && lo_closed && hi_closed; }
    bool contains(const Scalar& x) const;
    bool is_bounded() const { return lo.is_finite() && hi.is_finite(); }

    std::string str() const;

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi && a.lo_closed == b.lo_closed &&
               a.hi_closed == b.hi_closed;
    }
};

/// Canonical finite union of intervals plus isolated points on the real line.
/// Invariants after construction: intervals sorted, pairwise disjoint and
/// non-mergeable, non-degenerate; points sorted, strictly outside every
/// interval and not touching an open endpoint.
class RealSet {
public:
    RealSet() = default;

    /// Canonicalizing constructor: merges touching intervals, absorbs points
    /// into adjacent open endpoints, drops duplicates.
    static RealSet make(std::vector<Interval> ivs, std::vector<Scalar> pts);
    static RealSet empty() { return RealSet(); }
    static RealSet of(const Interval& iv) { return make({iv}, {}); }
    static RealSet point(const Scalar& p) { return make({}, {p}); }

    const std::vector<Interval>& intervals() const { return ivs_; }
    const std::vector<Scalar>& points() const { return pts_; }
    bool is_empty() const { return ivs_.empty() && pts_.empty(); }
    bool contains(const Scalar& x) const;
    bool is_bounded() const;

    /// All finite endpoint/point values, sorted unique.
    std::vector<Scalar> breakpoints() const;

    static RealSet unite(const RealSet& a, const RealSet& b);
    static RealSet intersect(const RealSet& a, const RealSet& b);
    static RealSet subtract(const RealSet& a, const RealSet& b);
    /// Complement within a domain interval.
    static RealSet complement_in(const RealSet& a, const Interval& domain);

    friend bool operator==(const RealSet& a, const RealSet& b) {
        return a.ivs_ == b.ivs_ && a.pts_ == b.pts_;
    }
    friend bool operator!=(const RealSet& a, const RealSet& b) { return !(a == b); }

    std::string str() const;

private:
    std::vector<Interval> ivs_;
    std::vector<Scalar> pts_;
};

/// Eventually periodic subset of N = {1, 2, ...}: membership of n >= threshold
/// is n % period in residues; members below threshold listed explicitly.
/// Finite sets (no residues), cofinite sets (all residues, some low gaps) and
/// residue classes such as the even numbers all live in this one canonical
/// representation, which is closed under union/intersection/complement.
class NatSet {
public:
    NatSet();  // empty

    static NatSet empty() { return NatSet(); }
    static NatSet all();
    static NatSet finite(std::vector<i64> elems);
    static NatSet cofinite(std::vector<i64> excluded);
    /// { n >= from : n % period in residues }
    static NatSet residue_class(i64 period, std::vector<i64> residues, i64 from = 1);
    /// { n : n >= from }
    static NatSet tail(i64 from) { return residue_class(1, {0}, from); }

    bool contains(i64 n) const;
    bool is_empty() const;
    bool is_finite() const;
    bool is_cofinite() const;  // complement finite (includes the full space)
    bool is_all() const;

    /// Finite sets only: the elements.
    std::vector<i64> elements() const;
    /// Cofinite sets only: the excluded elements.
    std::vector<i64> excluded() const;
    std::vector<i64> elements_up_to(i64 n) const;

    NatSet complement() const;
    static NatSet unite(const NatSet& a, const NatSet& b);
    static NatSet intersect(const NatSet& a, const NatSet& b);
    static NatSet subtract(const NatSet& a, const NatSet& b);

    i64 period() const { return period_; }
    i64 threshold() const { return threshold_; }
    const std::vector<bool>& residues() const { return residues_; }

    friend bool operator==(const NatSet& a, const NatSet& b) {
        return a.period_ == b.period_ && a.threshold_ == b.threshold_ &&
               a.residues_ == b.residues_ && a.low_ == b.low_;
    }
    friend bool operator!=(const NatSet& a, const NatSet& b) { return !(a == b); }

    std::string str() const;

private:
    static NatSet make(i64 period, std::vector<bool> residues, i64 threshold,
                       std::vector<i64> low);
    i64 period_;
    std::vector<bool> residues_;
    i64 threshold_;
    std::vector<i64> low_;  // sorted members < threshold_
};

enum class SpaceKind { RealLine, DiscreteNat, CofiniteNat };

/// Ambient space: an interval of the real line with the Euclidean metric,
/// N with the discrete topology, or N with the cofinite topology (which has
/// no metric at all).
class Space {
public:
    static Space real_line(const Interval& domain);
    static Space discrete_nat() { return Space(SpaceKind::DiscreteNat); }
    static Space cofinite_nat() { return Space(SpaceKind::CofiniteNat); }

    SpaceKind kind() const { return kind_; }
    bool is_real() const { return kind_ == SpaceKind::RealLine; }
    bool is_nat() const { return !is_real(); }
    bool has_metric() const { return kind_ != SpaceKind::CofiniteNat; }
    const Interval& domain() const;

    friend bool operator==(const Space& a, const Space& b) {
        if (a.kind_ != b.kind_) return false;
        return a.kind_ != SpaceKind::RealLine || a.domain_ == b.domain_;
    }
    friend bool operator!=(const Space& a, const Space& b) { return !(a == b); }

    std::string str() const;

private:
    explicit Space(SpaceKind k) : kind_(k), domain_(Interval::whole_line()) {}
    SpaceKind kind_;
    Interval domain_;
};

/// A canonical Borel set tied to a space kind: a RealSet on the real line,
/// a NatSet on the discrete / cofinite naturals.
class BorelSet {
public:
    BorelSet() : kind_(SpaceKind::RealLine) {}
    static BorelSet real(const Space& space, RealSet s);
    static BorelSet nat(const Space& space, NatSet s);
    static BorelSet empty(const Space& space);
    static BorelSet whole(const Space& space);

    SpaceKind kind() const { return kind_; }
    const RealSet& real_set() const;
    const NatSet& nat_set() const;
    bool is_empty() const;

    bool contains(const Scalar& x) const;
    bool contains_nat(i64 n) const;

    friend bool operator==(const BorelSet& a, const BorelSet& b) {
        if (a.kind_ != b.kind_) return false;
        return a.kind_ == SpaceKind::RealLine ? a.real_ == b.real_ : a.nat_ == b.nat_;
    }
    friend bool operator!=(const BorelSet& a, const BorelSet& b) { return !(a == b); }

    std::string str() const;

private:
    SpaceKind kind_;
    RealSet real_;
    NatSet nat_;
};

// Set algebra on BorelSet.  All inputs must live on the same space.
BorelSet canonicalize(const Space& space, const BorelSet& raw);
BorelSet unite(const Space& space, const BorelSet& a, const BorelSet& b);
BorelSet intersect(const Space& space, const BorelSet& a, const BorelSet& b);
BorelSet subtract(const Space& space, const BorelSet& a, const BorelSet& b);
BorelSet complement(const Space& space, const BorelSet& a);

// Topology of the space kind, relative to the space (subspace topology of the
// real-line domain; cofinite topology on CofiniteNat).
BorelSet closure(const Space& space, const BorelSet& a);
BorelSet interior(const Space& space, const BorelSet& a);
BorelSet boundary(const Space& space, const BorelSet& a);
bool is_open(const Space& space, const BorelSet& a);
bool is_closed(const Space& space, const BorelSet& a);
/// Contained in some finite interval (real line; independent of domain
/// unboundedness).  True for every subset of DiscreteNat (discrete metric).
bool is_bounded(const Space& space, const BorelSet& a);
/// Compact: closed in the ambient completion and bounded (real line);
/// finite on DiscreteNat; every subset of CofiniteNat is compact.
bool is_compact(const Space& space, const BorelSet& a);

/// Infimum distance from a point to a set; 0 iff the point lies in the
/// closure.  Requires a metric space kind.  Empty sets are at distance +inf.
Ext point_set_distance(const Space& space, const Scalar& x, const BorelSet& a);

}  // namespace mmodes
