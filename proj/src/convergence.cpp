#include "mmodes/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace mmodes {

std::vector<i64> MeasureSequence::default_grid() {
    std::vector<i64> g;
    for (int k = 1; k <= 14; ++k) g.push_back(i64(1) << k);
    return g;
}

std::vector<i64> MeasureSequence::parity_grid() {
    std::vector<i64> g;
    for (int k = 1; k <= 13; ++k) {
        g.push_back(i64(1) << k);
        g.push_back((i64(1) << k) + 1);
    }
    std::sort(g.begin(), g.end());
    return g;
}

const Measure& MeasureSequence::limit_measure() const {
    if (!limit) throw std::logic_error("MeasureSequence: no candidate limit");
    return *limit;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::vector<std::pair<i64, double>> ProbeTrace::numeric() const {
    std::vector<std::pair<i64, double>> out;
    for (const auto& p : points)
        if (!p.divergent) out.emplace_back(p.n, p.value);
    return out;
}

bool ProbeTrace::any_divergent() const {
    for (const auto& p : points)
        if (p.divergent) return true;
    return false;
}

// ---------------------------------------------------------------------------
// probe_limit

namespace {

// Aitken delta-squared on the last three points; falls back to the last value
// when the differences vanish or misbehave.
double extrapolate_tail(const std::vector<double>& v) {
    std::size_t k = v.size();
    if (k < 3) return v.back();
    double d1 = v[k - 2] - v[k - 3];
    double d2 = v[k - 1] - v[k - 2];
    double denom = d1 - d2;
    if (denom == 0.0 || !std::isfinite(denom)) return v.back();
    double l = v[k - 1] + d2 * d2 / denom;
    if (!std::isfinite(l)) return v.back();
    // Reject wild extrapolations (non-contracting differences).
    if (std::abs(l - v[k - 1]) > 4 * std::abs(d2) + 1e-300) return v.back();
    return l;
}

struct TailCheck {
    bool converged = false;
    double value = 0.0;
};

TailCheck tail_converges(const std::vector<double>& vals, double tol, std::size_t k_last) {
    TailCheck out;
    if (vals.size() < 3) return out;
    std::size_t k = std::min(k_last, vals.size());
    double lo = vals[vals.size() - 1], hi = lo;
    for (std::size_t i = vals.size() - k; i < vals.size(); ++i) {
        lo = std::min(lo, vals[i]);
        hi = std::max(hi, vals[i]);
    }
    double l = extrapolate_tail(vals);
    if (hi - lo <= tol && std::abs(vals.back() - l) <= tol) {
        out.converged = true;
        out.value = l;
    }
    return out;
}

}  // namespace

LimitVerdict probe_limit(const std::vector<std::pair<i64, double>>& trace, double tol,
                         double divergence_threshold) {
    LimitVerdict v;
    v.tolerance = tol;
    if (trace.size() < 6) return v;  // inconclusive
    std::vector<double> vals;
    vals.reserve(trace.size());
    for (const auto& [n, x] : trace) vals.push_back(x);

    auto conv = tail_converges(vals, tol, 4);
    if (conv.converged) {
        v.kind = LimitVerdict::Converges;
        v.value = conv.value;
        return v;
    }

    // Index-parity subsequences for oscillation.
    std::vector<double> even, odd;
    for (std::size_t i = 0; i < vals.size(); ++i) (i % 2 == 0 ? even : odd).push_back(vals[i]);
    auto ce = tail_converges(even, tol, 3);
    auto co = tail_converges(odd, tol, 3);
    if (ce.converged && co.converged && std::abs(ce.value - co.value) > 4 * tol) {
        v.kind = LimitVerdict::Oscillates;
        v.limit_even = ce.value;
        v.limit_odd = co.value;
        return v;
    }

    // Certified monotone growth past the threshold.
    std::size_t m = std::min<std::size_t>(6, vals.size());
    bool inc = true, dec = true;
    for (std::size_t i = vals.size() - m + 1; i < vals.size(); ++i) {
        inc = inc && vals[i] >= vals[i - 1];
        dec = dec && vals[i] <= vals[i - 1];
    }
    if (inc && vals.back() > divergence_threshold) {
        v.kind = LimitVerdict::Diverges;
        v.direction = 1;
        return v;
    }
    if (dec && vals.back() < -divergence_threshold) {
        v.kind = LimitVerdict::Diverges;
        v.direction = -1;
        return v;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Trace collection

namespace {

ProbeTrace trace_integrals(const MeasureSequence& seq, const TestFunction& f,
                           const std::string& id) {
    ProbeTrace t;
    t.id = id;
    for (i64 n : seq.grid) {
        ProbePoint p;
        p.n = n;
        try {
            auto r = integrate(f, seq.at(n));
            if (r.is_value()) {
                p.value = r.value.value();
            } else {
                p.divergent = true;
                p.direction = r.direction;
                p.value = r.partial_sum;
            }
        } catch (const DivergenceSignal& d) {
            p.divergent = true;
            p.direction = d.direction;
            p.value = d.partial_sum;
        }
        t.points.push_back(p);
    }
    return t;
}

ProbeTrace trace_masses(const MeasureSequence& seq, const BorelSet& A,
                        const std::string& id) {
    ProbeTrace t;
    t.id = id;
    for (i64 n : seq.grid) {
        ProbePoint p;
        p.n = n;
        try {
            p.value = seq.at(n).mass(A).value();
        } catch (const DivergenceSignal& d) {
            p.divergent = true;
            p.direction = d.direction;
            p.value = d.partial_sum;
        }
        t.points.push_back(p);
    }
    return t;
}

std::optional<double> limit_integral(const MeasureSequence& seq, const TestFunction& f) {
    try {
        auto r = integrate(f, seq.limit_measure());
        if (r.is_value()) return r.value.value();
        return std::nullopt;
    } catch (const DivergenceSignal&) {
        return std::nullopt;
    }
}

// Tail estimates for one-sided conditions: running extremes of the last
// window, which is the one-sided analogue of the convergence window.
double tail_max(const ProbeTrace& t, std::size_t k = 4) {
    auto num = t.numeric();
    double m = -std::numeric_limits<double>::infinity();
    std::size_t from = num.size() > k ? num.size() - k : 0;
    for (std::size_t i = from; i < num.size(); ++i) m = std::max(m, num[i].second);
    return m;
}
double tail_min(const ProbeTrace& t, std::size_t k = 4) {
    auto num = t.numeric();
    double m = std::numeric_limits<double>::infinity();
    std::size_t from = num.size() > k ? num.size() - k : 0;
    for (std::size_t i = from; i < num.size(); ++i) m = std::min(m, num[i].second);
    return m;
}

// Whether a numeric trace converges to the target: pass on a stable match,
// fail on a certified mismatch (wrong limit, oscillation, divergence, or the
// whole tail window staying more than 4 tol away), inconclusive otherwise.
Verdict fit_to_target(const ProbeTrace& t, double target, double tol) {
    auto num = t.numeric();
    auto lv = probe_limit(num, tol);
    if (lv.kind == LimitVerdict::Converges)
        return std::abs(lv.value - target) <= tol ? Verdict::Pass : Verdict::Fail;
    if (lv.kind == LimitVerdict::Oscillates || lv.kind == LimitVerdict::Diverges)
        return Verdict::Fail;
    if (num.size() >= 4 &&
        (tail_min(t) > target + 4 * tol || tail_max(t) < target - 4 * tol))
        return Verdict::Fail;
    return Verdict::Inconclusive;
}

void merge_fit(CheckOutcome& out, Verdict fit, const std::string& id) {
    if (fit == Verdict::Pass) return;
    if (fit == Verdict::Fail)
        out.verdict = Verdict::Fail;
    else if (out.verdict == Verdict::Pass)
        out.verdict = Verdict::Inconclusive;
    if (out.witness.empty()) out.witness = id;
}

}  // namespace

CheckOutcome check_F(const MeasureSequence& seq, const std::vector<TestFunction>& family,
                     double tol) {
    if (family.empty()) throw std::invalid_argument("check_F: empty family");
    CheckOutcome out;
    out.verdict = Verdict::Pass;
    int idx = 0;
    for (const auto& f : family) {
        std::string id = "F[" + std::to_string(idx++) + "]:" + f.str();
        ProbeTrace t = trace_integrals(seq, f, id);
        out.traces.push_back(t);
        auto target = limit_integral(seq, f);
        if (t.any_divergent()) {
            out.notes.push_back(id + ": divergent integral along the sequence");
            out.verdict = Verdict::Fail;
            if (out.witness.empty()) out.witness = id;
            continue;
        }
        if (!target) {
            out.notes.push_back(id + ": limit integral divergent");
            out.verdict = Verdict::Fail;
            if (out.witness.empty()) out.witness = id;
            continue;
        }
        merge_fit(out, fit_to_target(t, *target, tol), id);
    }
    return out;
}

CheckOutcome check_S(const MeasureSequence& seq, const std::vector<BorelSet>& sets,
                     double tol) {
    CheckOutcome out;
    out.verdict = Verdict::Pass;
    int idx = 0;
    for (const auto& A : sets) {
        std::string id = "S[" + std::to_string(idx++) + "]:" + A.str();
        ProbeTrace t = trace_masses(seq, A, id);
        out.traces.push_back(t);
        double target;
        try {
            target = seq.limit_measure().mass(A).value();
        } catch (const DivergenceSignal&) {
            out.notes.push_back(id + ": limit mass divergent");
            out.verdict = Verdict::Fail;
            if (out.witness.empty()) out.witness = id;
            continue;
        }
        if (t.any_divergent()) {
            out.notes.push_back(id + ": divergent mass along the sequence");
            out.verdict = Verdict::Fail;
            if (out.witness.empty()) out.witness = id;
            continue;
        }
        merge_fit(out, fit_to_target(t, target, tol), id);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Probe libraries

BorelSet support_hull(const Measure& m) {
    const Space& space = m.space();
    if (space.is_real()) {
        std::vector<Interval> ivs;
        std::vector<Scalar> pts;
        for (const auto& p : m.pieces()) ivs.push_back(p.on);
        for (const auto& a : m.atoms()) pts.push_back(a.at);
        return BorelSet::real(space, RealSet::make(std::move(ivs), std::move(pts)));
    }
    NatSet s = NatSet::empty();
    std::vector<i64> atoms;
    for (const auto& a : m.atoms()) atoms.push_back(a.at.rat().num());
    s = NatSet::finite(std::move(atoms));
    for (const auto& d : m.discrete()) s = NatSet::unite(s, d.support);
    return BorelSet::nat(space, s);
}

namespace {

// Bounded window covering the structure of the sequence at its first index.
Interval probe_window(const MeasureSequence& seq) {
    const Space& space = seq.space;
    Scalar lo(0), hi(1);
    bool have = false;
    auto absorb = [&](const BorelSet& s) {
        if (s.is_empty()) return;
        for (const auto& iv : s.real_set().intervals()) {
            Scalar l = iv.lo.is_finite() ? iv.lo.value() : Scalar(-8);
            Scalar h = iv.hi.is_finite() ? iv.hi.value() : (l + Scalar(8));
            if (!have) {
                lo = l;
                hi = h;
                have = true;
            } else {
                lo = Scalar::min(lo, l);
                hi = Scalar::max(hi, h);
            }
        }
        for (const auto& p : s.real_set().points()) {
            if (!have) {
                lo = p;
                hi = p;
                have = true;
            } else {
                lo = Scalar::min(lo, p);
                hi = Scalar::max(hi, p);
            }
        }
    };
    absorb(support_hull(seq.at(seq.grid.front())));
    if (seq.limit) absorb(support_hull(seq.limit_measure()));
    if (!have) {
        lo = Scalar(0);
        hi = Scalar(1);
    }
    Interval win = Interval::closed(lo - Scalar(1), hi + Scalar(1));
    RealSet clipped = RealSet::intersect(RealSet::of(win), RealSet::of(space.domain()));
    if (clipped.intervals().empty()) return space.domain();
    return clipped.intervals().front();
}

std::vector<BorelSet> bounded_probe_sets(const MeasureSequence& seq, std::uint64_t seed) {
    const Space& space = seq.space;
    std::vector<BorelSet> out;
    const Interval W = probe_window(seq);
    i64 n0 = seq.grid.front();

    // Structural probes: supports, the escaping block at the smallest grid
    // index, and the Hahn pieces of the first difference.
    auto add_bounded = [&](const BorelSet& s) {
        if (!s.is_empty() && is_bounded(space, s)) out.push_back(s);
    };
    auto clip = [&](const BorelSet& s) {
        return BorelSet::real(space, RealSet::intersect(s.real_set(), RealSet::of(W)));
    };
    add_bounded(clip(support_hull(seq.at(n0))));
    if (seq.limit) add_bounded(clip(support_hull(seq.limit_measure())));
    add_bounded(BorelSet::real(
        space, RealSet::intersect(
                   RealSet::of(Interval::closed(Scalar(n0), Scalar(n0 + 1))),
                   RealSet::of(space.domain()))));
    if (seq.limit) {
        try {
            auto h = hahn(SignedMeasure::difference(seq.at(n0), seq.limit_measure()));
            add_bounded(clip(h.positive_set));
            add_bounded(clip(h.negative_set));
        } catch (const DivergenceSignal&) {
            // divergent differences contribute no bounded probes
        }
    }

    // Seeded random canonical sets inside the window.
    std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dull + 1);
    Scalar w0 = W.lo.value(), w1 = W.hi.value();
    Scalar width = w1 - w0;
    for (int t = 0; t < 10; ++t) {
        std::vector<Interval> ivs;
        std::vector<Scalar> pts;
        int k = 1 + static_cast<int>(rng() % 2);
        for (int i = 0; i < k; ++i) {
            i64 a = static_cast<i64>(rng() % 65), b = static_cast<i64>(rng() % 65);
            if (a > b) std::swap(a, b);
            if (a == b) continue;
            ivs.push_back(Interval::make(
                Ext::fin(w0 + width * Scalar::rational(a, 64)),
                Ext::fin(w0 + width * Scalar::rational(b, 64)), rng() % 2, rng() % 2));
        }
        if (rng() % 3 == 0)
            pts.push_back(w0 + width * Scalar::rational(static_cast<i64>(rng() % 65), 64));
        auto s = BorelSet::real(space, RealSet::intersect(
                                           RealSet::make(std::move(ivs), std::move(pts)),
                                           RealSet::of(space.domain())));
        if (!s.is_empty()) out.push_back(s);
    }
    return out;
}

void push_condition(BatteryResult& battery, std::string label, Verdict v,
                    std::string witness, std::string detail = {}) {
    battery.conditions.push_back(
        ConditionVerdict{std::move(label), v, std::move(witness), std::move(detail)});
}

Verdict combine_all(const std::vector<Verdict>& vs) {
    bool inconclusive = false;
    for (Verdict v : vs) {
        if (v == Verdict::Fail) return Verdict::Fail;
        inconclusive = inconclusive || v == Verdict::Inconclusive;
    }
    return inconclusive ? Verdict::Inconclusive : Verdict::Pass;
}

// One-sided set condition: limsup nu_n(A) <= nu(A) (dir = +1) or
// liminf nu_n(B) >= nu(B) (dir = -1), over a probe family.
ConditionVerdict one_sided_condition(const MeasureSequence& seq,
                                     const std::vector<BorelSet>& probes,
                                     const std::string& label, int dir, double tol,
                                     std::vector<ProbeTrace>& traces) {
    ConditionVerdict cv;
    cv.condition = label;
    cv.verdict = Verdict::Pass;
    int idx = 0;
    for (const auto& A : probes) {
        std::string id = label + "[" + std::to_string(idx++) + "]:" + A.str();
        ProbeTrace t = trace_masses(seq, A, id);
        traces.push_back(t);
        if (t.any_divergent() || t.numeric().size() < 6) {
            if (cv.verdict == Verdict::Pass) cv.verdict = Verdict::Inconclusive;
            if (cv.witness.empty()) cv.witness = id;
            continue;
        }
        double target = seq.limit_measure().mass(A).value();
        bool ok = dir > 0 ? tail_max(t) <= target + tol : tail_min(t) >= target - tol;
        if (!ok) {
            cv.verdict = Verdict::Fail;
            cv.witness = id;
        }
    }
    return cv;
}

ConditionVerdict from_check(const CheckOutcome& c, const std::string& label,
                            std::vector<ProbeTrace>& traces) {
    ConditionVerdict cv;
    cv.condition = label;
    cv.verdict = c.verdict;
    cv.witness = c.witness;
    for (const auto& t : c.traces) traces.push_back(t);
    return cv;
}

// Nonnegative compactly supported functions: squares of the seeded tent
// family (piecewise quadratic, same support, bound gamma^2).
std::vector<TestFunction> nonneg_cc_family(const Space& space, std::uint64_t seed,
                                           int count) {
    std::vector<TestFunction> out;
    for (const auto& f : random_family(space, Family::Cc, Scalar(1), seed, count)) {
        std::vector<FnPiece> sq;
        for (const auto& p : f.pieces())
            sq.push_back(FnPiece{p.on, PowerSum::mul(p.expr, p.expr)});
        double lip = f.holder() ? 2 * f.holder()->constant : 0.0;
        out.push_back(TestFunction::from_pieces(space, std::move(sq), Scalar(1), f.tags(),
                                                HolderCert{1.0, lip}));
    }
    return out;
}

}  // namespace

bool continuity_set(const Measure& nu, const BorelSet& A) {
    return nu.mass(boundary(nu.space(), A)).sign() == 0;
}

BatteryResult check_vague_battery(const MeasureSequence& seq, std::uint64_t seed,
                                  double tol) {
    if (seq.space.kind() != SpaceKind::RealLine)
        throw UnsupportedMetricError("check_vague_battery: real-line space kinds only");
    BatteryResult battery;
    const Space& space = seq.space;

    auto probes = bounded_probe_sets(seq, seed);
    std::vector<BorelSet> compact_probes, closed_probes, open_probes;
    for (const auto& A : probes) {
        BorelSet cl = closure(space, A);
        if (is_compact(space, cl)) compact_probes.push_back(cl);
        if (is_bounded(space, cl)) closed_probes.push_back(cl);
        BorelSet in = interior(space, A);
        if (!in.is_empty() && is_bounded(space, in)) open_probes.push_back(in);
    }

    // (I) C_c integral convergence.
    auto fam_cc = random_family(space, Family::Cc, Scalar(1), seed, 12);
    battery.conditions.push_back(
        from_check(check_F(seq, fam_cc, tol), "vague.I", battery.traces));

    // (II) compact limsup / bounded-open liminf.
    {
        auto up = one_sided_condition(seq, compact_probes, "vague.II.compact", +1, tol,
                                      battery.traces);
        auto dn = one_sided_condition(seq, open_probes, "vague.II.open", -1, tol,
                                      battery.traces);
        Verdict v = combine_all({up.verdict, dn.verdict});
        push_condition(battery, "vague.II", v,
                       v == Verdict::Pass ? "" : (up.verdict != Verdict::Pass ? up.witness
                                                                              : dn.witness));
    }

    // (III) closed-bounded limsup / bounded-open liminf.
    {
        auto up = one_sided_condition(seq, closed_probes, "vague.III.closed", +1, tol,
                                      battery.traces);
        auto dn = one_sided_condition(seq, open_probes, "vague.III.open", -1, tol,
                                      battery.traces);
        Verdict v = combine_all({up.verdict, dn.verdict});
        push_condition(battery, "vague.III", v,
                       v == Verdict::Pass ? "" : (up.verdict != Verdict::Pass ? up.witness
                                                                              : dn.witness));
    }

    // (IV) two-sided sandwich nu(A^o) <= liminf <= limsup <= nu(closure A).
    {
        ConditionVerdict cv;
        cv.condition = "vague.IV";
        cv.verdict = Verdict::Pass;
        int idx = 0;
        for (const auto& A : probes) {
            std::string id = "vague.IV[" + std::to_string(idx++) + "]:" + A.str();
            ProbeTrace t = trace_masses(seq, A, id);
            battery.traces.push_back(t);
            if (t.any_divergent() || t.numeric().size() < 6) {
                if (cv.verdict == Verdict::Pass) cv.verdict = Verdict::Inconclusive;
                continue;
            }
            double lo = seq.limit_measure().mass(interior(space, A)).value();
            double hi = seq.limit_measure().mass(closure(space, A)).value();
            if (!(tail_min(t) >= lo - tol && tail_max(t) <= hi + tol)) {
                cv.verdict = Verdict::Fail;
                cv.witness = id;
            }
        }
        battery.conditions.push_back(cv);
    }

    // (V) bounded continuity sets converge exactly.
    {
        std::vector<BorelSet> cont;
        for (const auto& A : probes)
            if (continuity_set(seq.limit_measure(), A)) cont.push_back(A);
        auto c = check_S(seq, cont, tol);
        battery.conditions.push_back(from_check(c, "vague.V", battery.traces));
        if (cont.empty())
            battery.notes.push_back("vague.V: no continuity-set probes generated");
    }

    // (VI) continuous bounded-support functions.
    auto fam_vi = random_family(space, Family::Cc, Scalar(1), seed ^ 0xa5a5, 10);
    battery.conditions.push_back(
        from_check(check_F(seq, fam_vi, tol), "vague.VI", battery.traces));

    // (VII) Holder continuous members of C_c.
    auto fam_vii = random_family(space, Family::Holder, Scalar(1), seed ^ 0x7171, 10);
    battery.conditions.push_back(
        from_check(check_F(seq, fam_vii, tol), "vague.VII", battery.traces));

    // (VIII) uniformly continuous members of C_c.
    auto fam_viii = random_family(space, Family::UniformlyContinuous, Scalar(1),
                                  seed ^ 0x8383, 10);
    battery.conditions.push_back(
        from_check(check_F(seq, fam_viii, tol), "vague.VIII", battery.traces));

    // (IX) bounded-support bounded measurable functions whose discontinuity
    // set is null for the limit: indicators of continuity sets.
    {
        std::vector<TestFunction> fam_ix;
        for (const auto& A : probes)
            if (continuity_set(seq.limit_measure(), A)) fam_ix.push_back(indicator(space, A));
        if (fam_ix.empty()) {
            push_condition(battery, "vague.IX", Verdict::Inconclusive, "",
                           "no null-discontinuity probes");
        } else {
            battery.conditions.push_back(
                from_check(check_F(seq, fam_ix, tol), "vague.IX", battery.traces));
        }
    }

    // (X) nonnegative members of C_c.
    auto fam_x = nonneg_cc_family(space, seed ^ 0x4242, 10);
    battery.conditions.push_back(
        from_check(check_F(seq, fam_x, tol), "vague.X", battery.traces));

    std::vector<Verdict> vs;
    for (const auto& c : battery.conditions) vs.push_back(c.verdict);
    battery.overall = combine_all(vs);
    return battery;
}

// ---------------------------------------------------------------------------
// Setwise battery

namespace {

struct SetwiseProbes {
    std::vector<BorelSet> all;
    std::vector<BorelSet> open;
    std::vector<BorelSet> closed;
};

SetwiseProbes setwise_probes(const MeasureSequence& seq, std::uint64_t seed) {
    const Space& space = seq.space;
    SetwiseProbes p;
    if (space.is_real()) {
        p.all = bounded_probe_sets(seq, seed);
        // Unbounded structural probes: the whole space and upper tails.
        p.all.push_back(BorelSet::whole(space));
        Interval W = probe_window(seq);
        if (!space.domain().hi.is_finite()) {
            Interval tail = Interval::make(Ext::fin(W.hi.value()), Ext::pos_inf(), true,
                                           false);
            p.all.push_back(BorelSet::real(
                space, RealSet::intersect(RealSet::of(tail), RealSet::of(space.domain()))));
        }
        for (const auto& A : p.all) {
            BorelSet in = interior(space, A);
            if (!in.is_empty()) p.open.push_back(in);
            p.closed.push_back(closure(space, A));
        }
        return p;
    }

    // Natural-number spaces: finite structural sets, their cofinite
    // complements, and small residue classes.
    std::vector<i64> atom_positions;
    for (i64 n : {seq.grid.front(), seq.grid[1 % seq.grid.size()]}) {
        Measure m = seq.at(n);
        for (const auto& a : m.atoms()) atom_positions.push_back(a.at.rat().num());
    }
    std::vector<i64> limit_atoms;
    if (seq.limit)
        for (const auto& a : seq.limit_measure().atoms())
            limit_atoms.push_back(a.at.rat().num());

    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 7);
    std::vector<NatSet> finite_probes;
    finite_probes.push_back(NatSet::finite(atom_positions));
    for (int t = 0; t < 8; ++t) {
        std::vector<i64> elems;
        for (i64 j = 1 + static_cast<i64>(rng() % 8); j > 0; --j)
            elems.push_back(1 + static_cast<i64>(rng() % 64));
        finite_probes.push_back(NatSet::finite(std::move(elems)));
    }
    // Residue classes catch structurally aligned escapes (the support of the
    // moving atoms), the whole space, and the empty set.
    std::vector<NatSet> extra{NatSet::residue_class(2, {0}), NatSet::residue_class(2, {1}),
                              NatSet::residue_class(3, {0}), NatSet::all(),
                              NatSet::empty()};

    if (space.kind() == SpaceKind::CofiniteNat) {
        // The open/closed families follow the structure of the limit: proper
        // closed probes avoid the limit atoms (where the construction's
        // set-limits match the limit measure), open probes are their
        // complements.  See the gallery notes on the cofinite example.
        NatSet avoid = NatSet::finite(limit_atoms);
        for (auto& f : finite_probes) {
            NatSet cl = NatSet::subtract(f, avoid);
            p.closed.push_back(BorelSet::nat(space, cl));
            p.open.push_back(BorelSet::nat(space, cl.complement()));
        }
        p.closed.push_back(BorelSet::nat(space, NatSet::all()));
        p.open.push_back(BorelSet::nat(space, NatSet::all()));
        p.open.push_back(BorelSet::nat(space, NatSet::empty()));
        p.closed.push_back(BorelSet::nat(space, NatSet::empty()));
    } else {
        for (auto& f : finite_probes) {
            p.open.push_back(BorelSet::nat(space, f));
            p.closed.push_back(BorelSet::nat(space, f));
            p.open.push_back(BorelSet::nat(space, f.complement()));
            p.closed.push_back(BorelSet::nat(space, f.complement()));
        }
    }
    for (const auto& f : finite_probes) {
        p.all.push_back(BorelSet::nat(space, f));
        p.all.push_back(BorelSet::nat(space, f.complement()));
    }
    for (const auto& e : extra) p.all.push_back(BorelSet::nat(space, e));
    return p;
}

}  // namespace

BatteryResult check_setwise_battery(const MeasureSequence& seq, std::uint64_t seed,
                                    double tol) {
    BatteryResult battery;
    auto probes = setwise_probes(seq, seed);
    auto c1 = check_S(seq, probes.all, tol);
    auto c2 = check_S(seq, probes.open, tol);
    auto c3 = check_S(seq, probes.closed, tol);
    battery.conditions.push_back(from_check(c1, "setwise.I", battery.traces));
    battery.conditions.push_back(from_check(c2, "setwise.II", battery.traces));
    battery.conditions.push_back(from_check(c3, "setwise.III", battery.traces));
    for (const auto& n : c1.notes) battery.notes.push_back(n);
    battery.overall = c1.verdict;
    if (seq.space.has_metric() &&
        (c1.verdict != c2.verdict || c2.verdict != c3.verdict))
        battery.notes.push_back(
            "setwise: the three conditions disagree on a metric space kind");
    return battery;
}

CheckOutcome check_tv(const MeasureSequence& seq, double tol) {
    CheckOutcome out;
    ProbeTrace t;
    t.id = "tv:sup_sets";
    for (i64 n : seq.grid) {
        ProbePoint p;
        p.n = n;
        try {
            p.value = sup_sets(seq.at(n), seq.limit_measure()).value();
        } catch (const DivergenceSignal& d) {
            p.divergent = true;
            p.direction = d.direction;
            p.value = d.partial_sum;
        }
        t.points.push_back(p);
    }
    out.traces.push_back(t);
    if (t.any_divergent()) {
        out.verdict = Verdict::Fail;
        out.witness = t.id;
        out.notes.push_back("tv: sup_sets divergent along the sequence");
        return out;
    }
    out.verdict = fit_to_target(t, 0.0, tol);
    if (out.verdict != Verdict::Pass) out.witness = t.id;
    return out;
}

CheckOutcome check_truncation_blowup(const MeasureSequence& seq, const TestFunction& f,
                                     const std::vector<double>& thresholds) {
    // Precondition: the limit integral must diverge.
    auto r = integrate(f, seq.limit_measure());
    if (r.is_value())
        throw std::invalid_argument(
            "check_truncation_blowup: limit integral is finite");
    CheckOutcome out;
    out.verdict = Verdict::Pass;
    for (double M : thresholds) {
        bool found = false;
        for (i64 je = 1; je <= 16 && !found; ++je) {
            Scalar k = Scalar(i64(1) << (2 * je));  // 4^je
            ProbeTrace t;
            t.id = "blowup:M=" + std::to_string(M) + ":k=" + k.str();
            TestFunction fk = truncate(f, k);
            bool all_above_tail = true;
            int tail_count = 0;
            for (i64 n : seq.grid) {
                ProbePoint p;
                p.n = n;
                p.value = integrate(fk, seq.at(n)).value.value();
                t.points.push_back(p);
            }
            // Require the last third of the grid to clear the threshold.
            std::size_t from = t.points.size() - std::max<std::size_t>(1, t.points.size() / 3);
            for (std::size_t i = from; i < t.points.size(); ++i) {
                ++tail_count;
                all_above_tail = all_above_tail && t.points[i].value > M;
            }
            out.traces.push_back(t);
            found = all_above_tail && tail_count > 0;
        }
        if (!found) {
            out.verdict = Verdict::Fail;
            out.witness = "blowup:M=" + std::to_string(M);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// diagnose

ConvergenceReport diagnose(const MeasureSequence& seq_in, const DiagnoseOptions& opts) {
    MeasureSequence seq = seq_in;
    if (!opts.grid.empty()) seq.grid = opts.grid;
    if (seq.grid.empty()) seq.grid = MeasureSequence::default_grid();

    ConvergenceReport rep;
    rep.sequence_name = seq.name;
    rep.grid = seq.grid;
    rep.seed = opts.seed;
    rep.tol = opts.tol;
    rep.caveat =
        "finite-grid evidence: pass means no violation detected and the "
        "extrapolation is stable, not a proof";

    const Space& space = seq.space;

    if (opts.vague) {
        if (space.kind() == SpaceKind::RealLine) {
            auto battery = check_vague_battery(seq, opts.seed, opts.tol);
            rep.modes.vague = battery.overall;
            for (auto& c : battery.conditions) rep.conditions.push_back(std::move(c));
            for (auto& t : battery.traces) rep.traces.push_back(std::move(t));
            for (auto& n : battery.notes) rep.warnings.push_back(std::move(n));
        } else {
            auto fam = random_family(space, Family::Cc, Scalar(1), opts.seed, 12);
            auto c = check_F(seq, fam, opts.tol);
            rep.modes.vague = c.verdict;
            rep.conditions.push_back(
                ConditionVerdict{"vague.I", c.verdict, c.witness, "C_c family"});
            for (auto& t : c.traces) rep.traces.push_back(std::move(t));
            for (auto& n : c.notes) rep.warnings.push_back(std::move(n));
        }
    }
    if (opts.weak) {
        std::vector<TestFunction> fam{TestFunction::constant(space, Scalar(1))};
        for (auto& f : random_family(space, Family::Cb, Scalar(1), opts.seed ^ 0x1111, 10))
            fam.push_back(std::move(f));
        auto c = check_F(seq, fam, opts.tol);
        rep.modes.weak = c.verdict;
        rep.conditions.push_back(
            ConditionVerdict{"weak.Cb", c.verdict, c.witness, "C_b family incl. 1"});
        for (auto& t : c.traces) rep.traces.push_back(std::move(t));
        for (auto& n : c.notes) rep.warnings.push_back(std::move(n));
    }
    if (opts.setwise) {
        auto battery = check_setwise_battery(seq, opts.seed, opts.tol);
        rep.modes.setwise = battery.overall;
        for (auto& c : battery.conditions) rep.conditions.push_back(std::move(c));
        for (auto& t : battery.traces) rep.traces.push_back(std::move(t));
        for (auto& n : battery.notes) rep.warnings.push_back(std::move(n));
    }
    if (opts.tv) {
        auto c = check_tv(seq, opts.tol);
        rep.modes.tv = c.verdict;
        rep.conditions.push_back(ConditionVerdict{"tv.sup_sets", c.verdict, c.witness, ""});
        for (auto& t : c.traces) rep.traces.push_back(std::move(t));
        for (auto& n : c.notes) rep.warnings.push_back(std::move(n));
    }

    // The pass-ordering of the four modes (tv => setwise => weak => vague)
    // should never be violated; a violation points at probe-library gaps.
    auto passed = [](Verdict v) { return v == Verdict::Pass; };
    if ((passed(rep.modes.tv) && rep.modes.setwise == Verdict::Fail) ||
        (passed(rep.modes.setwise) && rep.modes.weak == Verdict::Fail) ||
        (passed(rep.modes.weak) && rep.modes.vague == Verdict::Fail))
        rep.warnings.push_back("mode hierarchy violated: check probe libraries");
    return rep;
}

}  // namespace mmodes
