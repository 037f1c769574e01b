#include "mmodes/measure.hpp"

#include <algorithm>

namespace mmodes {

namespace {

void require_real(const Space& s, const char* what) {
    if (!s.is_real()) throw SpaceMismatchError(std::string(what) + ": needs a real-line space");
}

void validate_components(const Space& space, const std::vector<Atom>& atoms,
                         const std::vector<DensityPiece>& pieces,
                         const std::vector<DiscreteComp>& discrete, bool require_nonneg) {
    for (const auto& a : atoms) {
        if (require_nonneg && a.mass.sign() <= 0)
            throw std::invalid_argument("Measure: atom mass must be > 0");
        if (space.is_real()) {
            if (!space.domain().contains(a.at))
                throw DomainError("Measure: atom outside the space domain");
        } else if (!a.at.is_exact() || !a.at.rat().is_integer() || a.at.rat().num() < 1) {
            throw DomainError("Measure: atom position must be a natural number");
        }
    }
    for (const auto& p : pieces) {
        require_real(space, "Measure density piece");
        if (p.on.is_empty()) throw std::invalid_argument("Measure: empty density piece");
        RealSet on = RealSet::of(p.on);
        if (!RealSet::subtract(on, RealSet::of(space.domain())).is_empty())
            throw DomainError("Measure: density piece outside the space domain");
        if (require_nonneg) {
            auto sp = sign_partition(p.density, p.on);
            for (int s : sp.signs)
                if (s < 0)
                    throw std::invalid_argument(
                        "Measure: density must be nonnegative on its piece");
        }
    }
    for (const auto& d : discrete) {
        if (space.is_real())
            throw SpaceMismatchError("Measure: discrete component on a real space");
        if (require_nonneg && d.term.c.sign() < 0)
            throw std::invalid_argument("Measure: discrete weights must be nonnegative");
        if (d.term.r.sign() <= 0 || d.term.r > Scalar(1))
            throw std::invalid_argument("Measure: discrete ratio must lie in (0,1]");
    }
}

Scalar atoms_mass(const std::vector<Atom>& atoms, const BorelSet& A) {
    Scalar acc(0);
    for (const auto& a : atoms)
        if (A.contains(a.at)) acc += a.mass;
    return acc;
}

}  // namespace

IntegOutcome density_mass_over(const PowerSum& density, const Interval& piece,
                               const RealSet& set) {
    RealSet clipped = RealSet::intersect(RealSet::of(piece), set);
    Scalar value(0);
    double eb = 0;
    for (const auto& iv : clipped.intervals()) {
        auto part = integrate_powersum(density, iv.lo, iv.hi);
        if (!part.is_finite()) return part;
        value += part.value;
        eb += part.error_bound;
    }
    return IntegOutcome::finite(value, eb);
}

Measure::Measure(Space space, std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                 std::vector<DiscreteComp> discrete)
    : space_(std::move(space)),
      atoms_(std::move(atoms)),
      pieces_(std::move(pieces)),
      discrete_(std::move(discrete)) {
    validate_components(space_, atoms_, pieces_, discrete_, /*require_nonneg=*/true);
}

Measure Measure::dirac(const Space& space, const Scalar& at, const Scalar& mass) {
    return Measure(space, {Atom{at, mass}}, {}, {});
}

Measure Measure::lebesgue(const Space& space, const Interval& on, const Scalar& scale) {
    require_real(space, "lebesgue");
    return Measure(space, {}, {DensityPiece{on, PowerSum::constant(scale)}}, {});
}

Measure Measure::with_density(const Space& space, const Interval& on,
                              const PowerSum& density) {
    require_real(space, "with_density");
    return Measure(space, {}, {DensityPiece{on, density}}, {});
}

Measure Measure::counting(const Space& space, const NatSet& support) {
    if (space.is_real()) throw SpaceMismatchError("counting: needs a nat space");
    return Measure(space, {}, {}, {DiscreteComp{DiscreteTerm{Scalar(1), Rat(0), Scalar(1)}, support}});
}

Scalar Measure::mass(const BorelSet& A) const {
    if (A.kind() != space_.kind()) throw SpaceMismatchError("mass: set from another space");
    Scalar acc = atoms_mass(atoms_, A);
    if (space_.is_real()) {
        for (const auto& p : pieces_) {
            auto out = density_mass_over(p.density, p.on, A.real_set());
            if (!out.is_finite())
                throw DivergenceSignal(out.direction(), acc.value());
            acc += out.value;
        }
        return acc;
    }
    auto s = sum_discrete_signed(discrete_, A.nat_set());
    return acc + s.value;
}

Scalar Measure::total_mass() const { return mass(BorelSet::whole(space_)); }

bool Measure::is_probability() const {
    Scalar t = total_mass();
    if (t.is_exact()) return t.rat() == Rat(1);
    return std::abs(t.value() - 1.0) <= 1e-12;
}

bool Measure::is_finite() const {
    for (const auto& d : discrete_)
        if (!d.support.is_finite() && !d.term.tail_summable()) return false;
    return true;
}

Measure Measure::restrict(const BorelSet& A) const {
    if (A.kind() != space_.kind()) throw SpaceMismatchError("restrict: set from another space");
    std::vector<Atom> atoms;
    for (const auto& a : atoms_)
        if (A.contains(a.at)) atoms.push_back(a);
    std::vector<DensityPiece> pieces;
    std::vector<DiscreteComp> discrete;
    if (space_.is_real()) {
        for (const auto& p : pieces_) {
            RealSet clipped = RealSet::intersect(RealSet::of(p.on), A.real_set());
            for (const auto& iv : clipped.intervals())
                pieces.push_back(DensityPiece{iv, p.density});
        }
    } else {
        for (const auto& d : discrete_) {
            NatSet s = NatSet::intersect(d.support, A.nat_set());
            if (!s.is_empty()) discrete.push_back(DiscreteComp{d.term, s});
        }
    }
    return Measure(space_, std::move(atoms), std::move(pieces), std::move(discrete));
}

Measure Measure::scaled(const Scalar& c) const {
    if (c.sign() < 0) throw std::invalid_argument("Measure::scaled: c must be >= 0");
    if (c.is_zero()) return zero(space_);
    std::vector<Atom> atoms = atoms_;
    for (auto& a : atoms) a.mass = a.mass * c;
    std::vector<DensityPiece> pieces = pieces_;
    for (auto& p : pieces) p.density = p.density.scaled(c);
    std::vector<DiscreteComp> discrete = discrete_;
    for (auto& d : discrete) d.term.c = d.term.c * c;
    return Measure(space_, std::move(atoms), std::move(pieces), std::move(discrete));
}

Measure Measure::add(const Measure& a, const Measure& b) {
    if (a.space_ != b.space_) throw SpaceMismatchError("Measure::add: different spaces");
    std::vector<Atom> atoms = a.atoms_;
    atoms.insert(atoms.end(), b.atoms_.begin(), b.atoms_.end());
    std::vector<DensityPiece> pieces = a.pieces_;
    pieces.insert(pieces.end(), b.pieces_.begin(), b.pieces_.end());
    std::vector<DiscreteComp> discrete = a.discrete_;
    discrete.insert(discrete.end(), b.discrete_.begin(), b.discrete_.end());
    return Measure(a.space_, std::move(atoms), std::move(pieces), std::move(discrete));
}

// ---------------------------------------------------------------------------
// SignedMeasure

SignedMeasure::SignedMeasure(Space space, std::vector<Atom> atoms,
                             std::vector<SignedPiece> pieces,
                             std::vector<DiscreteComp> discrete)
    : space_(std::move(space)),
      atoms_(std::move(atoms)),
      pieces_(std::move(pieces)),
      discrete_(std::move(discrete)) {
    std::vector<DensityPiece> plain;
    plain.reserve(pieces_.size());
    for (const auto& p : pieces_) plain.push_back(DensityPiece{p.on, p.density});
    validate_components(space_, atoms_, plain, discrete_, /*require_nonneg=*/false);
}

SignedMeasure SignedMeasure::difference(const Measure& mu, const Measure& nu) {
    if (mu.space() != nu.space())
        throw SpaceMismatchError("difference: measures on different spaces");
    const Space& space = mu.space();

    // Atoms: net mass per position, zero atoms dropped.
    std::vector<Atom> atoms;
    for (const auto& a : mu.atoms()) atoms.push_back(a);
    for (const auto& a : nu.atoms()) atoms.push_back(Atom{a.at, -a.mass});
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& x, const Atom& y) { return x.at < y.at; });
    std::vector<Atom> net;
    for (const auto& a : atoms) {
        if (!net.empty() && net.back().at == a.at)
            net.back().mass += a.mass;
        else
            net.push_back(a);
    }
    net.erase(std::remove_if(net.begin(), net.end(),
                             [](const Atom& a) { return a.mass.is_zero(); }),
              net.end());

    std::vector<SignedPiece> pieces;
    if (space.is_real()) {
        // Subdivide the union of piece intervals at every boundary, form the
        // net density on each cell, then split the cells at sign changes.
        std::vector<Scalar> bps;
        auto collect = [&](const std::vector<DensityPiece>& ps) {
            for (const auto& p : ps) {
                if (p.on.lo.is_finite()) bps.push_back(p.on.lo.value());
                if (p.on.hi.is_finite()) bps.push_back(p.on.hi.value());
            }
        };
        collect(mu.pieces());
        collect(nu.pieces());
        std::sort(bps.begin(), bps.end());
        bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

        bool lo_unbounded = false, hi_unbounded = false;
        for (const auto& p : mu.pieces()) {
            lo_unbounded = lo_unbounded || !p.on.lo.is_finite();
            hi_unbounded = hi_unbounded || !p.on.hi.is_finite();
        }
        for (const auto& p : nu.pieces()) {
            lo_unbounded = lo_unbounded || !p.on.lo.is_finite();
            hi_unbounded = hi_unbounded || !p.on.hi.is_finite();
        }

        std::vector<std::pair<Ext, Ext>> cells;
        if (bps.empty()) {
            if (lo_unbounded || hi_unbounded)
                cells.emplace_back(Ext::neg_inf(), Ext::pos_inf());
        } else {
            if (lo_unbounded) cells.emplace_back(Ext::neg_inf(), Ext::fin(bps.front()));
            for (std::size_t i = 0; i + 1 < bps.size(); ++i)
                cells.emplace_back(Ext::fin(bps[i]), Ext::fin(bps[i + 1]));
            if (hi_unbounded) cells.emplace_back(Ext::fin(bps.back()), Ext::pos_inf());
        }

        for (const auto& [lo, hi] : cells) {
            Interval cell = Interval::make(lo, hi, false, false);
            if (cell.is_empty()) continue;
            PowerSum dens;
            auto overlap = [&](const DensityPiece& p) {
                // Cell interiors never straddle piece boundaries.
                Scalar mid = lo.is_finite() && hi.is_finite()
                                 ? (lo.value() + hi.value()) / Scalar(2)
                             : lo.is_finite() ? lo.value() + Scalar(1)
                             : hi.is_finite() ? hi.value() - Scalar(1)
                                              : Scalar(0);
                return p.on.contains(mid);
            };
            for (const auto& p : mu.pieces())
                if (overlap(p)) dens = PowerSum::add(dens, p.density);
            for (const auto& p : nu.pieces())
                if (overlap(p)) dens = PowerSum::sub(dens, p.density);
            if (dens.is_zero()) continue;
            auto sp = sign_partition(dens, cell);
            Ext prev = lo;
            for (std::size_t i = 0; i <= sp.cuts.size(); ++i) {
                Ext next = i < sp.cuts.size() ? Ext::fin(sp.cuts[i]) : hi;
                Interval sub = Interval::make(prev, next, false, false);
                if (!sub.is_empty() && sp.signs[i] != 0)
                    pieces.push_back(SignedPiece{sub, dens, sp.signs[i]});
                prev = next;
            }
        }
    }

    std::vector<DiscreteComp> discrete = mu.discrete();
    for (const auto& d : nu.discrete()) {
        DiscreteComp neg = d;
        neg.term.c = -neg.term.c;
        discrete.push_back(neg);
    }

    return SignedMeasure(space, std::move(net), std::move(pieces), std::move(discrete));
}

Scalar SignedMeasure::mass(const BorelSet& A) const {
    if (A.kind() != space_.kind()) throw SpaceMismatchError("mass: set from another space");
    Scalar acc = atoms_mass(atoms_, A);
    if (space_.is_real()) {
        for (const auto& p : pieces_) {
            auto out = density_mass_over(p.density, p.on, A.real_set());
            if (!out.is_finite()) throw DivergenceSignal(out.direction(), acc.value());
            acc += out.value;
        }
        return acc;
    }
    auto s = sum_discrete_signed(discrete_, A.nat_set());
    return acc + s.value;
}

Scalar SignedMeasure::total_mass() const { return mass(BorelSet::whole(space_)); }

}  // namespace mmodes
