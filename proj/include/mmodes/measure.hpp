#pragma once

#include <optional>
#include <vector>

#include "mmodes/density.hpp"

namespace mmodes {

struct Atom {
    Scalar at;
    Scalar mass;
};

struct DensityPiece {
    Interval on;
    PowerSum density;
};

/// Symbolic Borel measure: weighted Dirac atoms, closed-form density pieces
/// on the real line, and analytic weight rules on the naturals.  All
/// components must be nonnegative and live inside the space domain.  The
/// measure is finite unless a discrete tail diverges (the counting-measure
/// family), in which case set masses over infinite sets raise
/// DivergenceSignal.
class Measure {
public:
    Measure(Space space, std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
            std::vector<DiscreteComp> discrete = {});

    static Measure zero(const Space& space) { return Measure(space, {}, {}, {}); }
    static Measure dirac(const Space& space, const Scalar& at, const Scalar& mass = Scalar(1));
    /// Lebesgue measure restricted to an interval, optionally scaled.
    static Measure lebesgue(const Space& space, const Interval& on,
                            const Scalar& scale = Scalar(1));
    /// density * dx on an interval.
    static Measure with_density(const Space& space, const Interval& on,
                                const PowerSum& density);
    static Measure counting(const Space& space, const NatSet& support);

    const Space& space() const { return space_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<DensityPiece>& pieces() const { return pieces_; }
    const std::vector<DiscreteComp>& discrete() const { return discrete_; }

    /// nu(A), exact on the rational path.  Throws DivergenceSignal when a
    /// divergent discrete tail meets an infinite set.
    Scalar mass(const BorelSet& A) const;
    Scalar total_mass() const;
    bool is_probability() const;
    /// Finite total mass (every discrete tail summable).
    bool is_finite() const;

    Measure restrict(const BorelSet& A) const;
    Measure scaled(const Scalar& c) const;  // c >= 0
    static Measure add(const Measure& a, const Measure& b);

private:
    Space space_;
    std::vector<Atom> atoms_;
    std::vector<DensityPiece> pieces_;
    std::vector<DiscreteComp> discrete_;
};

/// Density piece of a signed measure; sign-definite on its interval with the
/// sign recorded (Hahn decompositions read it directly).
struct SignedPiece {
    Interval on;
    PowerSum density;
    int sign;  // -1, 0, +1 on the open interval
};

/// Difference of two measures, normalized so that every density piece is
/// sign-definite (pieces are split at the sign-change roots when built via
/// difference()).  Atom masses and discrete coefficients may carry either
/// sign.
class SignedMeasure {
public:
    SignedMeasure(Space space, std::vector<Atom> atoms, std::vector<SignedPiece> pieces,
                  std::vector<DiscreteComp> discrete = {});

    static SignedMeasure difference(const Measure& mu, const Measure& nu);

    const Space& space() const { return space_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<SignedPiece>& pieces() const { return pieces_; }
    const std::vector<DiscreteComp>& discrete() const { return discrete_; }

    Scalar mass(const BorelSet& A) const;
    Scalar total_mass() const;

private:
    Space space_;
    std::vector<Atom> atoms_;
    std::vector<SignedPiece> pieces_;
    std::vector<DiscreteComp> discrete_;
};

/// Integral of a density over the interval components of a real Borel set
/// (isolated points are null for densities).
IntegOutcome density_mass_over(const PowerSum& density, const Interval& piece,
                               const RealSet& set);

}  // namespace mmodes
