#pragma once

#include <string>

#include "mmodes/integrate.hpp"

namespace mmodes {

/// Partition of the space into a positive and a negative set for a signed
/// measure, with the exact masses of the two parts.
struct HahnDecomposition {
    BorelSet positive_set;
    BorelSet negative_set;
    Scalar positive_mass;  // d(positive_set) >= 0
    Scalar negative_mass;  // -d(negative_set) >= 0
};

HahnDecomposition hahn(const SignedMeasure& d);

/// sup_A |mu(A) - nu(A)| = max of the two Hahn masses; exact.
Scalar sup_sets(const Measure& mu, const Measure& nu);

enum class SupClass {
    ClosedBoundedSets,
    OpenBoundedSets,
    CompactSets,
    Mgamma,
    MgammaBoundedSupport,
    ContinuousBoundedSupportGamma,
    UniformlyContinuous,
    HolderBounded,
};
std::string sup_class_name(SupClass c);

struct EpsGap {
    double eps;
    double best;  // best candidate value at this dilation
    double gap;   // hahn bound minus best (the attainability deficit)
};

/// Result of one structured class-restricted search.  The search optimum must
/// meet the Hahn bound within 1e-6; the per-dilation gaps record how the
/// class approaches it.
struct ClassEstimate {
    SupClass cls = SupClass::ClosedBoundedSets;
    double gamma = 1.0;
    Scalar value;        // search optimum (exact when an exact candidate wins)
    Scalar hahn_bound;   // gamma * max(positive_mass, negative_mass)
    double gap = 0.0;    // hahn_bound - value
    bool attained = false;
    std::string witness;  // set literal / function summary when attained
    std::vector<EpsGap> eps_trace;
};

ClassEstimate sup_estimate(const Measure& mu, const Measure& nu, SupClass cls,
                           const Scalar& gamma = Scalar(1));

/// Whether sup_sets is attained by a candidate of each regularity class in
/// the structured search, with witnesses and the per-dilation gap traces for
/// the open and closed searches.
struct Attainability {
    bool by_borel = false;
    bool by_open = false;
    bool by_closed = false;
    bool by_continuous = false;
    std::string witness_borel;
    std::string witness_open;
    std::string witness_closed;
    std::vector<EpsGap> open_gaps;
    std::vector<EpsGap> closed_gaps;
};

Attainability attainability(const Measure& mu, const Measure& nu);

/// The convention ledger: the three total-variation style quantities are
/// always reported side by side (the factor-of-two convention differs across
/// sources), plus the class estimates and the attainability record.
struct TVReport {
    Scalar jordan_norm;  // |mu - nu|(X) = positive_mass + negative_mass
    Scalar sup_sets;     // sup_A |mu(A) - nu(A)|
    Scalar paper_tv;     // 2 * sup_sets
    HahnDecomposition decomposition;
    std::vector<ClassEstimate> estimates;  // metric space kinds only
    Attainability attain;
};

TVReport tv(const Measure& mu, const Measure& nu);

}  // namespace mmodes
