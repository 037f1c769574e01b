#pragma once

#include "mmodes/convergence.hpp"

namespace mmodes {

enum class Provenance { Paper, Trivial, Derived };
std::string provenance_name(Provenance p);

/// One machine-checkable expectation: a probe the runner knows how to
/// evaluate, its expected value or verdict, and where the value comes from.
/// Stated source values that disagree with the independent computation are
/// flagged expect_discrepancy: the runner reports them as paper-discrepancy
/// rather than failure, and the matching derived expectation is asserted.
struct Expectation {
    std::string probe;
    std::string expected;
    Provenance provenance = Provenance::Derived;
    std::string note;
    bool expect_discrepancy = false;
};

struct GalleryCase {
    std::string id;
    Space space = Space::discrete_nat();
    std::optional<MeasureSequence> sequence;
    std::optional<std::pair<Measure, Measure>> pair;
    std::vector<Expectation> expectations;
    std::string discrepancy_note;
    double tol = 1e-6;  // probe tolerance for this case
};

std::vector<std::string> gallery_ids();
GalleryCase gallery_case(const std::string& id);  // throws on unknown id

struct ExpectationResult {
    Expectation expectation;
    enum Status { Pass, Fail, PaperDiscrepancy, Inconclusive } status = Inconclusive;
    std::string observed;
};
std::string status_name(ExpectationResult::Status s);

struct CaseResult {
    std::string id;
    std::vector<ExpectationResult> results;
    std::string discrepancy_note;
};

struct GallerySummary {
    std::vector<CaseResult> cases;
    int passed = 0;
    int failed = 0;
    int discrepancies = 0;
    int inconclusive = 0;
};

CaseResult run_case(const GalleryCase& c, std::uint64_t seed,
                    const std::vector<i64>& grid_override = {});

/// Deterministic summary over every case; grid_override truncates or replaces
/// each case's grid (short grids surface as inconclusive verdicts).
GallerySummary run_all(std::uint64_t seed, const std::vector<i64>& grid_override = {});

}  // namespace mmodes
