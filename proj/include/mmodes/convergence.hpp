#pragma once

#include <functional>
#include <optional>

#include "mmodes/distance.hpp"

namespace mmodes {

/// Parametric sequence of measures with its declared candidate limit and the
/// grid of indices the diagnostics evaluate.
struct MeasureSequence {
    Space space = Space::discrete_nat();
    std::function<Measure(i64)> rule;
    std::optional<Measure> limit;
    std::vector<i64> grid = default_grid();
    std::string name;

    /// {2, 4, 8, ..., 2^14}
    static std::vector<i64> default_grid();
    /// {2^k, 2^k + 1 : k = 1..13}, mixed parity for oscillation probes.
    static std::vector<i64> parity_grid();

    Measure at(i64 n) const { return rule(n); }
    const Measure& limit_measure() const;
};

enum class Verdict { Pass, Fail, Inconclusive };
std::string verdict_name(Verdict v);

/// Numeric realization of "lim n -> inf" over a finite trace.
struct LimitVerdict {
    enum Kind { Converges, Diverges, Oscillates, Inconclusive } kind = Inconclusive;
    double value = 0.0;       // Converges: extrapolated limit
    int direction = 0;        // Diverges
    double limit_even = 0.0;  // Oscillates: even-index subsequence limit
    double limit_odd = 0.0;   // Oscillates: odd-index subsequence limit
    double tolerance = 0.0;
};

/// Converges when the last four values agree within tol and match the
/// extrapolated limit; oscillates when the index-parity subsequences settle
/// at limits more than 4 tol apart; diverges on certified monotone growth
/// past the threshold.  Fewer than six points is inconclusive.
LimitVerdict probe_limit(const std::vector<std::pair<i64, double>>& trace,
                         double tol = 1e-6, double divergence_threshold = 1e6);

struct ProbePoint {
    i64 n;
    double value = 0.0;
    bool divergent = false;
    int direction = 0;
};

struct ProbeTrace {
    std::string id;
    std::vector<ProbePoint> points;
    std::vector<std::pair<i64, double>> numeric() const;
    bool any_divergent() const;
};

struct CheckOutcome {
    Verdict verdict = Verdict::Inconclusive;
    std::string witness;  // failing probe id, empty on pass
    std::vector<ProbeTrace> traces;
    std::vector<std::string> notes;
};

/// F-convergence: integral traces against every family member must converge
/// to the limit integral.  Divergent integrals are recorded per function and
/// fail the check.
CheckOutcome check_F(const MeasureSequence& seq, const std::vector<TestFunction>& family,
                     double tol = 1e-6);

/// S-convergence: set-mass traces against every probe set.
CheckOutcome check_S(const MeasureSequence& seq, const std::vector<BorelSet>& sets,
                     double tol = 1e-6);

struct ConditionVerdict {
    std::string condition;  // battery key, e.g. "vague.IV"
    Verdict verdict = Verdict::Inconclusive;
    std::string witness;
    std::string detail;
};

struct BatteryResult {
    std::vector<ConditionVerdict> conditions;
    Verdict overall = Verdict::Inconclusive;
    std::vector<ProbeTrace> traces;
    std::vector<std::string> notes;
};

/// The ten equivalent vague-convergence conditions, probed independently on
/// seeded function families and structurally generated bounded sets.
/// Real-line space kinds only (the battery leans on Heine-Borel compactness).
BatteryResult check_vague_battery(const MeasureSequence& seq, std::uint64_t seed,
                                  double tol = 1e-6);

/// The three setwise conditions: (I) all canonical probe sets, (II) open
/// probes, (III) closed probes.  On metric kinds the three agree; on the
/// cofinite space the closed/open families follow the structure of the
/// sequence (see the gallery notes) and (I) may fail while (II)/(III) pass.
BatteryResult check_setwise_battery(const MeasureSequence& seq, std::uint64_t seed,
                                    double tol = 1e-6);

/// TV convergence: sup_sets(nu_n, limit) must converge to 0.
CheckOutcome check_tv(const MeasureSequence& seq, double tol = 1e-6);

/// nu(boundary(A)) == 0, exactly.
bool continuity_set(const Measure& nu, const BorelSet& A);

/// Escalating truncation levels push the integrals past every threshold when
/// the limit integral diverges (requires a setwise-convergent sequence and a
/// nonnegative f with divergent limit integral).
CheckOutcome check_truncation_blowup(const MeasureSequence& seq, const TestFunction& f,
                                     const std::vector<double>& thresholds = {10, 100,
                                                                              1000});

struct ModeVerdicts {
    Verdict vague = Verdict::Inconclusive;
    Verdict weak = Verdict::Inconclusive;
    Verdict setwise = Verdict::Inconclusive;
    Verdict tv = Verdict::Inconclusive;
};

struct DiagnoseOptions {
    std::uint64_t seed = 42;
    double tol = 1e-6;
    std::vector<i64> grid;  // empty: use the sequence's grid
    bool vague = true, weak = true, setwise = true, tv = true;
};

struct ConvergenceReport {
    std::string sequence_name;
    std::vector<i64> grid;
    std::uint64_t seed = 0;
    double tol = 0.0;
    ModeVerdicts modes;
    std::vector<ConditionVerdict> conditions;
    std::vector<ProbeTrace> traces;
    std::vector<std::string> warnings;
    // Finite grids cannot prove limits; a pass records that no violation was
    // detected and the extrapolation is stable.
    std::string caveat;
};

ConvergenceReport diagnose(const MeasureSequence& seq, const DiagnoseOptions& opts = {});

/// Union of the measure's atoms, density piece intervals, and discrete
/// supports, as a Borel set (probe generation).
BorelSet support_hull(const Measure& m);

}  // namespace mmodes
