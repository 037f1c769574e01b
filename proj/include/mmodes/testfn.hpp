#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mmodes/measure.hpp"

namespace mmodes {

struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedClassError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Tag {
    Continuous,
    UniformlyContinuous,
    Holder,
    BoundedMeasurable,
    VanishesAtInfinity,
    CompactSupport,
    BoundedSupport,
};

struct HolderCert {
    double alpha;
    double constant;
};

struct FnPiece {
    Interval on;
    PowerSum expr;
};

/// Piecewise closed-form test function with machine-checkable regularity
/// metadata.  On the real line the function is the declared expression on
/// each (disjoint) piece and 0 elsewhere; endpoint flags decide values at
/// piece boundaries, which is what atoms see.  On the naturals it is an
/// explicit table plus an optional analytic tail.
class TestFunction {
public:
    static TestFunction from_pieces(const Space& space, std::vector<FnPiece> pieces,
                                    Scalar gamma, std::set<Tag> tags,
                                    std::optional<HolderCert> holder = std::nullopt);
    static TestFunction on_nat(const Space& space, std::map<i64, Scalar> table,
                               std::optional<DiscreteTerm> tail, i64 tail_from,
                               Scalar gamma, std::set<Tag> tags,
                               NatSet tail_on = NatSet::all());
    static TestFunction constant(const Space& space, const Scalar& c);

    const Space& space() const { return space_; }
    const std::vector<FnPiece>& pieces() const { return pieces_; }
    const std::map<i64, Scalar>& table() const { return table_; }
    const std::optional<DiscreteTerm>& tail() const { return tail_; }
    i64 tail_from() const { return tail_from_; }
    /// Subset of the naturals on which the tail rule applies.
    const NatSet& tail_on() const { return tail_on_; }

    const Scalar& gamma() const { return gamma_; }
    const std::set<Tag>& tags() const { return tags_; }
    bool has_tag(Tag t) const { return tags_.count(t) > 0; }
    const std::optional<HolderCert>& holder() const { return holder_; }

    Scalar eval(const Scalar& x) const;
    Scalar eval_nat(i64 n) const;

    /// Support as a Borel set (union of piece intervals / table keys + tail).
    BorelSet support() const;

    std::string str() const;

private:
    Space space_ = Space::discrete_nat();
    std::vector<FnPiece> pieces_;
    std::map<i64, Scalar> table_;
    std::optional<DiscreteTerm> tail_;
    i64 tail_from_ = 1;
    NatSet tail_on_ = NatSet::all();
    Scalar gamma_ = Scalar(0);
    std::set<Tag> tags_;
    std::optional<HolderCert> holder_;
};

/// f(x) = max(0, 1 - n * dist(x, A)) for closed A: equals 1 on A, falls to 0
/// at distance 1/n, Lipschitz with constant n.  Compact support when A is
/// bounded and the dilation stays inside the space.
TestFunction bump_over_closed(const Space& space, const BorelSet& A, i64 n);

/// g = min(1, n * dist(x, boundary(B))) on open B, 0 off B: pointwise between
/// the deep-interior indicator and 1_B.  Requires a nonempty 1/n-deep margin.
TestFunction bump_under_open(const Space& space, const BorelSet& B, i64 n);

TestFunction indicator(const Space& space, const BorelSet& A);

/// 1_{f < k} * f.
TestFunction truncate(const TestFunction& f, const Scalar& k);

enum class Family { Cc, C0, Cb, Mgamma, Holder, UniformlyContinuous };

/// Deterministic factory for the quantified function families.  Every
/// returned function carries certified tags for its class.  On CofiniteNat
/// the only continuous functions are constants, so the continuous families
/// return constants there.
std::vector<TestFunction> random_family(const Space& space, Family family,
                                        const Scalar& gamma, std::uint64_t seed, int count);

/// Sample-based verification of declared tags (bound, Hölder pairs, support
/// flags).  Returns false with no side effects when a check fails.
bool verify_tags(const TestFunction& f, std::uint64_t seed, int samples = 10000);

std::string family_name(Family f);

}  // namespace mmodes
