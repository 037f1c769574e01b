#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mmodes {

using i64 = std::int64_t;

/// Exact rational number on int64 numerator/denominator.
///
/// Always stored normalized: den > 0, gcd(|num|, den) = 1.  Arithmetic runs
/// through 128-bit intermediates; results that do not fit back into int64
/// after normalization are reported via the checked_* functions returning
/// nullopt (Scalar uses that to degrade to floating point instead of
/// aborting).
class Rat {
public:
    constexpr Rat() = default;
    Rat(i64 n) : num_(n) {}
    Rat(i64 n, i64 d);

    i64 num() const { return num_; }
    i64 den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    static std::optional<Rat> checked_add(const Rat& a, const Rat& b);
    static std::optional<Rat> checked_sub(const Rat& a, const Rat& b);
    static std::optional<Rat> checked_mul(const Rat& a, const Rat& b);
    static std::optional<Rat> checked_div(const Rat& a, const Rat& b);
    static std::optional<Rat> checked_pow(const Rat& a, i64 e);
    static std::optional<Rat> checked_neg(const Rat& a);

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b);
    friend bool operator<=(const Rat& a, const Rat& b) { return a < b || a == b; }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

    std::string str() const;

    /// Rational square root if one exists (num and den both perfect squares).
    static std::optional<Rat> exact_sqrt(const Rat& a);

private:
    struct raw_tag {};
    Rat(i64 n, i64 d, raw_tag) : num_(n), den_(d) {}
    static std::optional<Rat> normalized(__int128 n, __int128 d);

    i64 num_ = 0;
    i64 den_ = 1;
};

/// A real quantity that is exact (rational) whenever the computation allows
/// and silently degrades to double precision otherwise.  The exactness flag
/// is what lets the gallery assert values like 2/3 with zero tolerance.
class Scalar {
public:
    Scalar() : exact_(true), rat_(0), val_(0.0) {}
    Scalar(int n) : exact_(true), rat_(n), val_(static_cast<double>(n)) {}
    Scalar(i64 n) : exact_(true), rat_(n), val_(static_cast<double>(n)) {}
    Scalar(const Rat& r) : exact_(true), rat_(r), val_(r.to_double()) {}

    static Scalar approx(double v) {
        Scalar s;
        s.exact_ = false;
        s.rat_ = Rat(0);
        s.val_ = v;
        return s;
    }
    static Scalar rational(i64 n, i64 d) { return Scalar(Rat(n, d)); }

    bool is_exact() const { return exact_; }
    const Rat& rat() const;  // throws if not exact
    double value() const { return val_; }

    bool is_zero() const { return exact_ ? rat_.is_zero() : val_ == 0.0; }
    int sign() const {
        if (exact_) return rat_.sign();
        return val_ > 0 ? 1 : (val_ < 0 ? -1 : 0);
    }

    Scalar operator-() const;
    Scalar abs() const { return sign() < 0 ? -*this : *this; }

    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    friend Scalar operator/(const Scalar& a, const Scalar& b);  // throws on /0 (exact path)

    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
    Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
    Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

    /// x^e for integer e (negative allowed when x != 0).
    Scalar pow_int(i64 e) const;

    // Exact comparison when both sides are exact, double comparison otherwise.
    friend bool operator==(const Scalar& a, const Scalar& b);
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
    friend bool operator<(const Scalar& a, const Scalar& b);
    friend bool operator<=(const Scalar& a, const Scalar& b);
    friend bool operator>(const Scalar& a, const Scalar& b) { return b < a; }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return b <= a; }

    static Scalar min(const Scalar& a, const Scalar& b) { return a <= b ? a : b; }
    static Scalar max(const Scalar& a, const Scalar& b) { return a >= b ? a : b; }

    std::string str() const;

private:
    bool exact_;
    Rat rat_;
    double val_;
};

/// Extended real: -inf, finite Scalar, or +inf.  Interval endpoints.
class Ext {
public:
    static Ext neg_inf() { return Ext(-1, Scalar(0)); }
    static Ext pos_inf() { return Ext(+1, Scalar(0)); }
    static Ext fin(const Scalar& v) { return Ext(0, v); }
    Ext() : Ext(0, Scalar(0)) {}

    bool is_finite() const { return k_ == 0; }
    bool is_pos_inf() const { return k_ == 1; }
    bool is_neg_inf() const { return k_ == -1; }
    const Scalar& value() const;  // throws if infinite
    double to_double() const;

    friend bool operator==(const Ext& a, const Ext& b);
    friend bool operator!=(const Ext& a, const Ext& b) { return !(a == b); }
    friend bool operator<(const Ext& a, const Ext& b);
    friend bool operator<=(const Ext& a, const Ext& b) { return a < b || a == b; }
    friend bool operator>(const Ext& a, const Ext& b) { return b < a; }
    friend bool operator>=(const Ext& a, const Ext& b) { return b <= a; }

    std::string str() const;

private:
    Ext(int k, const Scalar& v) : k_(k), v_(v) {}
    int k_;
    Scalar v_;
};

}  // namespace mmodes
