#include "mmodes/numeric.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mmodes {

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr i128 kMax64 = std::numeric_limits<i64>::max();
constexpr i128 kMin64 = std::numeric_limits<i64>::min();

}  // namespace

std::optional<Rat> Rat::normalized(i128 n, i128 d) {
    if (d == 0) return std::nullopt;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (n > kMax64 || n < kMin64 || d > kMax64) return std::nullopt;
    return Rat(static_cast<i64>(n), static_cast<i64>(d), raw_tag{});
}

Rat::Rat(i64 n, i64 d) {
    if (d == 0) throw std::invalid_argument("Rat: zero denominator");
    auto r = normalized(static_cast<i128>(n), static_cast<i128>(d));
    if (!r) throw std::overflow_error("Rat: unrepresentable");
    *this = *r;
}

std::optional<Rat> Rat::checked_add(const Rat& a, const Rat& b) {
    i128 n = static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_;
    i128 d = static_cast<i128>(a.den_) * b.den_;
    return normalized(n, d);
}

std::optional<Rat> Rat::checked_sub(const Rat& a, const Rat& b) {
    i128 n = static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_;
    i128 d = static_cast<i128>(a.den_) * b.den_;
    return normalized(n, d);
}

std::optional<Rat> Rat::checked_mul(const Rat& a, const Rat& b) {
    i128 n = static_cast<i128>(a.num_) * b.num_;
    i128 d = static_cast<i128>(a.den_) * b.den_;
    return normalized(n, d);
}

std::optional<Rat> Rat::checked_div(const Rat& a, const Rat& b) {
    if (b.num_ == 0) return std::nullopt;
    i128 n = static_cast<i128>(a.num_) * b.den_;
    i128 d = static_cast<i128>(a.den_) * b.num_;
    return normalized(n, d);
}

std::optional<Rat> Rat::checked_neg(const Rat& a) {
    return normalized(-static_cast<i128>(a.num_), static_cast<i128>(a.den_));
}

std::optional<Rat> Rat::checked_pow(const Rat& a, i64 e) {
    if (e == 0) return Rat(1);
    Rat base = a;
    if (e < 0) {
        if (a.num_ == 0) return std::nullopt;
        auto inv = checked_div(Rat(1), a);
        if (!inv) return std::nullopt;
        base = *inv;
        e = -e;
    }
    Rat acc(1);
    while (e > 0) {
        if (e & 1) {
            auto r = checked_mul(acc, base);
            if (!r) return std::nullopt;
            acc = *r;
        }
        e >>= 1;
        if (e) {
            auto r = checked_mul(base, base);
            if (!r) return std::nullopt;
            base = *r;
        }
    }
    return acc;
}

bool operator<(const Rat& a, const Rat& b) {
    return static_cast<i128>(a.num_) * b.den_ < static_cast<i128>(b.num_) * a.den_;
}

std::string Rat::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rat> Rat::exact_sqrt(const Rat& a) {
    if (a.num_ < 0) return std::nullopt;
    auto isqrt = [](i64 v) -> std::optional<i64> {
        if (v < 0) return std::nullopt;
        i64 r = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(v))));
        for (i64 c = (r > 1 ? r - 1 : 0); c <= r + 1; ++c)
            if (c * c == v) return c;
        return std::nullopt;
    };
    auto sn = isqrt(a.num_);
    auto sd = isqrt(a.den_);
    if (!sn || !sd) return std::nullopt;
    return Rat(*sn, *sd);
}

const Rat& Scalar::rat() const {
    if (!exact_) throw std::logic_error("Scalar: rat() on inexact value");
    return rat_;
}

Scalar Scalar::operator-() const {
    if (exact_) {
        if (auto r = Rat::checked_neg(rat_)) return Scalar(*r);
    }
    return approx(-val_);
}

Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) {
        if (auto r = Rat::checked_add(a.rat_, b.rat_)) return Scalar(*r);
    }
    return Scalar::approx(a.val_ + b.val_);
}

Scalar operator-(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) {
        if (auto r = Rat::checked_sub(a.rat_, b.rat_)) return Scalar(*r);
    }
    return Scalar::approx(a.val_ - b.val_);
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) {
        if (auto r = Rat::checked_mul(a.rat_, b.rat_)) return Scalar(*r);
    }
    return Scalar::approx(a.val_ * b.val_);
}

Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.is_zero()) throw std::domain_error("Scalar: division by zero");
    if (a.exact_ && b.exact_) {
        if (auto r = Rat::checked_div(a.rat_, b.rat_)) return Scalar(*r);
    }
    return Scalar::approx(a.val_ / b.val_);
}

Scalar Scalar::pow_int(i64 e) const {
    if (e < 0 && is_zero()) throw std::domain_error("Scalar: 0 to negative power");
    if (exact_) {
        if (auto r = Rat::checked_pow(rat_, e)) return Scalar(*r);
    }
    return approx(std::pow(val_, static_cast<double>(e)));
}

bool operator==(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return a.rat_ == b.rat_;
    return a.val_ == b.val_;
}

bool operator<(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return a.rat_ < b.rat_;
    return a.val_ < b.val_;
}

bool operator<=(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return a.rat_ <= b.rat_;
    return a.val_ <= b.val_;
}

std::string Scalar::str() const {
    if (exact_) return rat_.str();
    std::ostringstream os;
    os.precision(17);
    os << val_;
    return os.str();
}

const Scalar& Ext::value() const {
    if (k_ != 0) throw std::logic_error("Ext: value() on infinite endpoint");
    return v_;
}

double Ext::to_double() const {
    if (k_ < 0) return -std::numeric_limits<double>::infinity();
    if (k_ > 0) return std::numeric_limits<double>::infinity();
    return v_.value();
}

bool operator==(const Ext& a, const Ext& b) {
    if (a.k_ != b.k_) return false;
    return a.k_ != 0 || a.v_ == b.v_;
}

bool operator<(const Ext& a, const Ext& b) {
    if (a.k_ != b.k_) return a.k_ < b.k_;
    return a.k_ == 0 && a.v_ < b.v_;
}

std::string Ext::str() const {
    if (k_ < 0) return "-inf";
    if (k_ > 0) return "inf";
    return v_.str();
}

}  // namespace mmodes
