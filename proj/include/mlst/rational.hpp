#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlst {

// Exact rational number with 64-bit numerator and denominator.
// Invariant: den > 0 and gcd(|num|, den) == 1. Arithmetic goes through
// 128-bit intermediates and throws std::overflow_error if a reduced
// result does not fit back into 64 bits.
class Rat {
public:
    constexpr Rat() = default;
    constexpr Rat(long long n) : num_(n) {}
    Rat(long long n, long long d) { assign(static_cast<__int128>(n), static_cast<__int128>(d)); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ > 0 ? 1 : num_ < 0 ? -1 : 0; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        Rat r;
        r.assign(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                 static_cast<__int128>(a.den_) * b.den_);
        return r;
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        Rat r;
        r.assign(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                 static_cast<__int128>(a.den_) * b.den_);
        return r;
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        Rat r;
        r.assign(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
        return r;
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
        Rat r;
        r.assign(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
        return r;
    }
    Rat operator-() const {
        Rat r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

    static Rat abs(const Rat& a) { return a.num_ < 0 ? -a : a; }
    static Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
    static Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

    // Parses a plain decimal literal ("3", "-0.25", "10.") exactly.
    static Rat from_decimal(std::string_view s);

    // Exact decimal representation; requires the denominator to be of the
    // form 2^a * 5^b (always true for parsed decimals and integer weights).
    std::string to_decimal() const;

    // "n" or "n/d", mainly for diagnostics.
    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    long long num_ = 0;
    long long den_ = 1;

    void assign(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rat: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr __int128 lo = static_cast<__int128>(INT64_MIN);
        constexpr __int128 hi = static_cast<__int128>(INT64_MAX);
        if (n < lo || n > hi || d > hi) throw std::overflow_error("Rat: 64-bit overflow");
        num_ = static_cast<long long>(n);
        den_ = static_cast<long long>(d);
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }
};

inline Rat Rat::from_decimal(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("Rat: empty decimal literal");
    bool neg = false;
    size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    __int128 mantissa = 0;
    long long frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("Rat: malformed decimal");
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (mantissa > static_cast<__int128>(INT64_MAX) * 1000000)
                throw std::overflow_error("Rat: decimal literal too large");
            if (seen_dot) ++frac_digits;
            seen_digit = true;
        } else {
            throw std::invalid_argument("Rat: malformed decimal");
        }
    }
    if (!seen_digit) throw std::invalid_argument("Rat: malformed decimal");
    __int128 den = 1;
    for (long long k = 0; k < frac_digits; ++k) den *= 10;
    Rat r;
    r.assign(neg ? -mantissa : mantissa, den);
    return r;
}

inline std::string Rat::to_decimal() const {
    long long d = den_;
    long long pow2 = 0, pow5 = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++pow2;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++pow5;
    }
    if (d != 1) throw std::domain_error("Rat: no finite decimal expansion for " + to_string());
    long long digits = pow2 > pow5 ? pow2 : pow5;
    __int128 scaled = num_;
    for (long long k = 0; k < digits - pow5; ++k) scaled *= 5;
    for (long long k = 0; k < digits - pow2; ++k) scaled *= 2;
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string body;
    if (scaled == 0) body = "0";
    while (scaled > 0) {
        body.insert(body.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
        scaled /= 10;
    }
    while (static_cast<long long>(body.size()) < digits + 1) body.insert(body.begin(), '0');
    std::string out;
    if (neg) out += '-';
    if (digits == 0) {
        out += body;
        return out;
    }
    out += body.substr(0, body.size() - digits);
    std::string frac = body.substr(body.size() - digits);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    if (!frac.empty()) {
        out += '.';
        out += frac;
    }
    return out;
}

}  // namespace mlst
