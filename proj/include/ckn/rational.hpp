#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "ckn/errors.hpp"

namespace ckn {

/// Exact rational number with arbitrary-precision numerator and denominator.
class Rational {
public:
    using Integer = boost::multiprecision::cpp_int;
    using Value = boost::multiprecision::cpp_rational;

    Rational() = default;
    Rational(std::int64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den) {
        if (den == 0) throw InputError("rational with zero denominator");
        value_ = Value(Integer(num), Integer(den));
    }
    explicit Rational(Value v) : value_(std::move(v)) {}

    /// Parses "num", "num/den" or "-num/den". Rejects zero denominators and
    /// non-finite spellings such as "inf".
    static Rational parse(std::string_view text) {
        auto trim = [](std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
            return s;
        };
        text = trim(text);
        auto slash = text.find('/');
        auto num_text = trim(text.substr(0, slash));
        auto den_text = slash == std::string_view::npos ? std::string_view("1") : trim(text.substr(slash + 1));
        Integer num = parse_integer(num_text, text);
        Integer den = parse_integer(den_text, text);
        if (den == 0) throw InputError("rational '" + std::string(text) + "' has zero denominator");
        return Rational(Value(num, den));
    }

    const Value& value() const { return value_; }
    Integer numerator() const { return boost::multiprecision::numerator(value_); }
    Integer denominator() const { return boost::multiprecision::denominator(value_); }

    double to_double() const { return value_.convert_to<double>(); }
    std::string str() const {
        auto den = denominator();
        if (den == 1) return numerator().str();
        return numerator().str() + "/" + den.str();
    }

    int sign() const { return value_.sign(); }
    bool is_zero() const { return value_.is_zero(); }
    bool is_integer() const { return denominator() == 1; }

    Rational operator-() const { return Rational(Value(-value_)); }
    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw DomainError("division by zero rational");
        value_ /= o.value_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (a.value_ > b.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    static Integer parse_integer(std::string_view digits, std::string_view whole) {
        std::string_view body = digits;
        if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
        if (body.empty()) throw InputError("malformed rational '" + std::string(whole) + "'");
        for (char c : body) {
            if (c < '0' || c > '9') throw InputError("malformed rational '" + std::string(whole) + "'");
        }
        Integer v{std::string(body)};
        return (!digits.empty() && digits.front() == '-') ? Integer(-v) : v;
    }

    Value value_{0};
};

inline Rational inverse(const Rational& r) { return Rational(1) / r; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace ckn
