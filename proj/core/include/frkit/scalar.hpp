#ifndef FRKIT_SCALAR_HPP
#define FRKIT_SCALAR_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace frkit {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational scalar. cpp_rational keeps denominator > 0 and
/// gcd(|num|, den) = 1 after every operation, so values are always canonical.
using Rational = boost::multiprecision::cpp_rational;

using complexd = std::complex<double>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct SingularBlock : Error {
    using Error::Error;
};
struct PoleAt : Error {
    using Error::Error;
};
struct BadParams : Error {
    using Error::Error;
};

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw BadParams("rational with zero denominator: " + s);
        return Rational(num, den);
    } catch (const std::exception& e) {
        throw BadParams("cannot parse rational '" + s + "': " + e.what());
    }
}

inline std::string to_string(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

/// Complex number with exact rational real and imaginary parts.
struct RationalComplex {
    Rational re;
    Rational im;

    RationalComplex() = default;
    RationalComplex(Rational r) : re(std::move(r)) {}
    RationalComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    RationalComplex(int n) : re(n) {}

    bool is_real() const { return im == 0; }

    friend RationalComplex operator+(const RationalComplex& a, const RationalComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend RationalComplex operator-(const RationalComplex& a, const RationalComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend RationalComplex operator-(const RationalComplex& a) { return {-a.re, -a.im}; }
    friend RationalComplex operator*(const RationalComplex& a, const RationalComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend RationalComplex operator/(const RationalComplex& a, const RationalComplex& b) {
        Rational n2 = b.re * b.re + b.im * b.im;
        if (n2 == 0) throw SingularBlock("division by zero RationalComplex");
        return {(a.re * b.re + a.im * b.im) / n2, (a.im * b.re - a.re * b.im) / n2};
    }
    RationalComplex& operator+=(const RationalComplex& b) { return *this = *this + b; }
    RationalComplex& operator-=(const RationalComplex& b) { return *this = *this - b; }
    RationalComplex& operator*=(const RationalComplex& b) { return *this = *this * b; }
    RationalComplex& operator/=(const RationalComplex& b) { return *this = *this / b; }
    friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
        return a.re == b.re && a.im == b.im;
    }
};

inline complexd to_complexd(const RationalComplex& z) { return {to_double(z.re), to_double(z.im)}; }
inline std::string to_string(const RationalComplex& z) {
    if (z.is_real()) return to_string(z.re);
    return "[" + to_string(z.re) + ", " + to_string(z.im) + "]";
}

/// Field operations each scalar backend must provide. Exact backends have
/// decidable equality; the float backend only has tolerance tests.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational from_int(long n) { return Rational(n); }
    static bool is_zero(const Rational& a) { return a == 0; }
    static Rational conj(const Rational& a) { return a; }
    static double abs_approx(const Rational& a) { return std::abs(to_double(a)); }
    static complexd to_complex(const Rational& a) { return {to_double(a), 0.0}; }
    static std::string str(const Rational& a) { return to_string(a); }
};

template <>
struct ScalarTraits<RationalComplex> {
    static constexpr bool exact = true;
    static RationalComplex zero() { return {}; }
    static RationalComplex one() { return {Rational(1)}; }
    static RationalComplex from_int(long n) { return {Rational(n)}; }
    static bool is_zero(const RationalComplex& a) { return a.re == 0 && a.im == 0; }
    static RationalComplex conj(const RationalComplex& a) { return {a.re, -a.im}; }
    static double abs_approx(const RationalComplex& a) { return std::abs(to_complexd(a)); }
    static complexd to_complex(const RationalComplex& a) { return to_complexd(a); }
    static std::string str(const RationalComplex& a) { return to_string(a); }
};

template <>
struct ScalarTraits<complexd> {
    static constexpr bool exact = false;
    static complexd zero() { return {0.0, 0.0}; }
    static complexd one() { return {1.0, 0.0}; }
    static complexd from_int(long n) { return {double(n), 0.0}; }
    static bool is_zero(const complexd& a) { return a == complexd(0.0, 0.0); }
    static complexd conj(const complexd& a) { return std::conj(a); }
    static double abs_approx(const complexd& a) { return std::abs(a); }
    static complexd to_complex(const complexd& a) { return a; }
    static std::string str(const complexd& a);
};

template <class S>
inline constexpr bool is_exact_v = ScalarTraits<S>::exact;

/// Widening conversions between scalar backends (never narrowing float
/// back to exact).
template <class To, class From>
To scalar_cast(const From& v) {
    if constexpr (std::is_same_v<To, From>)
        return v;
    else if constexpr (std::is_same_v<To, complexd>)
        return ScalarTraits<From>::to_complex(v);
    else if constexpr (std::is_same_v<To, RationalComplex> && std::is_same_v<From, Rational>)
        return RationalComplex(v);
    else
        static_assert(std::is_same_v<To, From>, "unsupported scalar conversion");
}

std::string format_float(double x);  // 17 significant digits, locale-free

inline std::string ScalarTraits<complexd>::str(const complexd& a) {
    if (a.imag() == 0.0) return format_float(a.real());
    return "[" + format_float(a.real()) + ", " + format_float(a.imag()) + "]";
}

}  // namespace frkit

#endif
