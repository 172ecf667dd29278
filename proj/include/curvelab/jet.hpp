#pragma once

// First-order complex jets: a value together with its complex derivative.
//
// A Jet is the dual number a + b·ε (ε² = 0) over the complex field. Feeding
// (z, 1) through holomorphic arithmetic yields (f(z), f'(z)) in one pass, so
// every Wronskian and derived map downstream is built from exact derivatives.

#include <cmath>
#include <complex>

#include "curvelab/error.hpp"

namespace curvelab {

using cplx = std::complex<double>;

struct Jet {
    cplx value{};
    cplx deriv{};

    constexpr Jet() = default;
    constexpr Jet(cplx v) : value{v} {}  // NOLINT: constants lift implicitly
    constexpr Jet(cplx v, cplx d) : value{v}, deriv{d} {}

    /// The identity jet at z: (z, 1).
    static constexpr Jet variable(cplx z) { return {z, cplx{1.0, 0.0}}; }

    friend bool operator==(const Jet&, const Jet&) = default;
};

inline Jet operator-(const Jet& a) { return {-a.value, -a.deriv}; }
inline Jet operator+(const Jet& a, const Jet& b) { return {a.value + b.value, a.deriv + b.deriv}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.value - b.value, a.deriv - b.deriv}; }

// (fg)' = f'g + fg'
inline Jet operator*(const Jet& a, const Jet& b) {
    return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
}

inline Jet operator/(const Jet& a, const Jet& b) {
    if (b.value == cplx{}) throw EvalError("division by zero (pole hit exactly)");
    const cplx q = a.value / b.value;
    return {q, (a.deriv - q * b.deriv) / b.value};
}

inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }
inline Jet& operator-=(Jet& a, const Jet& b) { return a = a - b; }
inline Jet& operator*=(Jet& a, const Jet& b) { return a = a * b; }

namespace detail {

inline cplx ipow(cplx base, unsigned long long k) {
    cplx result{1.0, 0.0};
    while (k != 0) {
        if (k & 1ULL) result *= base;
        base *= base;
        k >>= 1ULL;
    }
    return result;
}

}  // namespace detail

/// Integer power by repeated squaring; std::pow(complex, int) goes through log.
inline cplx int_pow(cplx base, long long k) {
    if (k >= 0) return detail::ipow(base, static_cast<unsigned long long>(k));
    if (base == cplx{}) throw EvalError("zero raised to a negative power");
    return cplx{1.0, 0.0} / detail::ipow(base, static_cast<unsigned long long>(-k));
}

inline Jet pow(const Jet& a, long long k) {
    if (k == 0) return Jet{cplx{1.0, 0.0}};
    const cplx lower = int_pow(a.value, k - 1);
    return {lower * a.value, static_cast<double>(k) * lower * a.deriv};
}

inline Jet exp(const Jet& a) {
    const cplx e = std::exp(a.value);
    return {e, e * a.deriv};
}

inline Jet sin(const Jet& a) { return {std::sin(a.value), std::cos(a.value) * a.deriv}; }
inline Jet cos(const Jet& a) { return {std::cos(a.value), -std::sin(a.value) * a.deriv}; }

inline Jet tan(const Jet& a) {
    const cplx c = std::cos(a.value);
    if (c == cplx{}) throw EvalError("tan evaluated at a pole");
    return {std::sin(a.value) / c, a.deriv / (c * c)};
}

// Principal branches. Both are singular at 0.
inline Jet log(const Jet& a) {
    if (a.value == cplx{}) throw EvalError("log branch evaluated at 0");
    return {std::log(a.value), a.deriv / a.value};
}

inline Jet sqrt(const Jet& a) {
    if (a.value == cplx{}) throw EvalError("sqrt branch evaluated at 0");
    const cplx s = std::sqrt(a.value);
    return {s, a.deriv / (2.0 * s)};
}

}  // namespace curvelab
