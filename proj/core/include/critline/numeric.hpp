#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace critline {

using cplx = std::complex<double>;

// ---- error taxonomy ------------------------------------------------------

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// evaluation requested exactly at a pole of the function
struct pole_error : error { using error::error; };
// series/iteration budget exhausted before reaching the target tolerance
struct budget_error : error { using error::error; };
// bad argument to a builder or solver (out-of-domain parameter, bad bracket)
struct parameter_error : error { using error::error; };
// operation requires a primitive character
struct primitivity_error : error { using error::error; };
// phase trace ran into a zero of h on the critical line
struct trace_error : error { using error::error; };
// contour boundary passes too close to a zero/pole to trust the winding
struct boundary_error : error { using error::error; };
// no certified envelope is available for this family
struct envelope_error : error { using error::error; };
// CLI usage problems (unknown command, malformed value)
struct usage_error : error { using error::error; };

// ---- common small value types -------------------------------------------

struct EvalPrecision {
    double target_abs_tol = 1e-12;
    long max_terms = 2'000'000;
};

// value plus a crude forward error estimate
struct SpecialValue {
    cplx value{};
    double est_error = 0.0;
};

// exact small rational, used for the half-integer bound arithmetic
struct Rational {
    long long num = 0;
    long long den = 1;

    constexpr Rational() = default;
    constexpr Rational(long long n) : num(n), den(1) {}
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw parameter_error("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    double value() const { return double(num) / double(den); }
    Rational operator+(const Rational& o) const { return {num * o.den + o.num * den, den * o.den}; }
    Rational operator-(const Rational& o) const { return {num * o.den - o.num * den, den * o.den}; }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const { return num * o.den < o.num * den; }
    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

// ---- shared constants ----------------------------------------------------

inline constexpr double pi_const = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;

inline bool is_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace critline
