#pragma once

// Real polynomials with ascending coefficients and an Aberth-Ehrlich
// root finder (degree-capped, deterministic start configuration).

#include <string>
#include <vector>

#include "critline/numeric.hpp"

namespace critline::poly {

struct RealPolynomial {
    std::vector<double> c; // c[k] multiplies z^k

    RealPolynomial() = default;
    explicit RealPolynomial(std::vector<double> coeffs) : c(std::move(coeffs)) { trim(); }

    void trim();
    int degree() const; // -1 for the zero polynomial
    bool is_zero() const { return degree() < 0; }
    cplx eval(cplx z) const;
    double eval(double x) const;
    RealPolynomial derivative() const;
    RealPolynomial operator*(const RealPolynomial& o) const;
    RealPolynomial operator+(const RealPolynomial& o) const;

    // p(a z + b)
    RealPolynomial compose_affine(double a, double b) const;
    // p(-z)
    RealPolynomial reflect() const;

    static RealPolynomial from_roots(const std::vector<double>& roots, double lead = 1.0);
    std::string str(const std::string& var = "z") const;
};

inline constexpr int max_root_degree = 64;

// all complex roots, Aberth-Ehrlich with a Newton polish; throws
// parameter_error beyond max_root_degree
std::vector<cplx> roots(const RealPolynomial& p);

// divide by (z - r); remainder returned through *rem when non-null
RealPolynomial deflate_linear(const RealPolynomial& p, double r, double* rem = nullptr);

// parse "1,-2,0,8" (ascending coefficients) into a polynomial
RealPolynomial parse_coeff_list(const std::string& text);

} // namespace critline::poly
