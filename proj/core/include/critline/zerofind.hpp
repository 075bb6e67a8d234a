#pragma once

// Zero localization and classification: line bisection from a phase trace,
// real-axis scans, 2-D off-line subdivision search, multiplicity by winding,
// and the special parameter solvers (alpha*, y*, the tangential double zero).

#include <functional>
#include <string>
#include <vector>

#include "critline/families.hpp"
#include "critline/numeric.hpp"
#include "critline/winding.hpp"

namespace critline::zerofind {

struct ZeroRecord {
    cplx s;
    int multiplicity = 1;
    bool on_line = false;
    double residual = 0.0;   // |f(s)|
    std::string method;      // "bisect", "newton", "scan"
};

// line zeros with tau in (0, T] (real mode) or |tau| < T (conjugate mode),
// refined to tau tolerance 1e-10 (relative)
std::vector<ZeroRecord> line_zeros(const families::SymmetricFamily& fam, double T,
                                   bool with_multiplicity = true);

// real zeros of f on [lo, hi]; scan + bisection, intervals split at declared
// poles; the mirror zero 2a - rho is appended automatically
std::vector<ZeroRecord> real_zeros(const families::SymmetricFamily& fam,
                                   double lo, double hi);

// zeros off the critical line inside the box, by recursive subdivision of the
// winding count plus a Newton polish; reflected partners appended in real mode
std::vector<ZeroRecord> offline_zeros(const families::SymmetricFamily& fam,
                                      const winding::Rect& box);

// multiplicity of an isolated zero by small-circle winding at two radii
int multiplicity(const families::SymmetricFamily& fam, cplx z);

struct SolveResult {
    double parameter = 0.0;
    double certificate = 0.0; // residual witness at the solution
};

struct DoubleZeroResult {
    double alpha = 0.0;
    double tau0 = 0.0;
    double certificate = 0.0; // |f(a + i tau0)| at the solved parameters
};

// alpha* with (zeta*)'(1/2 + alpha*) = 0, bisected on the bracket
SolveResult solve_alpha_star(double lo = 0.55, double hi = 20.0);

// y* = 4 pi e^{-gamma - q'(1/2)/q(1/2)} closed form; q(1/2) != 0 required
SolveResult solve_y_star(const poly::RealPolynomial& q);

// tangential double zero: the parameter where the phase dip of the family
// built by make(alpha) touches the zero lattice; nested bisection over alpha
DoubleZeroResult solve_double_zero(
    const std::function<families::SymmetricFamily(double)>& make, double alpha_lo,
    double alpha_hi, double tau_lo, double tau_hi);

std::string zeros_to_csv(const std::vector<ZeroRecord>& zs);

} // namespace critline::zerofind
