#pragma once

// Argument-principle counting over rectangles, the per-family count report
// N / N0 / N0', the explicit bound B_a, safe contour heights, the density
// budget for 0 < alpha < 1/2 translates, and the Littlewood integral check.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "critline/families.hpp"
#include "critline/numeric.hpp"
#include "critline/phase.hpp"

namespace critline::winding {

struct Rect {
    double sigma0, sigma1; // sigma0 < sigma1
    double tau0, tau1;     // tau0 < tau1
};

// winding number of g around the rectangle boundary = zeros - poles inside;
// throws boundary_error when the boundary runs too close to a zero/pole.
// known_features lists zeros/poles of g near (not on) the boundary; the edge
// walk is forced to land next to each one so that two close features can
// never fall inside a single step, where their argument swings could cancel
long rectangle_count(const std::function<SpecialValue(cplx)>& g, const Rect& rect,
                     double tol = 1e-9, const std::vector<cplx>& known_features = {});

// accumulated change of the continuous argument of g along the segment
// z0 -> z1; forced lists parameter values in (0,1) the walk must land on
double edge_arg_change(const std::function<SpecialValue(cplx)>& g, cplx z0, cplx z1,
                       double tol = 1e-9, const std::vector<double>& forced = {});

struct Inventory {
    int n_f_a = 0;      // multiplicity of s = a as zero of f
    int n_f_right = 0;  // real zeros of f with sigma > a, with multiplicity
    int P_f_right = 0;  // poles of f with sigma > a
    int N_h_right = 0;  // zeros of h with sigma > a
    int P_h_right = 0;  // poles of h with sigma > a
};

struct CountReport {
    std::string family;
    std::string sign;
    std::string mode;          // "real_onesided" or "conjugate_twosided"
    double a = 0.0;
    double T_requested = 0.0;
    double T_used = 0.0;       // perturbed contour top actually used
    double sigma0 = 0.0;
    long N = 0;                // zeros with 0 < tau < T (or |tau| < T two-sided)
    long N0 = 0;               // those on the line, with multiplicity
    long N0_prime = 0;         // distinct line zeros
    Rational B_a;              // explicit bound for N - N0'
    bool B_a_valid = false;    // envelope hypotheses verified for this family
    long d_estimate = 0;       // stable value of N0'(t) - ceil(phi(t)/pi - u)
    bool d_stable = false;
    long k_gap = 0;            // integer-point gap bound (paper-style K)
    Inventory inventory;
    bool parity_ok = false;    // N - N0 even (real mode invariant)
    bool bound_ok = false;     // N - N0' <= B_a (when B_a_valid)
    std::optional<double> strip_sigma0; // set when counting a strip only
    double envelope_at_sigma0 = 0.0;
};

struct CountOptions {
    // count only |sigma - a| <= strip_half_width instead of the full envelope
    // rectangle (families without a small-F envelope at any usable sigma0)
    std::optional<double> strip_half_width;
    double sigma0_cap = 40.0;
    double tol = 1e-9;
    bool locate_multiplicities = true; // verify line-zero multiplicities when N != N0'
};

CountReport count_N(const families::SymmetricFamily& fam, double T,
                    const CountOptions& opts = {});

// explicit bound B_a = u - n_{f,sigma>a} - n_{f,a}/2 + P_{f,sigma>a}
//                      + N_{h,sigma>a} - P_{h,sigma>a} (real mode) or the
// two-sided 1 + 2 P_f + 2 N_h - 2 P_h (conjugate mode), from the inventory
Rational bound_Ba(const families::SymmetricFamily& fam, const Inventory& inv);

// assemble the inventory (real-axis scans + declared data)
// T bounds the numeric h-zero search when the family declares N_h_right = -1;
// exact declared inventories ignore it
Inventory make_inventory(const families::SymmetricFamily& fam, double sigma0, double T);

struct SafeHeight {
    double T;  // chosen ordinate
    double A;  // |kernel| >= tau^{-A} witnessed on the sampled segment
};

// ordinate in (n, n+1) where |zeta| stays off zero on -1 <= sigma <= 2,
// picked by a 64-point grid max-min search
SafeHeight safe_height(long n);

struct DensityReport {
    double T = 0.0;
    long budget = 0;    // 4 * N_kernel(a + alpha-strip, 2T + 4)
    long count_gap = 0; // measured N - N0'
    bool ok = false;    // count_gap <= budget + slack
    long slack = 4;
};

// density-mode bound for translate families with 0 < alpha < 1/2
DensityReport density_report(const families::SymmetricFamily& fam, double T);

// (1/(pi T)) [ int_a^{sigma0} log|g(sigma + iT)| dsigma
//            + int_0^T arg g(sigma0 + i tau) dtau - I(sigma0) ], g = 1 +- F;
// small when S(T) averages to zero as the Littlewood identity predicts
double littlewood_S_mean(const families::SymmetricFamily& fam, double T, double sigma0);

// contour top near T with min |f| on the top edge maximized over candidates
double pick_contour_top(const families::SymmetricFamily& fam, double T,
                        double sigma_lo, double sigma_hi);

} // namespace critline::winding
