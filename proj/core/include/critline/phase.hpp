#pragma once

// Continuous phase of h along the critical line, lattice-crossing counts for
// line zeros, and the integer-point bookkeeping that feeds the lower bound
// N0'(T) >= phi(T)/pi - u +- + k.

#include <vector>

#include "critline/families.hpp"
#include "critline/numeric.hpp"

namespace critline::phase {

struct PhaseSample {
    double tau;
    double phi; // continuous arg h(a + i tau), phi(0) anchored
};

struct PhaseTrace {
    double a = 0.0;
    double tau_min = 0.0, tau_max = 0.0;
    std::vector<PhaseSample> samples; // ascending tau
    double tol = 1e-9;

    double phi_at(double tau) const; // linear interpolation
    double phi_end() const { return samples.back().phi; }
};

// trace arg h(a+i tau); anchored at tau = 0 with phi(0) = 0 in real mode
// (h(a) > 0 by family normalization) and phi(0) = Arg h(a) in conjugate mode.
// Steps start at 0.05 and halve whenever |delta phi| >= pi/2; reaching the
// step floor raises trace_error (a line zero of h).
PhaseTrace trace_phase(const families::SymmetricFamily& fam, double tau_min,
                       double tau_max, double tol = 1e-9);

struct CrossingList {
    long count = 0;                  // lattice crossings with tau in (tau_min, tau_max)
    std::vector<double> crossings;   // transversal crossing ordinates
    std::vector<double> tangential;  // lattice touches without a cell change
};

// line zeros of f from the trace: crossings of phi/pi through the integer
// lattice (minus) or half-integer lattice (plus); tau = 0 itself excluded
CrossingList count_line_zeros(const families::SymmetricFamily& fam,
                              const PhaseTrace& trace);

struct IntegerPointReport {
    std::vector<double> x;  // integer points of g, ascending (x >= tau_min)
    std::vector<long> g;    // integer values g(x_i)
    long c = 0;             // consecutive pairs with difference 0
    long d = 0;             // consecutive pairs with difference -1
    long k = 0;             // usable gap bound: c + 2d - g(x_1) (>= 0)
};

// integer points of g(tau) = phi(tau)/pi - offset along the trace
IntegerPointReport integer_point_report(const PhaseTrace& trace, double offset);

// d/dtau arg h(a+i tau) = Re (h'/h)(a + i tau), 5-point stencil
double phase_derivative(const families::SymmetricFamily& fam, double tau);

} // namespace critline::phase
