#pragma once

// Hurwitz stability, the Hermite-Biehler even/odd split, interlacing, and
// the perturbed family y^s p(s) +- y^{-s} p(-s) whose zeros sit on the
// imaginary axis for stable p and y >= 1.

#include <cstdint>
#include <vector>

#include "critline/families.hpp"
#include "critline/poly.hpp"
#include "critline/winding.hpp"

namespace critline::stability {

// all roots strictly in the open left half plane (Stodola necessary
// condition short-circuits: same-sign coefficients)
bool is_stable(const poly::RealPolynomial& p);

// necessary condition only: all coefficients nonzero and of one sign
bool stodola(const poly::RealPolynomial& p);

struct HBSplit {
    poly::RealPolynomial q; // even part:  p(z) = q(z^2) + z r(z^2)
    poly::RealPolynomial r;
};
HBSplit hb_split(const poly::RealPolynomial& p);

// roots of q and r all real, negative, simple and strictly interlacing
bool interlacing_check(const poly::RealPolynomial& q, const poly::RealPolynomial& r);

// limit of arg p(i tau) as tau -> infinity is n pi/2 for stable p; returns
// the traced arg at tau_probe for comparison
double phase_limit_probe(const poly::RealPolynomial& p, double tau_probe = 1e3);

// count report for f(s) = y^s p(s) - y^{-s} p(-s) (and the + sign checked
// internally): all zeros on the axis with the window
// 0 <= N(y;T) - (T/pi) log y + u < deg p / 2 + 1
// (the count is a ceiling of the traced phase, so the window carries the
// integrality defect; the midpoint form without the +1 can fail by < 1)
winding::CountReport perturbed_family_check(const poly::RealPolynomial& p,
                                            double y, double T);

// sampled |h(2a-s)/h(s)| < 1 on sigma > a plus increasing phase; not a proof
// (points come from a deterministic low-discrepancy sequence)
bool copiado_check(const families::MeromorphicSpec& h, int samples);

// sampled |h(s-alpha)/h(s+alpha)| < 1 for sigma > a given the symmetry
// conj h(2a - conj s) = e^{i theta} h(s) and zeros confined to |sigma-a| < b
bool shift_ratio_check(const families::MeromorphicSpec& h, double alpha, double b,
                       int samples);

// deterministic corpora for the Hermite-Biehler acceptance sweep
poly::RealPolynomial random_stable(uint64_t seed, int max_degree = 8);
poly::RealPolynomial random_unstable(uint64_t seed, int max_degree = 8);

} // namespace critline::stability
