#pragma once

// Scalar special-function kernel: log-gamma, zeta and its completed forms,
// Dirichlet L and its completed form, and the modified Bessel K_s(2A).
// Everything returns a SpecialValue carrying a forward error estimate.

#include "critline/characters.hpp"
#include "critline/numeric.hpp"

namespace critline::specfun {

// principal branch on the cut plane C \ (-inf, 0]; on the negative real axis
// the limit from above is returned (so exp(log_gamma(x)) is the real Gamma(x)
// for non-integer x < 0); poles 0, -1, -2, ... throw pole_error
cplx log_gamma(cplx z);

// Riemann zeta; Euler-Maclaurin for Re s >= -1/2, reflection below
SpecialValue zeta(cplx s, EvalPrecision prec = {});

// zeta_n(s) = sum_{k<=n} k^{-s} - n^{1-s}/(1-s)
SpecialValue zeta_partial(cplx s, long n, EvalPrecision prec = {});

// Hurwitz zeta(s, x), 0 < x <= 1, Re s > -9 (Euler-Maclaurin range)
SpecialValue hurwitz_zeta(cplx s, double x, EvalPrecision prec = {});

// zeta*(s) = pi^{-s/2} Gamma(s/2) zeta(s); poles at 0 and 1
SpecialValue zeta_completed(cplx s, EvalPrecision prec = {});

// xi(s) = (1/2) s (s-1) zeta*(s), entire, xi(0) = xi(1) = 1/2
SpecialValue xi(cplx s, EvalPrecision prec = {});

// Dirichlet L(s, chi)
SpecialValue dirichlet_l(cplx s, const characters::DirichletCharacter& chi,
                         EvalPrecision prec = {});

// xi(s, chi) = (N/pi)^{s/2} Gamma((s+kappa)/2) L(s, chi); primitive chi,
// entire for non-principal chi; satisfies xi(s,chi) = eps(chi) xi(1-s,conj chi)
SpecialValue xi_chi(cplx s, const characters::DirichletCharacter& chi,
                    EvalPrecision prec = {});

// K_s(2A) with the integral normalization 2 K_s(2A) = int e^{-2A cosh t} e^{st} dt;
// series for small A away from integer s, double-exponential quadrature otherwise
SpecialValue bessel_k(cplx s, double A, EvalPrecision prec = {});

} // namespace critline::specfun
