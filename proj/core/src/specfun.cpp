#include "critline/specfun.hpp"

#include <cmath>

namespace critline::specfun {

namespace {

constexpr double half_log_2pi = 0.91893853320467274178;
constexpr double log_pi_const = 1.1447298858494001741;

// B_{2j} / ((2j)(2j-1)) for the Stirling series, j = 1..9
constexpr double stirling_c[9] = {
    1.0 / 12,         -1.0 / 360,         1.0 / 1260,
    -1.0 / 1680,      1.0 / 1188,         -691.0 / 360360,
    1.0 / 156,        -3617.0 / 122400,   43867.0 / 244188,
};

// B_{2j} / (2j)! for Euler-Maclaurin tails, j = 1..7; the last entry only
// feeds the remainder bound
constexpr double em_c[7] = {
    1.0 / 12,        -1.0 / 720,          1.0 / 30240,
    -1.0 / 1209600,  1.0 / 47900160,      -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
};
constexpr int em_terms = 6;

// Stieltjes constants gamma_0 .. gamma_7 for (s-1) zeta(s) near s = 1
constexpr double stieltjes[8] = {
    0.57721566490153286061,  -0.072815845483676724861,
    -0.0096903631928723184845, 0.0020538344203033458662,
    0.0023253700654673000575,  0.00079332381730106270175,
    -0.00023876934543019960987, -0.00052728956705775104607,
};

std::vector<long> prime_divisors(long n) {
    std::vector<long> ps;
    for (long p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

// value with exp(result) = sin w, stable for any |Im w|
cplx log_sin(cplx w) {
    double im = w.imag();
    if (im > 1.0) {
        // sin w = (i/2) e^{-iw} (1 - e^{2iw})
        cplx miw(im, -w.real()); // -i w
        cplx e2iw = std::exp(cplx(-2.0 * im, 2.0 * w.real()));
        return cplx(-0.69314718055994530942, 1.5707963267948966192) + miw +
               std::log(1.0 - e2iw);
    }
    if (im < -1.0) return std::conj(log_sin(std::conj(w)));
    return std::log(std::sin(w));
}

// stable (e^z - 1)/z
cplx phi1(cplx z) {
    if (std::abs(z) < 1e-4) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
    return (std::exp(z) - 1.0) / z;
}

// Euler-Maclaurin core for sum_{k>=0} (x+k)^{-s}; with deflate_pole the
// principal part 1/(s-1) is subtracted term-exactly, so character sums whose
// pole parts cancel stay evaluable through s = 1
SpecialValue hurwitz_em(cplx s, double x, const EvalPrecision& prec,
                        bool deflate_pole = false) {
    double sigma = s.real();
    long N = std::max<long>(24, std::lround(1.8 * (std::abs(s.imag()) + 8.0)));
    for (;;) {
        if (N > prec.max_terms) throw budget_error("zeta series budget exhausted");
        cplx sum = 0.0;
        for (long k = N - 1; k >= 0; --k) sum += std::exp(-s * std::log(x + double(k)));
        double M = x + double(N);
        cplx lM = std::log(cplx(M));
        cplx Mms = std::exp(-s * lM);
        cplx v = deflate_pole
                     ? sum - lM * phi1((1.0 - s) * lM) + 0.5 * Mms
                     : sum + std::exp((1.0 - s) * lM) / (s - 1.0) + 0.5 * Mms;
        cplx poch = s;        // (s)_1
        cplx Mpow = Mms / M;  // M^{-s-1}
        for (int j = 1; j <= em_terms; ++j) {
            v += em_c[j - 1] * poch * Mpow;
            poch *= (s + double(2 * j - 1)) * (s + double(2 * j));
            Mpow /= M * M;
        }
        // |R| <= |next term| |s + 2K + 1| / (sigma + 2K + 1)
        double rem = std::abs(em_c[em_terms]) * std::abs(poch) * std::abs(Mpow) *
                     std::abs(s + double(2 * em_terms + 1)) /
                     (sigma + double(2 * em_terms + 1));
        if (rem <= prec.target_abs_tol || 2 * N > prec.max_terms)
            return {v, rem + 2e-16 * (std::abs(v) + 1.0) * std::log2(double(N))};
        N *= 2;
    }
}

} // namespace

cplx log_gamma(cplx z) {
    if (!is_finite(z)) throw parameter_error("log_gamma of non-finite argument");
    if (z.imag() == 0.0) {
        double x = z.real();
        if (x <= 0.0 && x == std::floor(x))
            throw pole_error("log_gamma pole at a non-positive integer");
        z = cplx(x, +0.0); // approach the cut from above
    }
    if (z.real() < -1.0e5) throw parameter_error("log_gamma argument too far left");
    cplx shift = 0.0;
    while (z.real() < 16.0) {
        shift += std::log(z);
        z += 1.0;
    }
    cplx w = 1.0 / z, w2 = w * w;
    cplx ser = 0.0;
    for (int j = 8; j >= 0; --j) ser = ser * w2 + stirling_c[j];
    return (z - 0.5) * std::log(z) - z + half_log_2pi + ser * w - shift;
}

SpecialValue zeta(cplx s, EvalPrecision prec) {
    if (s == cplx(1.0)) throw pole_error("zeta pole at s = 1");
    if (s.real() >= -0.5) return hurwitz_em(s, 1.0, prec);
    // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s), in log space
    auto z1 = zeta(1.0 - s, prec);
    cplx w = 0.5 * pi_const * s;
    cplx ls = log_sin(w);
    cplx lf = s * 0.69314718055994530942 + (s - 1.0) * log_pi_const + ls +
              log_gamma(1.0 - s);
    cplx fac = std::exp(lf);
    // argument reduction of sin is only absolutely accurate: inflate the
    // relative term when the sine is small (near the trivial zeros)
    double sin_mag = std::max(std::exp(ls.real()), 1e-300);
    double rel = 1e-14 + std::abs(w) * 4e-16 * std::max(1.0, 1.0 / sin_mag);
    return {fac * z1.value,
            std::abs(fac) * (z1.est_error + std::abs(z1.value) * rel)};
}

SpecialValue zeta_partial(cplx s, long n, EvalPrecision prec) {
    if (n < 1) throw parameter_error("partial sum needs n >= 1");
    if (n > prec.max_terms) throw budget_error("partial sum budget exhausted");
    if (s == cplx(1.0)) throw pole_error("zeta_n pole at s = 1");
    cplx sum = 0.0;
    for (long k = n; k >= 2; --k) sum += std::exp(-s * std::log(double(k)));
    sum += 1.0;
    cplx corr = std::exp((1.0 - s) * std::log(double(n))) / (1.0 - s);
    double top = std::max(1.0, std::pow(double(n), -s.real()));
    return {sum - corr, 1.1e-16 * double(n) * top + 1e-16 * std::abs(corr)};
}

SpecialValue hurwitz_zeta(cplx s, double x, EvalPrecision prec) {
    if (!(x > 0.0) || x > 1.0) throw parameter_error("hurwitz_zeta needs 0 < x <= 1");
    if (s == cplx(1.0)) throw pole_error("hurwitz zeta pole at s = 1");
    if (s.real() <= -9.0) throw parameter_error("hurwitz_zeta limited to Re s > -9");
    return hurwitz_em(s, x, prec);
}

SpecialValue zeta_completed(cplx s, EvalPrecision prec) {
    if (s == cplx(0.0) || s == cplx(1.0)) throw pole_error("zeta* poles at 0 and 1");
    if (s.real() < 0.0) return zeta_completed(1.0 - s, prec);
    if (std::abs(s) < 0.05 || std::abs(s - 1.0) < 0.05) {
        auto x = xi(s, prec);
        cplx den = s * (s - 1.0);
        double ad = std::abs(den);
        return {2.0 * x.value / den, 2.0 * (x.est_error + 1e-16 * std::abs(x.value)) / ad};
    }
    auto z = zeta(s, prec);
    cplx fac = std::exp(log_gamma(0.5 * s) - 0.5 * s * log_pi_const);
    return {fac * z.value, std::abs(fac) * (z.est_error + std::abs(z.value) * 1e-14)};
}

SpecialValue xi(cplx s, EvalPrecision prec) {
    if (s.real() < 0.5) return xi(1.0 - s, prec);
    cplx pref = std::exp(log_gamma(0.5 * s + 1.0) - 0.5 * s * log_pi_const);
    if (std::abs(s - 1.0) < 0.05) {
        // (s-1) zeta(s) = 1 + sum (-1)^n gamma_n / n! (s-1)^{n+1}
        cplx d = s - 1.0;
        cplx ser = 1.0, dp = d;
        double fact = 1.0, sgn = 1.0;
        for (int n = 0; n < 8; ++n) {
            ser += sgn * stieltjes[n] / fact * dp;
            dp *= d;
            fact *= double(n + 1);
            sgn = -sgn;
        }
        double tail = std::pow(std::abs(d), 9.0) * 1e-3;
        return {pref * ser, std::abs(pref) * (tail + 1e-15 * std::abs(ser))};
    }
    auto z = zeta(s, prec);
    cplx v = (s - 1.0) * pref * z.value;
    return {v, std::abs((s - 1.0) * pref) * (z.est_error + std::abs(z.value) * 1e-14)};
}

SpecialValue dirichlet_l(cplx s, const characters::DirichletCharacter& chi,
                         EvalPrecision prec) {
    long N = chi.modulus();
    if (chi.is_principal()) {
        if (s == cplx(1.0)) throw pole_error("principal L inherits the zeta pole");
        auto z = zeta(s, prec);
        cplx fac = 1.0;
        for (long p : prime_divisors(N))
            fac *= 1.0 - std::exp(-s * std::log(double(p)));
        return {z.value * fac, std::abs(fac) * z.est_error + 1e-15 * std::abs(z.value * fac)};
    }
    if (s.real() >= -0.5) {
        // near s = 1 the per-term Hurwitz poles cancel across the character
        // sum; evaluate the deflated terms so nothing blows up
        bool deflate = std::abs(s - 1.0) < 0.05;
        cplx sum = 0.0;
        double est = 0.0;
        for (long a = 1; a <= N; ++a) {
            cplx c = chi(a);
            if (c == cplx(0.0)) continue;
            auto hz = hurwitz_em(s, double(a) / double(N), prec, deflate);
            sum += c * hz.value;
            est += hz.est_error;
        }
        cplx Npow = std::exp(-s * std::log(double(N)));
        return {Npow * sum, std::abs(Npow) * (est + 1e-15 * std::abs(sum))};
    }
    // functional equation on the primitive core, imprimitivity factors restored
    auto core = chi.primitive_core();
    int kap = core.kappa();
    long f = core.modulus();
    if (s.imag() == 0.0) {
        double v = 0.5 * (s.real() + double(kap));
        if (v <= 0.0 && v == std::floor(v)) return {0.0, 0.0}; // trivial zero
    }
    auto Lr = dirichlet_l(1.0 - s, core.conjugate(), prec);
    cplx eps = characters::root_number(core);
    cplx lf = (0.5 - s) * std::log(double(f) / pi_const) +
              log_gamma(0.5 * (1.0 - s + double(kap))) -
              log_gamma(0.5 * (s + double(kap)));
    cplx fac = eps * std::exp(lf);
    cplx local = 1.0;
    for (long p : prime_divisors(N)) {
        if (f % p == 0) continue;
        local *= 1.0 - core(p) * std::exp(-s * std::log(double(p)));
    }
    cplx v = fac * Lr.value * local;
    double rel = 1e-14 + std::abs(lf.imag()) * 2e-16;
    return {v, std::abs(fac * local) * (Lr.est_error + std::abs(Lr.value) * rel)};
}

SpecialValue xi_chi(cplx s, const characters::DirichletCharacter& chi,
                    EvalPrecision prec) {
    if (!chi.is_primitive() || chi.is_principal() || chi.modulus() == 1)
        throw primitivity_error("completed L needs a primitive non-principal character");
    int kap = chi.kappa();
    long N = chi.modulus();
    if (s.real() < -0.5 || std::abs(s + double(kap)) < 0.05) {
        auto r = xi_chi(1.0 - s, chi.conjugate(), prec);
        cplx eps = characters::root_number(chi);
        return {eps * r.value, r.est_error};
    }
    auto L = dirichlet_l(s, chi, prec);
    cplx pref = std::exp(0.5 * s * std::log(double(N) / pi_const) +
                         log_gamma(0.5 * (s + double(kap))));
    return {pref * L.value, std::abs(pref) * (L.est_error + std::abs(L.value) * 1e-14)};
}

SpecialValue bessel_k(cplx s, double A, EvalPrecision prec) {
    if (!(A > 0.0) || !std::isfinite(A)) throw parameter_error("bessel_k needs A > 0");
    if (!is_finite(s)) throw parameter_error("bessel_k of non-finite order");
    // positive-order asymptotic regime where the result underflows anyway
    double ai = std::abs(s.imag()), ar = std::abs(s.real());
    if (0.5 * pi_const * ai - (ar + 1.0) * (std::log1p(ai) + std::abs(std::log(A))) -
            2.0 * A > 750.0)
        return {0.0, 1e-300};
    double dist = std::hypot(s.real() - std::round(s.real()), s.imag());
    // the series also takes over at large |Im s|, where |m - s| >= A^2 + 8
    // keeps its terms strictly decreasing while the quadrature below would
    // drown in cancellation (absolute floor ~ e^{-2A} eps)
    if ((A <= 2.0 && dist > 0.05) || std::abs(s.imag()) >= A * A + 8.0) {
        // K_s(2A) = (1/2)[Gamma(s) A^{-s} S1 + Gamma(-s) A^{s} S2]
        cplx S1 = 1.0, S2 = 1.0, t1 = 1.0, t2 = 1.0;
        double A2 = A * A;
        for (int m = 1; m <= 600; ++m) {
            t1 *= A2 / (double(m) * (double(m) - s));
            t2 *= A2 / (double(m) * (double(m) + s));
            S1 += t1;
            S2 += t2;
            if (std::abs(t1) + std::abs(t2) <
                1e-18 * (std::abs(S1) + std::abs(S2)))
                break;
        }
        double lA = std::log(A);
        cplx g1 = std::exp(log_gamma(s) - s * lA) * S1;
        cplx g2 = std::exp(log_gamma(-s) + s * lA) * S2;
        return {0.5 * (g1 + g2), 2e-15 * (std::abs(g1) + std::abs(g2)) + 1e-300};
    }
    // trapezoid for 2 K_s(2A) = int exp(-2A cosh t + s t) dt
    double sig = ar;
    double L = -std::log(std::min(prec.target_abs_tol, 1e-13)) + 10.0;
    double tcut = 3.0;
    for (int it = 0; it < 50; ++it)
        tcut = std::acosh(std::max((2.0 * A + L + sig * tcut) / (2.0 * A), 1.001));
    tcut += 0.5;
    auto trap = [&](double hstep) {
        long n = long(std::ceil(tcut / hstep));
        cplx acc = std::exp(cplx(-2.0 * A, 0.0));
        for (long j = 1; j <= n; ++j) {
            double t = hstep * double(j);
            double c = -2.0 * A * std::cosh(t);
            acc += std::exp(c + s * t) + std::exp(c - s * t);
        }
        return 0.5 * hstep * acc;
    };
    double h0 = std::min(0.125, 2.0 / (std::abs(s.imag()) + 4.0));
    cplx c1 = trap(h0), c2 = trap(0.5 * h0);
    return {c2, std::abs(c2 - c1) / 3.0 + 1e-15 * std::abs(c2) + 1e-300};
}

} // namespace critline::specfun
