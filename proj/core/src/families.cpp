#include "critline/families.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <utility>

namespace critline::families {

namespace {

constexpr double kNoEnvelope = 1e9; // sentinel: formula not valid at this sigma
constexpr double kSafety = 2.0;     // global safety factor on every envelope

double real_zeta(double x) { return specfun::zeta(cplx(x, 0.0)).value.real(); }

// Gamma(num)/Gamma(den) for positive real arguments
double gamma_ratio(double num, double den) {
    return std::exp(std::lgamma(num) - std::lgamma(den));
}

// ---- complex polynomial helpers (the L-translate factor may be complex) ----

std::vector<cplx> ctrim(std::vector<cplx> c) {
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    if (c.empty()) c.push_back(0.0);
    return c;
}

cplx ceval(const std::vector<cplx>& c, cplx z) {
    cplx v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * z + c[i];
    return v;
}

// coefficients conjugated, argument as given
cplx ceval_bar(const std::vector<cplx>& c, cplx z) {
    cplx v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * z + std::conj(c[i]);
    return v;
}

std::vector<cplx> cderiv(const std::vector<cplx>& c) {
    std::vector<cplx> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(double(k) * c[k]);
    if (d.empty()) d.push_back(0.0);
    return d;
}

// Aberth-Ehrlich with Newton polish, same scheme as poly::roots
std::vector<cplx> croots(std::vector<cplx> c) {
    c = ctrim(c);
    int n = int(c.size()) - 1;
    if (n <= 0) return {};
    if (n > poly::max_root_degree)
        throw parameter_error("polynomial degree above root-finder cap");
    if (n == 1) return {-c[0] / c[1]};
    double R = 0.0;
    for (int k = 0; k < n; ++k) R = std::max(R, std::abs(c[k] / c[n]));
    R = 1.0 + R;
    std::vector<cplx> z(n);
    for (int j = 0; j < n; ++j)
        z[j] = std::polar(R * (0.4 + 0.6 * double(j + 1) / n),
                          2.0 * pi_const * j / n + 0.7);
    std::vector<cplx> d = cderiv(c);
    for (int iter = 0; iter < 400; ++iter) {
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            cplx pv = ceval(c, z[j]);
            cplx dv = ceval(d, z[j]);
            cplx ratio = dv == 0.0 ? cplx(0.0) : pv / dv;
            cplx sum = 0.0;
            for (int k = 0; k < n; ++k)
                if (k != j) sum += 1.0 / (z[j] - z[k]);
            cplx corr = ratio / (1.0 - ratio * sum);
            z[j] -= corr;
            worst = std::max(worst, std::abs(corr) / (1.0 + std::abs(z[j])));
        }
        if (worst < 1e-15) break;
    }
    for (int j = 0; j < n; ++j)
        for (int it = 0; it < 3; ++it) {
            cplx dv = ceval(d, z[j]);
            if (dv == 0.0) break;
            z[j] -= ceval(c, z[j]) / dv;
        }
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

// certified bound for |p(1-s)/p(s)| (or |pbar(1-s)/p(s)|) on Re s >= sigma:
// per root, |s-(1-r)| <= |s-r| + |1-2r|; negative return means "not valid"
double reflect_quotient_bound(const std::vector<cplx>& roots, double sigma) {
    double out = 1.0;
    for (cplx r : roots) {
        double gap = sigma - r.real();
        if (gap <= 0.05) return -1.0;
        out *= 1.0 + std::abs(1.0 - 2.0 * r) / gap;
    }
    return out;
}

// ---- Bessel-term sup for the g_class envelope ------------------------------
//
// |2 K_nu(2A)| <= |Gamma(nu)| A^{-Re nu} * Phi(A) with Phi the sup over the
// band 0.5 <= Re nu <= 40 of |2 K_nu(2A) A^nu / Gamma(nu)|.  The ratio levels
// off near 1 as |nu| grows (both series terms of K collapse onto the leading
// one), so a coarse grid reaching past the hump near |nu| ~ 2A suffices; the
// sampling margin is folded into the returned value.
double bessel_ratio_sup(double A) {
    static const double re_grid[] = {0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 30.0, 39.5};
    double best = 1.0;
    double ytop = std::max(32.0, 2.0 * A * A + 8.0);
    for (double x : re_grid) {
        double y = 0.0;
        while (y <= ytop) {
            cplx nu(x, y);
            SpecialValue K = specfun::bessel_k(nu, A);
            double g = 2.0 * std::abs(K.value) *
                       std::exp(x * std::log(A) - specfun::log_gamma(nu).real());
            best = std::max(best, g);
            y = y < 0.9 ? y + 0.45 : y * 1.6;
        }
    }
    return 1.15 * best;
}

// ---- far-field helpers for the Bessel-series families ----------------------

// log zeta(w) for Re w >= 4.4 via the Dirichlet tail
cplx log_zeta_tail(cplx w) {
    cplx sum = 0.0;
    for (long n = 2; n <= 5000; ++n) {
        double mag = std::pow(double(n), -w.real());
        if (mag < 1e-18) break;
        sum += std::exp(-w * std::log(double(n)));
    }
    return std::log(1.0 + sum);
}

// log(2 K_nu(2A)) through the ascending series
//   2 K_nu(2A) = Gamma(nu) A^{-nu} S1 + Gamma(-nu) A^{nu} S2,
// stable once |Im nu| is well above A^2 (the products never come near zero)
cplx log_bessel2k_far(cplx nu, double A) {
    cplx S1 = 1.0, S2 = 1.0, t1 = 1.0, t2 = 1.0;
    double A2 = A * A;
    for (int m = 1; m <= 80; ++m) {
        t1 *= A2 / (double(m) * (double(m) - nu));
        t2 *= A2 / (double(m) * (double(m) + nu));
        S1 += t1;
        S2 += t2;
        if (std::abs(t1) + std::abs(t2) < 1e-18) break;
    }
    cplx lgp = specfun::log_gamma(nu);
    cplx lgm = specfun::log_gamma(-nu);
    double lnA = std::log(A);
    cplx ratio = std::exp(lgm - lgp + 2.0 * nu * lnA) * S2 / S1;
    return lgp - nu * lnA + std::log(S1) + std::log(1.0 + ratio);
}

// f rescaled by the nonvanishing factor (2s-1) q(s) lambda^s zeta*(2s) on
// sigma > 1/2; stays representable at heights where f itself underflows.
// q (empty = 1) must not vanish in any far box handed to the result.
std::function<SpecialValue(cplx)>
make_far_field(double lam, std::shared_ptr<const std::vector<GClassEntry>> entries, Sign sign,
               poly::RealPolynomial q = {}) {
    double amax = 0.0;
    for (const auto& e : *entries) amax = std::max(amax, e.A);
    double tau_switch = std::max(60.0, 4.0 * amax * amax + 30.0);
    if (tau_switch > 330.0) return {}; // series/direct windows would not overlap
    double comb = sign == Sign::minus ? 1.0 : -1.0;
    double llam = std::log(lam);
    return [llam, entries, comb, tau_switch, q](cplx s) -> SpecialValue {
        double tau = std::abs(s.imag());
        if (tau <= tau_switch) {
            SpecialValue z1 = specfun::zeta_completed(2.0 * s);
            SpecialValue z2 = specfun::zeta_completed(2.0 * s - 1.0);
            cplx t1 = std::exp(s * llam) * z1.value;
            cplx t2 = std::exp((1.0 - s) * llam) * z2.value;
            if (!q.is_zero()) {
                t1 *= q.eval(s);
                t2 *= q.eval(1.0 - s);
            }
            cplx r1 = 0.0, r2 = 0.0;
            double est_r = 0.0;
            for (const auto& e : *entries) {
                SpecialValue K = specfun::bessel_k(s - 0.5, e.A);
                cplx lpow = std::exp((s - 0.5) * std::log(e.lambda));
                r1 += e.b * lpow * 2.0 * K.value;
                r2 += e.b / lpow * 2.0 * K.value;
                est_r += 2.0 * std::abs(e.b) * K.est_error *
                         (std::abs(lpow) + 1.0 / std::abs(lpow));
            }
            cplx den = t1;
            if (den == 0.0) throw error("far_field: normalizing factor vanished");
            cplx B = ((t1 + r1) + comb * (t2 + r2)) / den;
            double est = (z1.est_error * std::exp(s.real() * llam) * (1.0 + std::abs(B)) +
                          z2.est_error * std::exp((1.0 - s.real()) * llam) + est_r) /
                         std::abs(den);
            return {B, est};
        }
        if (s.real() < 2.2)
            throw error("far_field: the tall-box route needs Re s >= 2.2");
        double lpi = std::log(pi_const);
        cplx L1 = s * llam + specfun::log_gamma(s) - s * lpi + log_zeta_tail(2.0 * s);
        cplx L2 = (1.0 - s) * llam + specfun::log_gamma(s - 0.5) - (s - 0.5) * lpi +
                  log_zeta_tail(2.0 * s - 1.0);
        cplx r1 = 0.0, r2 = 0.0;
        for (const auto& e : *entries) {
            cplx l2k = log_bessel2k_far(s - 0.5, e.A);
            double lb = std::log(std::abs(e.b));
            double sb = e.b < 0.0 ? -1.0 : 1.0;
            double lle = std::log(e.lambda);
            r1 += sb * std::exp(lb + (s - 0.5) * lle + l2k - L1);
            r2 += sb * std::exp(lb + (0.5 - s) * lle + l2k - L2);
        }
        cplx E = std::exp(L2 - L1);
        if (!q.is_zero()) {
            cplx qs = q.eval(s);
            if (qs == 0.0) throw error("far_field: polynomial factor vanished in the far box");
            E *= q.eval(1.0 - s) / qs;
        }
        cplx B = (1.0 + r1) + comb * E * (1.0 + r2);
        double est = 1e-10 * (1.0 + std::abs(r1) + std::abs(E) * (1.0 + std::abs(r2)));
        return {B, est};
    };
}

// ---- catalog builders ------------------------------------------------------

SymmetricFamily make_zeta2(const Zeta2Params& p, Sign sign) {
    if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
        throw parameter_error("zeta2: alpha must be positive");
    if (p.beta == 0.0 || !std::isfinite(p.beta))
        throw parameter_error("zeta2: beta must be nonzero (h would vanish at s = 0)");
    SymmetricFamily fam;
    fam.name = "zeta2";
    fam.sign = sign;
    fam.a = 0.0;
    double alpha = p.alpha, beta = p.beta;
    fam.h = [alpha, beta](cplx s) -> SpecialValue {
        cplx v = std::exp(alpha * s) * (s - beta);
        return {v, 4e-16 * std::abs(v)};
    };
    fam.h_entire = true;
    fam.P_h_right = 0;
    fam.N_h_right = beta > 0.0 ? 1 : 0;
    fam.envelope = [alpha, beta](double sigma) {
        double ab = std::abs(beta);
        if (sigma <= ab + 1e-6) return kNoEnvelope;
        // |F| = e^{-2 alpha sigma} |s+beta|/|s-beta| <= e^{-2 alpha sigma}(1 + 2|beta|/(sigma-|beta|))
        return kSafety * std::exp(-2.0 * alpha * sigma) * (1.0 + 2.0 * ab / (sigma - ab));
    };
    fam.real_scan_limit = 2.0 * std::abs(beta) + 4.0;
    return fam;
}

SymmetricFamily make_translate(const TranslateParams& p, Sign sign) {
    if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
        throw parameter_error("zeta_translate: alpha must be positive");
    if (p.completed && std::abs(p.alpha - 0.5) < 1e-9)
        throw parameter_error("zeta_translate: alpha = 1/2 places a pole of h on the critical line");
    SymmetricFamily fam;
    fam.name = "zeta_translate";
    fam.sign = sign;
    fam.a = 0.5;
    double alpha = p.alpha;
    if (p.completed) {
        fam.h = [alpha](cplx s) { return specfun::zeta_completed(s + alpha); };
        fam.h_entire = false;
        fam.P_h_right = alpha < 0.5 ? 1 : 0;
        fam.N_h_right = alpha > 0.5 ? 0 : -1;
        fam.f_poles = {{cplx(-alpha, 0.0), 1},
                       {cplx(1.0 - alpha, 0.0), 1},
                       {cplx(alpha, 0.0), 1},
                       {cplx(1.0 + alpha, 0.0), 1}};
    } else {
        fam.h = [alpha](cplx s) { return specfun::xi(s + alpha); };
        fam.h_entire = true;
        fam.P_h_right = 0;
        fam.N_h_right = alpha >= 0.5 ? 0 : -1;
    }
    fam.envelope = [alpha](double sigma) {
        if (sigma - alpha <= 1.05) return kNoEnvelope;
        // |zeta*(s-alpha)/zeta*(s+alpha)| <= pi^alpha Gamma((sigma-alpha)/2)/Gamma((sigma+alpha)/2)
        //   * zeta(sigma-alpha) zeta(sigma+alpha) / zeta(2 sigma + 2 alpha);
        // the xi variant adds |(s-alpha)(s-1-alpha)| / |(s+alpha)(s-1+alpha)| <= 1 on sigma >= 1
        return kSafety * std::pow(pi_const, alpha) *
               gamma_ratio((sigma - alpha) / 2.0, (sigma + alpha) / 2.0) *
               real_zeta(sigma - alpha) * real_zeta(sigma + alpha) /
               real_zeta(2.0 * (sigma + alpha));
    };
    fam.real_scan_limit = std::max(12.0, 2.0 * alpha + 6.0);
    return fam;
}

SymmetricFamily make_eisenstein(const EisensteinParams& p, Sign sign) {
    if (!(p.y > 0.0) || !std::isfinite(p.y))
        throw parameter_error("eisenstein_a0: y must be positive");
    SymmetricFamily fam;
    fam.name = "eisenstein_a0";
    fam.sign = sign;
    fam.a = 0.5;
    double ly = std::log(p.y);
    fam.h = [ly](cplx s) -> SpecialValue {
        if (std::abs(s) < 1e-12)
            throw pole_error("eisenstein_a0: h has a simple pole at s = 0");
        SpecialValue x = specfun::xi(2.0 * s);
        cplx scale = std::exp(s * ly) / s;
        cplx v = x.value * scale;
        return {v, x.est_error * std::abs(scale) + 4e-16 * std::abs(v)};
    };
    fam.h_entire = false;
    fam.P_h_right = 0;
    fam.N_h_right = 0;
    fam.f_poles = {{cplx(0.0, 0.0), 1}, {cplx(1.0, 0.0), 1}};
    fam.envelope = [ly](double sigma) {
        if (2.0 * sigma - 1.0 <= 1.05) return kNoEnvelope;
        // the xi/s completion cancels exactly:
        // |F| = y^{1-2 sigma} sqrt(pi) |Gamma(s-1/2)/Gamma(s)| |zeta(2s-1)/zeta(2s)|
        return kSafety * std::exp((1.0 - 2.0 * sigma) * ly) * std::sqrt(pi_const) *
               gamma_ratio(sigma - 0.5, sigma) * real_zeta(2.0 * sigma - 1.0) *
               real_zeta(2.0 * sigma) / real_zeta(4.0 * sigma);
    };
    // a0(y,s) = zeta*(2s) y^s + zeta*(2-2s) y^{1-s} (plus sign flips the pairing);
    // analytic at s = 1/2 although both terms blow up, hence the stepped average
    auto h = fam.h;
    bool plus = sign == Sign::plus;
    fam.display = [ly, h, plus](cplx s) -> SpecialValue {
        if (std::abs(s) < 1e-9 || std::abs(s - 1.0) < 1e-9)
            throw pole_error("eisenstein_a0: a0 has simple poles at s = 0 and s = 1");
        if (std::abs(s - 0.5) < 0.012) {
            auto via_f = [&](cplx w) -> SpecialValue {
                SpecialValue hs = h(w), hr = h(1.0 - w);
                cplx fv = plus ? hs.value + hr.value : hs.value - hr.value;
                cplx den = 2.0 * w - 1.0;
                return {fv / den, (hs.est_error + hr.est_error) / std::abs(den)};
            };
            cplx eps(0.03, 0.0);
            SpecialValue u1 = via_f(s + eps), u2 = via_f(s - eps);
            cplx v = 0.5 * (u1.value + u2.value);
            return {v, 5e-4 * (1.0 + std::abs(v)) + 0.5 * (u1.est_error + u2.est_error)};
        }
        SpecialValue za = specfun::zeta_completed(2.0 * s);
        SpecialValue zb = specfun::zeta_completed(2.0 - 2.0 * s);
        cplx t1 = za.value * std::exp(s * ly);
        cplx t2 = zb.value * std::exp((1.0 - s) * ly);
        cplx v = plus ? t1 - t2 : t1 + t2;
        double est = za.est_error * std::exp(s.real() * ly) +
                     zb.est_error * std::exp((1.0 - s.real()) * ly) +
                     4e-16 * (std::abs(t1) + std::abs(t2));
        return {v, est};
    };
    fam.real_scan_limit = 6.0;
    return fam;
}

SymmetricFamily make_hpoly(const HPolyParams& par, Sign sign) {
    if (!(par.y > 0.0) || !std::isfinite(par.y))
        throw parameter_error("h_poly: y must be positive");
    poly::RealPolynomial p = par.p;
    p.trim();
    if (p.degree() < 1) throw parameter_error("h_poly: p must be nonconstant");
    double scale = 0.0;
    for (double ck : p.c) scale = std::max(scale, std::abs(ck));
    if (std::abs(p.eval(0.5)) > 1e-10 * scale)
        throw parameter_error("h_poly: p must vanish at s = 1/2 (p = (2s-1) q)");
    poly::RealPolynomial q = poly::deflate_linear(p, 0.5);
    for (double& ck : q.c) ck *= 0.5; // p = (2s-1) q
    std::vector<cplx> qroots = q.degree() >= 1 ? poly::roots(q) : std::vector<cplx>{};
    for (cplx r : qroots)
        if (std::abs(r.real() - 0.5) < 1e-9)
            throw parameter_error("h_poly: q = p/(2s-1) must not vanish on the critical line");
    double qscale = 0.0;
    for (double ck : q.c) qscale = std::max(qscale, std::abs(ck));
    bool pole_at_zero = std::abs(q.eval(0.0)) > 1e-12 * qscale;

    SymmetricFamily fam;
    fam.name = "h_poly";
    fam.sign = sign;
    fam.a = 0.5;
    double ly = std::log(par.y);
    if (pole_at_zero) {
        fam.h = [q, ly](cplx s) -> SpecialValue {
            if (std::abs(s) < 1e-12)
                throw pole_error("h_poly: h has a simple pole at s = 0");
            SpecialValue x = specfun::xi(2.0 * s);
            cplx scl = q.eval(s) * std::exp(s * ly) / s;
            cplx v = x.value * scl;
            return {v, x.est_error * std::abs(scl) + 4e-16 * std::abs(v)};
        };
        fam.f_poles = {{cplx(0.0, 0.0), 1}, {cplx(1.0, 0.0), 1}};
        fam.h_entire = false;
    } else {
        poly::RealPolynomial q_over_s = poly::deflate_linear(q, 0.0);
        fam.h = [q_over_s, ly](cplx s) -> SpecialValue {
            SpecialValue x = specfun::xi(2.0 * s);
            cplx scl = q_over_s.eval(s) * std::exp(s * ly);
            cplx v = x.value * scl;
            return {v, x.est_error * std::abs(scl) + 4e-16 * std::abs(v)};
        };
        fam.h_entire = true;
    }
    fam.P_h_right = 0;
    int nh = 0;
    for (cplx r : qroots)
        if (r.real() > 0.5 + 1e-9) ++nh;
    fam.N_h_right = nh;
    fam.envelope = [ly, qroots](double sigma) {
        if (2.0 * sigma - 1.0 <= 1.05) return kNoEnvelope;
        double rq = reflect_quotient_bound(qroots, sigma);
        if (rq < 0.0) return kNoEnvelope;
        return kSafety * rq * std::exp((1.0 - 2.0 * sigma) * ly) * std::sqrt(pi_const) *
               gamma_ratio(sigma - 0.5, sigma) * real_zeta(2.0 * sigma - 1.0) *
               real_zeta(2.0 * sigma) / real_zeta(4.0 * sigma);
    };
    double rmax = 1.0;
    for (cplx r : qroots) rmax = std::max(rmax, std::abs(r) + 1.0);
    fam.real_scan_limit = std::max(6.0, rmax + 2.0);
    if (par.y < 1.0) {
        // 0 < y < 1 pushes zeros arbitrarily far right; hunting them needs
        // the rescaled form at heights where f itself underflows
        auto no_entries = std::make_shared<const std::vector<GClassEntry>>();
        fam.far_field = make_far_field(par.y, no_entries, sign, q);
    }
    return fam;
}

SymmetricFamily make_weng(const WengParams& p, Sign sign) {
    if (!(p.T >= 1.0) || !std::isfinite(p.T))
        throw parameter_error("weng_truncated: T must be >= 1");
    SymmetricFamily fam;
    fam.name = "weng_truncated";
    fam.sign = sign;
    fam.a = 0.5;
    double T = p.T, lT = std::log(p.T);
    fam.h = [lT](cplx s) -> SpecialValue {
        SpecialValue x = specfun::xi(2.0 * s);
        cplx sc = std::exp(s * lT);
        cplx v = x.value * sc;
        return {v, x.est_error * std::abs(sc) + 4e-16 * std::abs(v)};
    };
    fam.h_entire = true;
    fam.P_h_right = 0;
    fam.N_h_right = 0;
    fam.envelope = [lT](double sigma) {
        if (2.0 * sigma - 1.0 <= 1.05) return kNoEnvelope;
        // |F| = T^{1-2 sigma} |(s-1)/s| sqrt(pi) |Gamma(s-1/2)/Gamma(s)| |zeta(2s-1)/zeta(2s)|
        return kSafety * std::exp((1.0 - 2.0 * sigma) * lT) * std::sqrt(pi_const) *
               gamma_ratio(sigma - 0.5, sigma) * real_zeta(2.0 * sigma - 1.0) *
               real_zeta(2.0 * sigma) / real_zeta(4.0 * sigma);
    };
    // Z^T(s) = zeta*(2s) T^{s-1}/(s-1) - zeta*(2-2s) T^{-s}/s, with
    // f = T (2s-1) s (s-1) Z^T; the ratio form bridges the removable point 1/2
    auto h = fam.h;
    bool plus = sign == Sign::plus;
    fam.display = [T, lT, h, plus](cplx s) -> SpecialValue {
        if (std::abs(s) < 1e-9 || std::abs(s - 1.0) < 1e-9)
            throw pole_error("weng_truncated: Z^T has simple poles at s = 0 and s = 1");
        if (std::abs(s - 0.5) < 0.012) {
            auto via_f = [&](cplx w) -> SpecialValue {
                SpecialValue hs = h(w), hr = h(1.0 - w);
                cplx fv = plus ? hs.value + hr.value : hs.value - hr.value;
                cplx den = T * (2.0 * w - 1.0) * w * (w - 1.0);
                return {fv / den, (hs.est_error + hr.est_error) / std::abs(den)};
            };
            cplx eps(0.03, 0.0);
            SpecialValue u1 = via_f(s + eps), u2 = via_f(s - eps);
            cplx v = 0.5 * (u1.value + u2.value);
            return {v, 5e-4 * (1.0 + std::abs(v)) + 0.5 * (u1.est_error + u2.est_error)};
        }
        SpecialValue za = specfun::zeta_completed(2.0 * s);
        SpecialValue zb = specfun::zeta_completed(2.0 - 2.0 * s);
        cplx t1 = za.value * std::exp((s - 1.0) * lT) / (s - 1.0);
        cplx t2 = zb.value * std::exp(-s * lT) / s;
        cplx v = plus ? t1 + t2 : t1 - t2;
        double est = za.est_error * std::abs(std::exp((s - 1.0) * lT) / (s - 1.0)) +
                     zb.est_error * std::abs(std::exp(-s * lT) / s) +
                     2e-14 * (std::abs(t1) + std::abs(t2));
        return {v, est};
    };
    fam.real_scan_limit = 6.0;
    return fam;
}

SymmetricFamily make_gclass_core(const GClassParams& par, Sign sign, const char* name) {
    if (!(par.lambda > 0.0) || !std::isfinite(par.lambda))
        throw parameter_error("g_class: lambda must be positive");
    std::vector<GClassEntry> kept;
    for (const auto& e : par.entries) {
        if (!(e.lambda > 0.0) || !(e.A > 0.0))
            throw parameter_error("g_class: entries need lambda_j > 0 and A_j > 0");
        if (e.b != 0.0) kept.push_back(e);
    }
    auto entries = std::make_shared<const std::vector<GClassEntry>>(std::move(kept));
    SymmetricFamily fam;
    fam.name = name;
    fam.sign = sign;
    fam.a = 0.5;
    double lam = par.lambda, llam = std::log(par.lambda);
    fam.h = [llam, entries](cplx s) -> SpecialValue {
        if (std::abs(s) < 1e-12)
            throw pole_error("g_class: h has a simple pole at s = 0");
        SpecialValue x = specfun::xi(2.0 * s);
        cplx scale = std::exp(s * llam) / s;
        cplx v = x.value * scale;
        double est = x.est_error * std::abs(scale);
        cplx pref = 2.0 * s - 1.0;
        for (const auto& e : *entries) {
            SpecialValue K = specfun::bessel_k(s - 0.5, e.A);
            cplx lpow = std::exp((s - 0.5) * std::log(e.lambda));
            cplx t = pref * e.b * lpow * 2.0 * K.value;
            v += t;
            est += std::abs(pref * e.b * lpow) * 2.0 * K.est_error;
        }
        return {v, est + 4e-16 * std::abs(v)};
    };
    fam.h_entire = false;
    fam.P_h_right = 0;
    fam.N_h_right = -1; // counted by rectangle winding when a bound is requested
    fam.f_poles = {{cplx(0.0, 0.0), 1}, {cplx(1.0, 0.0), 1}};

    auto phi = std::make_shared<std::vector<double>>(); // lazy per-entry sups
    fam.envelope = [lam, llam, entries, phi](double sigma) {
        if (sigma <= 1.03) return kNoEnvelope;
        if (phi->empty() && !entries->empty())
            for (const auto& e : *entries) phi->push_back(bessel_ratio_sup(e.A));
        double lpi = std::log(pi_const);
        double tbar = gamma_ratio(sigma - 0.5, sigma);
        double den = std::exp(sigma * (llam - lpi)) * real_zeta(4.0 * sigma) /
                     real_zeta(2.0 * sigma);
        double num = std::exp((1.0 - sigma) * llam + (0.5 - sigma) * lpi) *
                     real_zeta(2.0 * sigma - 1.0);
        for (std::size_t i = 0; i < entries->size(); ++i) {
            const auto& e = (*entries)[i];
            double Phi = (*phi)[i];
            num += 2.0 * std::abs(e.b) * std::pow(e.lambda * e.A, 0.5 - sigma) * Phi;
            den -= tbar * 2.0 * std::abs(e.b) * std::pow(e.lambda / e.A, sigma - 0.5) * Phi;
        }
        if (den <= 0.0) return kNoEnvelope;
        return kSafety * tbar * num / den;
    };
    fam.far_field = make_far_field(lam, entries, sign);

    // display: the Bessel-series normal form; analytic at 1/2 after the two
    // leading poles cancel, so that point is bridged through f
    auto h = fam.h;
    bool plus = sign == Sign::plus;
    double dsgn = plus ? -1.0 : 1.0;
    fam.display = [lam, llam, entries, h, plus, dsgn](cplx s) -> SpecialValue {
        double lpi = std::log(pi_const);
        if (std::abs(s.imag()) < 1e-12 && s.real() < 0.3 &&
            std::abs(s.real() - std::round(s.real())) < 1e-9) {
            // 1/Gamma(s) kills everything except the first term
            SpecialValue z = specfun::zeta(2.0 * s);
            cplx v = z.value * std::exp(s * llam);
            return {v, z.est_error * std::exp(s.real() * llam) + 4e-16 * std::abs(v)};
        }
        auto via_f = [&](cplx w) -> SpecialValue {
            SpecialValue hs = h(w), hr = h(1.0 - w);
            cplx fv = plus ? hs.value + hr.value : hs.value - hr.value;
            cplx g = std::exp(w * lpi - specfun::log_gamma(w)) / (2.0 * w - 1.0);
            return {fv * g, (hs.est_error + hr.est_error) * std::abs(g)};
        };
        if (std::abs(s - 0.5) < 0.012) {
            cplx eps(0.03, 0.0);
            SpecialValue u1 = via_f(s + eps), u2 = via_f(s - eps);
            cplx v = 0.5 * (u1.value + u2.value);
            return {v, 5e-4 * (1.0 + std::abs(v)) + 0.5 * (u1.est_error + u2.est_error)};
        }
        if (std::abs(s.imag()) < 0.01 && s.real() < 0.4) {
            double frac = s.real() - (std::round(s.real() - 0.5) + 0.5);
            if (std::abs(frac) < 0.01) return via_f(s); // Gamma(s-1/2) pole, G finite
        }
        SpecialValue za = specfun::zeta(2.0 * s);
        SpecialValue zb = specfun::zeta(2.0 * s - 1.0);
        cplx lgs = specfun::log_gamma(s);
        cplx tb = std::exp(specfun::log_gamma(s - 0.5) - lgs);
        cplx t1 = za.value * std::exp(s * llam);
        cplx t2 = std::sqrt(pi_const) * tb * zb.value * std::exp((1.0 - s) * llam);
        cplx v = t1 + dsgn * t2;
        double est = za.est_error * std::exp(s.real() * llam) +
                     zb.est_error * std::abs(std::sqrt(pi_const) * tb) *
                         std::exp((1.0 - s.real()) * llam) +
                     4e-16 * (std::abs(t1) + std::abs(t2));
        cplx pref = std::exp(s * lpi - lgs);
        for (const auto& e : *entries) {
            SpecialValue K = specfun::bessel_k(s - 0.5, e.A);
            cplx lpow = std::exp((s - 0.5) * std::log(e.lambda));
            cplx pair = lpow + dsgn / lpow;
            cplx t = pref * e.b * pair * 2.0 * K.value;
            v += t;
            est += std::abs(pref * e.b) * (std::abs(lpow) + 1.0 / std::abs(lpow)) *
                   2.0 * K.est_error;
        }
        return {v, est + 4e-16 * std::abs(v)};
    };
    fam.real_scan_limit = 8.0;
    return fam;
}

SymmetricFamily make_epstein(const EpsteinParams& par, Sign sign) {
    GClassParams g = epstein_to_gclass(par.Q, par.n);
    SymmetricFamily fam = make_gclass_core(g, sign, "epstein_partial");
    // Z_{Q,n}(s) = 2 (sqrt(Delta)/2)^{-s} G(s)
    double lhalf = std::log(std::sqrt(par.Q.discriminant4()) / 2.0);
    auto gdisp = fam.display;
    fam.display = [gdisp, lhalf](cplx s) -> SpecialValue {
        SpecialValue g = gdisp(s);
        cplx sc = 2.0 * std::exp(-s * lhalf);
        return {g.value * sc, g.est_error * std::abs(sc)};
    };
    return fam;
}

SymmetricFamily make_ltranslate(const LTranslateParams& par, Sign sign) {
    if (!(par.alpha > 0.0) || !std::isfinite(par.alpha))
        throw parameter_error("l_translate: alpha must be positive");
    const auto& chi = par.chi;
    if (chi.is_principal())
        throw parameter_error("l_translate: chi must be non-principal");
    if (!chi.is_primitive())
        throw parameter_error("l_translate: chi must be primitive");
    std::vector<cplx> pc = ctrim(par.p);
    if (pc.size() == 1 && pc[0] == cplx(0.0))
        throw parameter_error("l_translate: p must be nonzero");
    double alpha = par.alpha;
    cplx eps = characters::root_number(chi);
    cplx phase = std::polar(1.0, -0.5 * std::arg(eps)); // e^{-i theta}, eps = e^{2 i theta}
    auto chip = std::make_shared<const characters::DirichletCharacter>(chi);

    SymmetricFamily fam;
    fam.name = "l_translate";
    fam.sign = sign;
    fam.mode = Mode::conjugate_twosided;
    fam.a = 0.5;
    // with this phase, conj(h(1 - conj s)) = e^{-i theta} pbar(1-s) xi(s-alpha, chi),
    // so f is e^{-i theta} times the displayed combination
    fam.h = [alpha, phase, chip, pc](cplx s) -> SpecialValue {
        SpecialValue x = specfun::xi_chi(s + alpha, *chip);
        cplx pv = ceval(pc, s);
        cplx v = phase * pv * x.value;
        return {v, x.est_error * std::abs(pv) + 4e-16 * std::abs(v)};
    };
    fam.h_entire = true;
    fam.P_h_right = 0;
    std::vector<cplx> proots = pc.size() >= 2 ? croots(pc) : std::vector<cplx>{};
    int npr = 0;
    for (cplx r : proots)
        if (r.real() > 0.5 + 1e-9) ++npr;
    fam.N_h_right = alpha >= 0.5 ? npr : -1;
    double N = double(chi.modulus());
    int kap = chi.kappa();
    fam.envelope = [alpha, N, kap, proots](double sigma) {
        if (sigma - alpha <= 1.05) return kNoEnvelope;
        double rp = reflect_quotient_bound(proots, sigma);
        if (rp < 0.0) return kNoEnvelope;
        return kSafety * rp * std::pow(N / pi_const, -alpha) *
               gamma_ratio((sigma - alpha + kap) / 2.0, (sigma + alpha + kap) / 2.0) *
               real_zeta(sigma - alpha) * real_zeta(sigma + alpha) /
               real_zeta(2.0 * (sigma + alpha));
    };
    bool plus = sign == Sign::plus;
    fam.display = [alpha, chip, pc, plus](cplx s) -> SpecialValue {
        SpecialValue x1 = specfun::xi_chi(s + alpha, *chip);
        SpecialValue x2 = specfun::xi_chi(s - alpha, *chip);
        cplx c1 = ceval(pc, s), c2 = ceval_bar(pc, 1.0 - s);
        cplx t1 = c1 * x1.value, t2 = c2 * x2.value;
        cplx v = plus ? t1 + t2 : t1 - t2;
        return {v, x1.est_error * std::abs(c1) + x2.est_error * std::abs(c2) +
                       4e-16 * std::abs(v)};
    };
    fam.real_scan_limit = alpha + 8.0;
    return fam;
}

SymmetricFamily make_custom(const CustomParams& par, Sign sign) {
    const MeromorphicSpec& m = par.h;
    if (!m.eval) throw parameter_error("custom: missing evaluator");
    SymmetricFamily fam;
    fam.name = m.description.empty() ? "custom" : m.description;
    fam.sign = sign;
    fam.mode = m.real_on_real ? Mode::real_onesided : Mode::conjugate_twosided;
    fam.a = m.axis;
    if (!m.line_points.empty() && m.factor_out_line_points) {
        auto pts = std::make_shared<const std::vector<std::pair<cplx, int>>>(m.line_points);
        auto base = m.eval;
        fam.h = [base, pts](cplx s) -> SpecialValue {
            SpecialValue v = base(s);
            cplx out = v.value;
            double fac = 1.0;
            for (const auto& [p, k] : *pts) {
                cplx d = s - p;
                for (int i = 0; i < k; ++i) out /= d;
                for (int i = 0; i < -k; ++i) out *= d;
                fac *= std::pow(std::abs(d), double(-k));
            }
            return {out, v.est_error * fac + 4e-16 * std::abs(out)};
        };
    } else {
        fam.h = m.eval;
    }
    fam.h_entire = m.poles.empty();
    fam.N_h_right = m.zeros_right;
    int ph = 0;
    for (const auto& [p, k] : m.poles)
        if (p.real() > m.axis + 1e-12) ph += k;
    fam.P_h_right = ph;
    // poles of f: declared poles of h plus their reflections, order-merged
    std::vector<std::pair<cplx, int>> fp = m.poles;
    for (const auto& [p, k] : m.poles) {
        cplx q = fam.mode == Mode::conjugate_twosided ? 2.0 * m.axis - std::conj(p)
                                                      : 2.0 * m.axis - p;
        bool merged = false;
        for (auto& [loc, ord] : fp)
            if (std::abs(loc - q) < 1e-9) {
                ord = std::max(ord, k);
                merged = true;
                break;
            }
        if (!merged) fp.push_back({q, k});
    }
    fam.f_poles = std::move(fp);
    if (m.envelope) {
        auto env = m.envelope;
        fam.envelope = [env](double sigma) { return kSafety * env(sigma); };
    }
    return fam;
}

std::function<SpecialValue(cplx)> make_f(std::function<SpecialValue(cplx)> h,
                                         double a, Sign sign, Mode mode) {
    bool plus = sign == Sign::plus;
    bool conj = mode == Mode::conjugate_twosided;
    return [h = std::move(h), a, plus, conj](cplx s) -> SpecialValue {
        SpecialValue hs = h(s);
        SpecialValue hr = conj ? h(2.0 * a - std::conj(s)) : h(2.0 * a - s);
        cplx rv = conj ? std::conj(hr.value) : hr.value;
        cplx v = plus ? hs.value + rv : hs.value - rv;
        return {v, hs.est_error + hr.est_error + 4e-16 * std::abs(v)};
    };
}

// ---- key=value parsing ------------------------------------------------------

std::string lower_trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

std::string trim_only(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

std::string normalize_family_name(std::string t) {
    t = lower_trim(t);
    std::replace(t.begin(), t.end(), '-', '_');
    if (t == "zeta2" || t == "zeta_2") return "zeta2";
    if (t == "zeta_translate" || t == "translate") return "zeta_translate";
    if (t == "eisenstein_a0" || t == "eisenstein") return "eisenstein_a0";
    if (t == "h_poly" || t == "hpoly") return "h_poly";
    if (t == "weng_truncated" || t == "weng") return "weng_truncated";
    if (t == "epstein_partial" || t == "epstein") return "epstein_partial";
    if (t == "g_class" || t == "gclass") return "g_class";
    if (t == "l_translate" || t == "ltranslate") return "l_translate";
    if (t == "custom") return "custom";
    throw parameter_error("unknown family: " + t);
}

bool parse_bool(const std::string& raw) {
    std::string t = lower_trim(raw);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw parameter_error("bad boolean: " + raw);
}

Sign parse_sign(const std::string& raw) {
    std::string t = lower_trim(raw);
    if (t == "plus" || t == "+") return Sign::plus;
    if (t == "minus" || t == "-") return Sign::minus;
    throw parameter_error("bad sign (want plus or minus): " + raw);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

// ---- SymmetricFamily members -------------------------------------------------

SpecialValue SymmetricFamily::ratio_F(cplx s) const {
    SpecialValue hs = h(s);
    bool cj = mode == Mode::conjugate_twosided;
    SpecialValue hr = cj ? h(2.0 * a - std::conj(s)) : h(2.0 * a - s);
    cplx top = cj ? std::conj(hr.value) : hr.value;
    double mag = std::abs(hs.value);
    if (!is_finite(hs.value) || mag < std::max(1e-290, 10.0 * hs.est_error))
        throw error(name + ": h(s) below noise floor, perturb the sample point");
    cplx v = top / hs.value;
    return {v, (hr.est_error + std::abs(v) * hs.est_error) / mag};
}

int SymmetricFamily::P_f_right() const {
    int n = 0;
    for (const auto& [p, k] : f_poles)
        if (p.real() > a + 1e-12) n += k;
    return n;
}

// ---- public entry points -----------------------------------------------------

SymmetricFamily build_family(const FamilySpec& spec) {
    SymmetricFamily fam = std::visit(
        [&](const auto& par) -> SymmetricFamily {
            using T = std::decay_t<decltype(par)>;
            if constexpr (std::is_same_v<T, Zeta2Params>) return make_zeta2(par, spec.sign);
            else if constexpr (std::is_same_v<T, TranslateParams>) return make_translate(par, spec.sign);
            else if constexpr (std::is_same_v<T, EisensteinParams>) return make_eisenstein(par, spec.sign);
            else if constexpr (std::is_same_v<T, HPolyParams>) return make_hpoly(par, spec.sign);
            else if constexpr (std::is_same_v<T, WengParams>) return make_weng(par, spec.sign);
            else if constexpr (std::is_same_v<T, EpsteinParams>) return make_epstein(par, spec.sign);
            else if constexpr (std::is_same_v<T, GClassParams>) return make_gclass_core(par, spec.sign, "g_class");
            else if constexpr (std::is_same_v<T, LTranslateParams>) return make_ltranslate(par, spec.sign);
            else return make_custom(par, spec.sign);
        },
        spec.params);
    if (spec.conjugated) fam.mode = Mode::conjugate_twosided;
    fam.u = fam.sign == Sign::plus ? Rational(1, 2) : Rational(1);
    fam.f = make_f(fam.h, fam.a, fam.sign, fam.mode);
    if (!fam.display) fam.display = fam.f;

    SpecialValue ha = fam.h(cplx(fam.a, 0.0));
    if (!is_finite(ha.value) ||
        std::abs(ha.value) <= std::max(1e-300, 10.0 * ha.est_error))
        throw parameter_error(fam.name +
                              ": h vanishes at the symmetry point (hypothesis h(a) != 0)");
    if (fam.mode == Mode::real_onesided) {
        if (std::abs(ha.value.imag()) > 1e-8 * (1.0 + std::abs(ha.value.real())))
            throw error(fam.name + ": h is not real on the real axis");
        fam.phase_sign = ha.value.real() > 0.0 ? 1.0 : -1.0;
    }
    return fam;
}

double stirling_envelope(const SymmetricFamily& fam, double sigma) {
    if (!fam.envelope)
        throw envelope_error(fam.name + ": no envelope data for this family");
    double v = fam.envelope(sigma);
    if (v >= kNoEnvelope)
        throw envelope_error(fam.name + ": envelope formula not valid at sigma = " +
                             std::to_string(sigma));
    return v;
}

double choose_sigma0(const SymmetricFamily& fam, double cap) {
    if (!fam.envelope)
        throw envelope_error(fam.name + ": no envelope data for this family");
    for (double x = fam.a + 0.6; x <= cap + 1e-9; x += 0.25)
        if (fam.envelope(x) < 0.5) return x;
    if (fam.envelope(cap) < 1.0) return cap;
    throw envelope_error(fam.name + ": envelope stays above 1 up to the sigma cap");
}

double parse_real_token(const std::string& text) {
    std::string t = trim_only(text);
    if (t.find(',') != std::string::npos && t.find('.') == std::string::npos)
        std::replace(t.begin(), t.end(), ',', '.');
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw parameter_error("bad numeric token: " + text);
    }
    if (pos != t.size()) throw parameter_error("bad numeric token: " + text);
    return v;
}

FamilySpec parse_family_kv(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : kv) {
        std::string key = lower_trim(k);
        if (m.count(key)) throw parameter_error("duplicate key: " + key);
        m[key] = trim_only(v);
    }
    auto need = [&](const char* k) -> const std::string& {
        auto it = m.find(k);
        if (it == m.end()) throw parameter_error(std::string("missing key: ") + k);
        return it->second;
    };
    std::string fname = normalize_family_name(need("family"));

    FamilySpec spec;
    if (m.count("sign")) spec.sign = parse_sign(m["sign"]);
    if (m.count("conjugated")) spec.conjugated = parse_bool(m["conjugated"]);

    if (fname == "zeta2") {
        spec.params = Zeta2Params{parse_real_token(need("alpha")),
                                  parse_real_token(need("beta"))};
    } else if (fname == "zeta_translate") {
        TranslateParams p{parse_real_token(need("alpha")), true};
        if (m.count("completed")) p.completed = parse_bool(m["completed"]);
        spec.params = p;
    } else if (fname == "eisenstein_a0") {
        spec.params = EisensteinParams{parse_real_token(need("y"))};
    } else if (fname == "h_poly") {
        spec.params = HPolyParams{parse_real_token(need("y")),
                                  poly::parse_coeff_list(need("p"))};
    } else if (fname == "weng_truncated") {
        spec.params = WengParams{parse_real_token(need("t"))};
    } else if (fname == "epstein_partial") {
        auto parts = split(need("q"), ',');
        if (parts.size() != 3)
            throw parameter_error("epstein_partial: q wants three comma-separated values a,b,c");
        QuadraticForm Q{parse_real_token(parts[0]), parse_real_token(parts[1]),
                        parse_real_token(parts[2])};
        long n = 0;
        try {
            n = std::stol(need("n"));
        } catch (const std::exception&) {
            throw parameter_error("epstein_partial: bad n");
        }
        spec.params = EpsteinParams{Q, int(n)};
    } else if (fname == "g_class") {
        GClassParams p;
        p.lambda = parse_real_token(need("lambda"));
        for (const std::string& raw : split(need("entries"), ';')) {
            std::string t = trim_only(raw);
            if (t.empty()) continue;
            auto parts = split(t, ':');
            if (parts.size() != 3)
                throw parameter_error("g_class: entry wants b:lambda:A, got " + raw);
            p.entries.push_back({parse_real_token(parts[0]), parse_real_token(parts[1]),
                                 parse_real_token(parts[2])});
        }
        spec.params = std::move(p);
    } else if (fname == "l_translate") {
        LTranslateParams p{parse_real_token(need("alpha")),
                           characters::character_from_label(need("chi")),
                           {cplx(1.0, 0.0)}};
        if (m.count("p")) {
            poly::RealPolynomial rp = poly::parse_coeff_list(m["p"]);
            p.p.assign(rp.c.begin(), rp.c.end());
        }
        spec.params = std::move(p);
    } else {
        throw parameter_error("custom families are constructed through the API, not key=value files");
    }
    return spec;
}

FamilySpec parse_family_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open family file: " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim_only(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parameter_error("family file line without '=': " + line);
        kv.push_back({line.substr(0, eq), line.substr(eq + 1)});
    }
    return parse_family_kv(kv);
}

GClassParams epstein_to_gclass(const QuadraticForm& Q, int n) {
    if (!(Q.a > 0.0) || !(Q.discriminant4() > 0.0))
        throw parameter_error("epstein_partial: form must be positive definite");
    if (n < 0 || n > 512) throw parameter_error("epstein_partial: n out of range");
    GClassParams g;
    double Delta = Q.discriminant4();
    g.lambda = std::sqrt(Delta) / (2.0 * Q.a);
    double ball = std::sqrt(2.0) * std::pow(Delta, 0.25) / std::sqrt(Q.a);
    for (int k = 1; k <= n; ++k) {
        double ck = std::cos(pi_const * double(k) * Q.b / Q.a);
        double A = pi_const * double(k) * g.lambda;
        for (int d = 1; d * d <= k; ++d) {
            if (k % d) continue;
            double w = d * d == k ? 0.5 : 1.0;
            double b = ball * ck * w;
            if (std::abs(b) < 1e-300) continue;
            g.entries.push_back({b, double(d) * double(d) / double(k), A});
        }
    }
    return g;
}

} // namespace critline::families
