#include "critline/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace critline::stability {

namespace {

constexpr double kNoiseFloor = 1e-290;

// R2 low-discrepancy sequence (plastic constant), the 2-D sampling grid for
// the ratio checks
void r2_point(long k, double& u, double& v) {
    constexpr double a1 = 0.7548776662466927;
    constexpr double a2 = 0.5698402909980532;
    double iu, iv;
    u = std::modf(k * a1, &iu);
    v = std::modf(k * a2, &iv);
}

struct XorShift {
    uint64_t x;
    explicit XorShift(uint64_t seed) : x(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    uint64_t next() {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        return x;
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (double)(next() >> 11) * 0x1.0p-53;
    }
    long pick(long n) { return (long)(next() % (uint64_t)n); }
};

} // namespace

bool stodola(const poly::RealPolynomial& p) {
    poly::RealPolynomial q = p;
    q.trim();
    int n = q.degree();
    if (n < 0) return false;
    double sign = q.c[n] > 0 ? 1.0 : -1.0;
    for (int i = 0; i <= n; ++i)
        if (q.c[i] * sign <= 0.0) return false;
    return true;
}

bool is_stable(const poly::RealPolynomial& p) {
    poly::RealPolynomial q = p;
    q.trim();
    if (q.is_zero()) throw parameter_error("is_stable: zero polynomial");
    if (q.degree() == 0) return true;
    if (!stodola(q)) return false;
    for (cplx r : poly::roots(q))
        if (r.real() >= -1e-9 * (1.0 + std::abs(r))) return false;
    return true;
}

HBSplit hb_split(const poly::RealPolynomial& p) {
    HBSplit sp;
    for (std::size_t i = 0; i < p.c.size(); ++i) {
        if (i % 2 == 0) sp.q.c.push_back(p.c[i]);
        else sp.r.c.push_back(p.c[i]);
    }
    sp.q.trim();
    sp.r.trim();
    return sp;
}

bool interlacing_check(const poly::RealPolynomial& q, const poly::RealPolynomial& r) {
    struct Labeled {
        double x;
        int who;
    };
    std::vector<Labeled> all;
    for (int who = 0; who < 2; ++who) {
        const poly::RealPolynomial& p = who == 0 ? q : r;
        if (p.is_zero()) continue;
        if (p.degree() == 0) continue;
        for (cplx z : poly::roots(p)) {
            if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z))) return false;
            if (z.real() >= -1e-9 * (1.0 + std::abs(z))) return false;
            all.push_back({z.real(), who});
        }
    }
    if (all.size() <= 1) return true;
    std::sort(all.begin(), all.end(),
              [](const Labeled& u, const Labeled& v) { return u.x > v.x; });
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        if (all[i].who == all[i + 1].who) return false; // same family adjacent
        if (all[i].x - all[i + 1].x <= 1e-9 * (1.0 + std::abs(all[i].x)))
            return false; // not simple / not separated
    }
    return true;
}

double phase_limit_probe(const poly::RealPolynomial& p, double tau_probe) {
    poly::RealPolynomial q = p;
    q.trim();
    if (q.is_zero()) throw parameter_error("phase_limit_probe: zero polynomial");
    double tau0 = 0.0;
    cplx w0 = q.eval(cplx(0.0, tau0));
    if (w0 == cplx(0.0)) {
        tau0 = 1e-9 * (1.0 + tau_probe);
        w0 = q.eval(cplx(0.0, tau0));
        if (w0 == cplx(0.0)) throw parameter_error("phase_limit_probe: zero at the origin");
    }
    double phi = std::arg(w0);
    cplx prev = w0;
    double tau = tau0;
    double step = tau_probe / 8192.0;
    while (tau < tau_probe) {
        double next = std::min(tau + step, tau_probe);
        cplx w = q.eval(cplx(0.0, next));
        if (w == cplx(0.0)) {
            step *= 0.5;
            if (step < 1e-13 * (1.0 + tau))
                throw parameter_error("phase_limit_probe: root on the imaginary axis");
            continue;
        }
        double d = std::arg(w / prev);
        if (std::abs(d) >= pi_const / 2) {
            step *= 0.5;
            if (step < 1e-13 * (1.0 + tau))
                throw parameter_error("phase_limit_probe: root on the imaginary axis");
            continue;
        }
        tau = next;
        phi += d;
        prev = w;
        if (std::abs(d) < 0.25) step = std::min(step * 1.7, tau_probe / 512.0);
    }
    return phi;
}

winding::CountReport perturbed_family_check(const poly::RealPolynomial& p, double y,
                                            double T) {
    poly::RealPolynomial pp = p;
    pp.trim();
    if (!(y >= 1.0)) throw parameter_error("perturbed_family_check: needs y >= 1");
    if (!is_stable(pp))
        throw parameter_error("perturbed_family_check: p must be Hurwitz stable");
    const int n = pp.degree();
    const double log_y = std::log(y);

    families::MeromorphicSpec spec;
    spec.axis = 0.0;
    spec.real_on_real = true;
    spec.zeros_right = 0; // stable: no zeros with sigma > 0
    spec.description = "y^s p(s), p Hurwitz stable";
    spec.eval = [pp, log_y](cplx s) {
        cplx v = std::exp(s * log_y) * pp.eval(s);
        return SpecialValue{v, 1e-15 * (3.0 + pp.c.size()) * std::abs(v)};
    };
    // |p(-s)/p(s)| < 1 on sigma > 0 for stable p (each root factor satisfies
    // |s + r| < |s - r| there), so y^{-2 sigma} alone bounds |h(-s)/h(s)|
    spec.envelope = [log_y](double x) { return std::exp(-2.0 * x * log_y); };

    winding::CountOptions opts;
    if (y < 1.02) opts.strip_half_width = 2.0; // envelope too flat to be useful

    winding::CountReport minus_rep;
    for (int si = 0; si < 2; ++si) {
        families::FamilySpec fs;
        fs.params = families::CustomParams{spec};
        fs.sign = si == 0 ? families::Sign::minus : families::Sign::plus;
        families::SymmetricFamily fam = families::build_family(fs);
        winding::CountReport rep = winding::count_N(fam, T, opts);
        if (rep.N != rep.N0)
            throw error("perturbed_family_check: zero off the imaginary axis");
        double w = (double)rep.N - (T / pi_const) * log_y + fam.u.value();
        if (w < -1e-6 || w >= 0.5 * n + 1.0 + 1e-6)
            throw error("perturbed_family_check: count outside the admissible window");
        if (si == 0) minus_rep = rep;
    }
    return minus_rep;
}

bool copiado_check(const families::MeromorphicSpec& h, int samples) {
    if (samples < 1) throw parameter_error("copiado_check: samples must be positive");
    if (!h.poles.empty() || h.zeros_right != 0)
        throw parameter_error(
            "copiado_check: requires h analytic and zero-free right of the axis");
    const double a = h.axis;

    for (long k = 1; k <= samples; ++k) {
        double u, v;
        r2_point(k, u, v);
        double sig = a + 100.0 * u * u + 1e-3;
        double tau = h.real_on_real ? 100.0 * v : 100.0 * (2.0 * v - 1.0);
        cplx s(sig, tau);
        SpecialValue hs = h.eval(s);
        if (!is_finite(hs.value) ||
            std::abs(hs.value) <= std::max(kNoiseFloor, 10.0 * hs.est_error))
            continue; // below the noise floor, no information either way
        SpecialValue hr = h.eval(2.0 * a - s);
        if (!is_finite(hr.value)) continue;
        if (std::abs(hr.value) >= std::abs(hs.value)) return false;
    }

    // increasing phase along the axis, refined wherever a step is too coarse
    cplx prev = h.eval(cplx(a, 0.0)).value;
    double tau = 0.0;
    double step = 0.1;
    while (tau < 20.0) {
        double next = std::min(tau + step, 20.0);
        cplx w = h.eval(cplx(a, next)).value;
        if (w == cplx(0.0)) return false;
        double d = std::arg(w / prev);
        if (std::abs(d) >= pi_const / 2) {
            step *= 0.5;
            if (step < 1e-10) return false;
            continue;
        }
        if (d < -1e-9) return false;
        tau = next;
        prev = w;
        step = std::min(step * 1.5, 0.1);
    }
    return true;
}

bool shift_ratio_check(const families::MeromorphicSpec& h, double alpha, double b,
                       int samples) {
    if (samples < 1) throw parameter_error("shift_ratio_check: samples must be positive");
    if (!(b > 0.0) || alpha < b)
        throw parameter_error("shift_ratio_check: needs alpha >= b > 0");
    const double a = h.axis;

    // the claimed symmetry conj h(2a - conj s) = e^{i theta} h(s) must hold
    // with one global constant of modulus 1
    cplx ratio0;
    const cplx probes[3] = {cplx(a, 0.7), cplx(a + 0.3, 1.1), cplx(a - 0.4, 2.3)};
    for (int i = 0; i < 3; ++i) {
        cplx s = probes[i];
        cplx hs = h.eval(s).value;
        if (hs == cplx(0.0))
            throw error("shift_ratio_check: probe point landed on a zero of h");
        cplx r = std::conj(h.eval(2.0 * a - std::conj(s)).value) / hs;
        if (i == 0) {
            ratio0 = r;
            if (std::abs(std::abs(r) - 1.0) > 1e-6)
                throw error("shift_ratio_check: symmetry constant is not unimodular");
        } else if (std::abs(r - ratio0) > 1e-6 * (1.0 + std::abs(ratio0))) {
            throw error("shift_ratio_check: h lacks the required line symmetry");
        }
    }

    for (long k = 1; k <= samples; ++k) {
        double u, v;
        r2_point(k, u, v);
        cplx s(a + 50.0 * u * u + 1e-3, 50.0 * (2.0 * v - 1.0));
        SpecialValue hp = h.eval(s + alpha);
        if (!is_finite(hp.value) ||
            std::abs(hp.value) <= std::max(kNoiseFloor, 10.0 * hp.est_error))
            continue;
        SpecialValue hm = h.eval(s - alpha);
        if (!is_finite(hm.value)) continue;
        if (std::abs(hm.value) >= std::abs(hp.value)) return false;
    }
    return true;
}

poly::RealPolynomial random_stable(uint64_t seed, int max_degree) {
    if (max_degree < 1 || max_degree > poly::max_root_degree)
        throw parameter_error("random_stable: bad degree cap");
    XorShift rng(seed);
    rng.next();
    int n = 1 + (int)rng.pick(max_degree);
    poly::RealPolynomial p;
    p.c = {rng.uniform(0.2, 5.0)};
    int deg = 0;
    while (deg < n) {
        if (n - deg >= 2 && rng.next() % 2 == 0) {
            poly::RealPolynomial f;
            f.c = {rng.uniform(0.1, 6.0), rng.uniform(0.1, 4.0), 1.0};
            p = p * f;
            deg += 2;
        } else {
            poly::RealPolynomial f;
            f.c = {rng.uniform(0.05, 3.0), 1.0};
            p = p * f;
            deg += 1;
        }
    }
    return p;
}

poly::RealPolynomial random_unstable(uint64_t seed, int max_degree) {
    XorShift rng(seed ^ 0xa5a5a5a5deadbeefull);
    rng.next();
    poly::RealPolynomial p = random_stable(seed, max_degree);
    for (int attempt = 0; attempt < 8; ++attempt) {
        poly::RealPolynomial cand = p;
        switch (rng.pick(4)) {
        case 0: { // flip one interior coefficient
            if (cand.c.size() > 2) {
                std::size_t i = 1 + (std::size_t)rng.pick((long)cand.c.size() - 2);
                cand.c[i] = -cand.c[i];
            }
            break;
        }
        case 1: { // plant a right half plane root
            poly::RealPolynomial f;
            f.c = {-rng.uniform(0.05, 2.0), 1.0};
            cand = cand * f;
            break;
        }
        case 2: { // kill one interior coefficient (Stodola failure)
            if (cand.c.size() > 2) {
                std::size_t i = 1 + (std::size_t)rng.pick((long)cand.c.size() - 2);
                cand.c[i] = 0.0;
            }
            break;
        }
        default: { // complex pair right of the axis
            poly::RealPolynomial f;
            double w = rng.uniform(0.3, 2.0);
            f.c = {w * w, -rng.uniform(0.05, 1.0), 1.0};
            cand = cand * f;
            break;
        }
        }
        if (cand.degree() > poly::max_root_degree) continue;
        try {
            if (!is_stable(cand)) return cand;
        } catch (const parameter_error&) {
        }
    }
    // guaranteed fallback
    poly::RealPolynomial f;
    f.c = {-0.7, 1.0};
    return p * f;
}

} // namespace critline::stability
