#include "critline/winding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "critline/specfun.hpp"
#include "critline/zerofind.hpp"

namespace critline::winding {

namespace {

constexpr double kNoiseFloor = 1e-290;

// accumulated change of arg g along the segment z0 -> z1, adaptive stepping;
// forced lists parameter values in (0,1) the walk must land on exactly
double walk_edge(const std::function<SpecialValue(cplx)>& g, cplx z0, cplx z1,
                 double tol, const std::vector<double>& forced = {}) {
    const double span = std::abs(z1 - z0);
    if (span == 0.0) return 0.0;
    const double floor_scale = std::max(1e-13, 1e-2 * tol);

    auto eval = [&](cplx z, bool& usable) -> cplx {
        try {
            SpecialValue v = g(z);
            usable = is_finite(v.value) &&
                     std::abs(v.value) > std::max(kNoiseFloor, 8.0 * v.est_error);
            return v.value;
        } catch (const pole_error&) {
            usable = false;
            return cplx(0.0);
        }
    };

    bool ok = false;
    cplx prev = eval(z0, ok);
    if (!ok) throw boundary_error("contour corner sits on a zero or pole");

    // the opening step is taken before any argument-rate information exists,
    // so it starts small; growth at most doubles an accepted step, and a
    // doubled step cannot reach the 3pi/2 of true change that aliasing needs
    double total = 0.0, t = 0.0, step = 1.0 / 1024.0;
    while (t < 1.0) {
        double tn = std::min(1.0, t + step);
        for (double fb : forced)
            if (fb > t + 1e-12 && fb < tn) tn = fb;
        cplx z = z0 + (z1 - z0) * tn;
        bool usable = false;
        cplx v = eval(z, usable);
        // the magnitude guard matters: a step spanning a close zero-pole pair
        // can alias to a small principal argument while the true change is 2pi,
        // but it cannot hide the |f| spike in between
        if (usable && std::abs(std::log(std::abs(v) / std::abs(prev))) >= 1.0)
            usable = false;
        double d = usable ? std::arg(v / prev) : 10.0;
        if (!usable || std::abs(d) >= pi_const / 2) {
            step *= 0.5;
            if (step * span < floor_scale * (1.0 + std::abs(z))) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "contour edge passes too close to a zero or pole near "
                              "(%.6g, %.6g)",
                              z.real(), z.imag());
                throw boundary_error(buf);
            }
            continue;
        }
        t = tn;
        prev = v;
        total += d;
        if (std::abs(d) < 0.25) step = std::min(step * 2.0, 1.0 / 16.0);
    }
    return total;
}

// winding of g around a circle; used for multiplicities at s = a
long circle_winding(const std::function<SpecialValue(cplx)>& g, cplx center, double r) {
    long n = 64;
    for (int round = 0; round < 9; ++round, n *= 2) {
        double total = 0.0;
        bool bad = false;
        cplx prev;
        bool have_prev = false;
        for (long k = 0; k <= n && !bad; ++k) {
            double th = 2.0 * pi_const * double(k) / double(n);
            cplx z = center + r * cplx(std::cos(th), std::sin(th));
            SpecialValue v;
            try {
                v = g(z);
            } catch (const pole_error&) {
                bad = true;
                break;
            }
            if (!is_finite(v.value) ||
                std::abs(v.value) <= std::max(kNoiseFloor, 8.0 * v.est_error)) {
                bad = true;
                break;
            }
            if (have_prev) {
                double d = std::arg(v.value / prev);
                if (std::abs(d) >= pi_const / 2) { bad = true; break; }
                total += d;
            }
            prev = v.value;
            have_prev = true;
        }
        if (bad) continue;
        double w = total / (2.0 * pi_const);
        long rnd = std::lround(w);
        if (std::abs(w - rnd) > 0.2) continue;
        return rnd;
    }
    throw boundary_error("circle winding did not converge (zero too close to the circle)");
}

// zeros of h inside [a + delta, sigma_right] x heights up to about T, counted
// by the argument principle with a small retry ladder when an edge grazes a
// zero; requires no h-poles right of the line
long numeric_h_zero_count(const families::SymmetricFamily& fam, double sigma_right,
                          double T, double tol) {
    if (fam.P_h_right > 0)
        throw parameter_error(
            "numeric h-zero count is not separable with poles right of the line");
    const double deltas[4] = {1e-4, 3e-4, 1e-3, 1e-2};
    for (int j = 0; j < 4; ++j) {
        double top = T + 0.5 + 0.21 * j;
        double bot = fam.conjugate() ? -top : -0.05 - 0.017 * j;
        Rect r{fam.a + deltas[j], sigma_right + 0.31 * j, bot, top};
        try {
            return rectangle_count(fam.h, r, tol);
        } catch (const boundary_error&) {
            if (j == 3) throw;
        }
    }
    return 0; // unreachable
}

long poles_inside(const families::SymmetricFamily& fam, const Rect& r) {
    long total = 0;
    for (const auto& [z, order] : fam.f_poles)
        if (z.real() > r.sigma0 && z.real() < r.sigma1 && z.imag() > r.tau0 &&
            z.imag() < r.tau1)
            total += order;
    return total;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
    if (n % 2) ++n;
    double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// integral of an integrable-log integrand over [lo, hi]; cubic substitution
// clusters nodes toward singular endpoints so log |x - x_s| integrates cleanly
double log_integral(const std::function<double(double)>& f, double lo, double hi,
                    bool sing_lo, bool sing_hi) {
    if (hi <= lo) return 0.0;
    if (sing_lo && sing_hi) {
        double mid = 0.5 * (lo + hi);
        return log_integral(f, lo, mid, true, false) +
               log_integral(f, mid, hi, false, true);
    }
    if (!sing_lo && !sing_hi) return simpson(f, lo, hi, 200);
    double len = hi - lo;
    auto g = [&](double t) {
        // t in (0,1], singular end at t = 0
        double x = sing_lo ? lo + len * t * t * t : hi - len * t * t * t;
        // near t = 0 the cubic step rounds to nothing and x collapses onto the
        // singular endpoint; the t^2 weight kills that contribution anyway
        if (sing_lo ? x <= lo : x >= hi) return 0.0;
        double w = 3.0 * len * t * t;
        return f(x) * w;
    };
    return simpson(g, 1e-8, 1.0, 240);
}

} // namespace

double edge_arg_change(const std::function<SpecialValue(cplx)>& g, cplx z0, cplx z1,
                       double tol, const std::vector<double>& forced) {
    return walk_edge(g, z0, z1, tol, forced);
}

long rectangle_count(const std::function<SpecialValue(cplx)>& g, const Rect& rect,
                     double tol, const std::vector<cplx>& known_features) {
    if (!(rect.sigma0 < rect.sigma1) || !(rect.tau0 < rect.tau1))
        throw parameter_error("rectangle_count: degenerate rectangle");
    cplx c0(rect.sigma0, rect.tau0), c1(rect.sigma1, rect.tau0);
    cplx c2(rect.sigma1, rect.tau1), c3(rect.sigma0, rect.tau1);

    auto edge = [&](cplx z0, cplx z1) {
        std::vector<double> forced;
        double span2 = std::norm(z1 - z0);
        for (cplx w : known_features) {
            double t = ((w - z0) * std::conj(z1 - z0)).real() / span2;
            if (t > 1e-9 && t < 1.0 - 1e-9) forced.push_back(t);
        }
        std::sort(forced.begin(), forced.end());
        return walk_edge(g, z0, z1, tol, forced);
    };

    double total = edge(c0, c1) + edge(c1, c2) + edge(c2, c3) + edge(c3, c0);
    double w = total / (2.0 * pi_const);
    long r = std::lround(w);
    if (std::abs(w - r) > 0.2)
        throw boundary_error("rectangle winding is not close to an integer");
    return r;
}

Inventory make_inventory(const families::SymmetricFamily& fam, double sigma0,
                         double T) {
    Inventory inv;
    inv.P_h_right = fam.P_h_right;
    inv.P_f_right = fam.P_f_right();

    // multiplicity of s = a as a zero of f
    SpecialValue fa = fam.f(cplx(fam.a, 0.0));
    bool zero_at_a = !is_finite(fa.value) ||
                     std::abs(fa.value) <= std::max(kNoiseFloor, 10.0 * fa.est_error);
    if (fam.sign == families::Sign::minus && fam.mode == families::Mode::real_onesided)
        zero_at_a = true; // odd symmetry forces it
    if (zero_at_a) {
        double r = 0.04;
        for (const auto& [z, order] : fam.f_poles)
            r = std::min(r, 0.5 * std::abs(z - cplx(fam.a, 0.0)));
        if (r < 1e-6)
            throw parameter_error("a pole of f sits on top of the centre s = a");
        inv.n_f_a = (int)circle_winding(fam.f, cplx(fam.a, 0.0), r);
    }

    // real zeros of f right of the line (real mode only)
    if (!fam.conjugate()) {
        auto zs = zerofind::real_zeros(fam, fam.a, fam.real_scan_limit);
        for (const auto& z : zs)
            if (z.s.real() > fam.a + 1e-9) inv.n_f_right += z.multiplicity;
    }

    inv.N_h_right = fam.N_h_right >= 0
                        ? fam.N_h_right
                        : (int)numeric_h_zero_count(fam, sigma0, T, 1e-9);
    return inv;
}

Rational bound_Ba(const families::SymmetricFamily& fam, const Inventory& inv) {
    if (fam.conjugate())
        return Rational(1) + Rational(2 * (inv.P_f_right + inv.N_h_right - inv.P_h_right));
    return fam.u - Rational(inv.n_f_a, 2) - Rational(inv.n_f_right) +
           Rational(inv.P_f_right) + Rational(inv.N_h_right) - Rational(inv.P_h_right);
}

double pick_contour_top(const families::SymmetricFamily& fam, double T,
                        double sigma_lo, double sigma_hi) {
    const double w = std::min(0.45, 0.3 * T);
    const int n_cand = 64, n_sig = 17;
    double best_t = T, best_score = -1.0;
    for (int j = 0; j < n_cand; ++j) {
        double t = T - w + 2.0 * w * (j + 0.5) / n_cand;
        bool near_pole = false;
        for (const auto& [z, order] : fam.f_poles)
            if (std::abs(std::abs(z.imag()) - t) < 0.02 &&
                z.real() > sigma_lo - 0.1 && z.real() < sigma_hi + 0.1)
                near_pole = true;
        if (near_pole) continue;

        double score = std::numeric_limits<double>::max();
        bool usable = true;
        for (int k = 0; k < n_sig && usable; ++k) {
            double sig = sigma_lo + (sigma_hi - sigma_lo) * (k + 0.5) / n_sig;
            for (int side = 0; side < (fam.conjugate() ? 2 : 1) && usable; ++side) {
                cplx s(sig, side == 0 ? t : -t);
                try {
                    double fv = std::abs(fam.f(s).value);
                    double h1 = std::abs(fam.h(s).value);
                    double h2 = std::abs(fam.h(2.0 * fam.a - s).value);
                    double denom = h1 + h2 + 1e-300;
                    score = std::min(score, fv / denom);
                } catch (const error&) {
                    usable = false;
                }
            }
        }
        if (!usable) continue;
        if (score > best_score ||
            (score == best_score && std::abs(t - T) < std::abs(best_t - T))) {
            best_score = score;
            best_t = t;
        }
    }
    if (best_score < 0.0)
        throw boundary_error("no usable contour top found near the requested height");
    return best_t;
}

CountReport count_N(const families::SymmetricFamily& fam, double T,
                    const CountOptions& opts) {
    if (!(T > 0.0)) throw parameter_error("count_N: T must be positive");

    CountReport rep;
    rep.family = fam.name;
    rep.sign = families::sign_name(fam.sign);
    rep.mode = fam.conjugate() ? "conjugate_twosided" : "real_onesided";
    rep.a = fam.a;
    rep.T_requested = T;

    const bool strip = opts.strip_half_width.has_value();
    double sigma_right;
    if (strip) {
        if (!(*opts.strip_half_width > 0.0))
            throw parameter_error("count_N: strip half-width must be positive");
        sigma_right = fam.a + *opts.strip_half_width;
        rep.strip_sigma0 = sigma_right;
    } else {
        sigma_right = families::choose_sigma0(fam, opts.sigma0_cap);
    }
    rep.sigma0 = sigma_right;
    try {
        rep.envelope_at_sigma0 = families::stirling_envelope(fam, sigma_right);
    } catch (const envelope_error&) {
        rep.envelope_at_sigma0 = -1.0; // no certified envelope at this abscissa
    }

    const double sigma_left = 2.0 * fam.a - sigma_right;

    // the bottom edge passes a hair above the real axis, where the catalog
    // families concentrate their real zeros and poles; hand all of them to the
    // edge walk so no step can straddle two at once
    std::vector<cplx> features;
    for (const auto& [z, order] : fam.f_poles) {
        features.push_back(z);
        features.push_back(2.0 * fam.a - std::conj(z));
    }
    features.emplace_back(fam.a, 0.0);
    try {
        double hi = std::max(fam.real_scan_limit, sigma_right);
        for (const auto& z : zerofind::real_zeros(fam, fam.a, hi)) {
            features.push_back(z.s);
            features.push_back(2.0 * fam.a - std::conj(z.s));
        }
    } catch (const error&) {
        // fall back to pole waypoints only
    }

    // contour top, retried with small shifts if an edge grazes a zero
    double t_used = pick_contour_top(fam, T, sigma_left, sigma_right);
    const double shifts[5] = {0.0, 0.037, -0.053, 0.101, -0.097};
    long wind = 0;
    Rect rect{};
    bool counted = false;
    for (int attempt = 0; attempt < 5 && !counted; ++attempt) {
        double top = t_used + shifts[attempt] * (1.0 + T / 50.0);
        rect = Rect{sigma_left, sigma_right, fam.conjugate() ? -top : 1e-6, top};
        try {
            wind = rectangle_count(fam.f, rect, opts.tol, features);
            t_used = top;
            counted = true;
        } catch (const boundary_error&) {
            if (attempt == 4) throw;
        }
    }
    rep.T_used = t_used;
    rep.N = wind + poles_inside(fam, rect);

    // line zeros from the phase trace over the same contour
    phase::PhaseTrace trace =
        phase::trace_phase(fam, fam.conjugate() ? -t_used : 0.0, t_used, opts.tol);
    phase::CrossingList cl = phase::count_line_zeros(fam, trace);
    rep.N0_prime = cl.count;
    rep.N0 = rep.N0_prime;

    // zero at the centre itself only enters the two-sided count; guard
    // against the trace having already booked it as a drifting crossing
    if (fam.conjugate()) {
        SpecialValue fa = fam.f(cplx(fam.a, 0.0));
        bool booked = false;
        const double eps = 1e-6 * (1.0 + t_used);
        for (double tau : cl.crossings)
            if (std::abs(tau) < eps) booked = true;
        for (double tau : cl.tangential)
            if (std::abs(tau) < eps) booked = true;
        if (!booked && (!is_finite(fa.value) ||
                        std::abs(fa.value) <= std::max(kNoiseFloor, 10.0 * fa.est_error))) {
            int m = (int)circle_winding(fam.f, cplx(fam.a, 0.0), 0.03);
            rep.N0_prime += 1;
            rep.N0 += m;
        }
    }

    if (rep.N != rep.N0 && opts.locate_multiplicities) {
        long with_mult = 0;
        std::vector<double> all = cl.crossings;
        all.insert(all.end(), cl.tangential.begin(), cl.tangential.end());
        for (double tau : all)
            with_mult += zerofind::multiplicity(fam, cplx(fam.a, tau));
        rep.N0 = with_mult + (rep.N0 - cl.count); // keep any centre contribution
    }

    // stability of the defect N0'(t) - ceil(phi(t)/pi - u) along the way up
    if (!fam.conjugate()) {
        std::vector<double> events = cl.crossings;
        events.insert(events.end(), cl.tangential.begin(), cl.tangential.end());
        std::sort(events.begin(), events.end());
        const double fracs[4] = {0.55, 0.70, 0.85, 1.0};
        long dvals[4] = {0, 0, 0, 0};
        for (int i = 0; i < 4; ++i) {
            double t = fracs[i] * t_used;
            for (int shift = 0; shift < 3; ++shift) {
                bool near = false;
                for (double e : events)
                    if (std::abs(e - t) < 0.05) near = true;
                double x = trace.phi_at(std::min(t, t_used)) / pi_const - fam.u.value();
                if (!near && std::abs(x - std::round(x)) > 1e-3) break;
                t = std::min(t + 0.11, t_used);
            }
            t = std::min(t, t_used);
            long below = (long)std::count_if(events.begin(), events.end(),
                                             [&](double e) { return e <= t; });
            double x = trace.phi_at(t) / pi_const - fam.u.value();
            dvals[i] = below - (long)std::ceil(x - 1e-7);
        }
        rep.d_estimate = dvals[3];
        rep.d_stable =
            dvals[0] == dvals[1] && dvals[1] == dvals[2] && dvals[2] == dvals[3];
        rep.k_gap = phase::integer_point_report(trace, fam.u.value()).k;
    }

    rep.inventory = make_inventory(fam, sigma_right, t_used);
    rep.B_a = bound_Ba(fam, rep.inventory);
    rep.B_a_valid = !strip;
    rep.parity_ok = ((rep.N - rep.N0) % 2) == 0;
    long gap = rep.N - rep.N0_prime;
    rep.bound_ok = rep.B_a_valid && gap * rep.B_a.den <= rep.B_a.num;
    return rep;
}

SafeHeight safe_height(long n) {
    if (n < 0) throw parameter_error("safe_height: n must be nonnegative");
    const int n_t = 64, n_sig = 64;
    double best_t = n + 0.5, best_m = -1.0;
    for (int i = 0; i < n_t; ++i) {
        double t = n + (i + 0.5) / n_t;
        double m = std::numeric_limits<double>::max();
        for (int k = 0; k < n_sig; ++k) {
            double sig = -1.0 + 3.0 * k / (n_sig - 1);
            m = std::min(m, std::abs(specfun::zeta(cplx(sig, t)).value));
        }
        if (m > best_m) {
            best_m = m;
            best_t = t;
        }
    }
    SafeHeight sh;
    sh.T = best_t;
    sh.A = best_m >= 1.0 ? 0.0 : std::log(1.0 / best_m) / std::log(std::max(best_t, 2.0));
    return sh;
}

DensityReport density_report(const families::SymmetricFamily& fam, double T) {
    DensityReport rep;
    rep.T = T;
    CountReport c = count_N(fam, T);
    rep.count_gap = c.N - c.N0_prime;
    double right = std::max(2.0, fam.a + 1.5);
    rep.budget = 4 * numeric_h_zero_count(fam, right, 2.0 * T + 4.0, 1e-9);
    rep.ok = rep.count_gap <= rep.budget + rep.slack;
    return rep;
}

double littlewood_S_mean(const families::SymmetricFamily& fam, double T,
                         double sigma0) {
    if (!(T > 0.0) || !(sigma0 > fam.a))
        throw parameter_error("littlewood_S_mean: need T > 0 and sigma0 > a");
    const double sgn = fam.sign == families::Sign::minus ? -1.0 : 1.0;
    const double a = fam.a;

    auto log_abs_g = [&](cplx s) {
        double fv = std::abs(fam.f(s).value);
        double hv = std::abs(fam.h(s).value);
        if (fv == 0.0 || hv == 0.0)
            throw boundary_error("littlewood integrand hit an exact zero");
        return std::log(fv) - std::log(hv);
    };

    // top edge: int_a^{sigma0} log|g(sigma + iT)|
    double ia = simpson([&](double sig) { return log_abs_g(cplx(sig, T)); }, a, sigma0, 256);

    // right edge: int_0^T arg g(sigma0 + i tau); Re g > 0 there, so the
    // principal argument is already continuous
    double ib = simpson(
        [&](double tau) {
            SpecialValue F = fam.ratio_F(cplx(sigma0, tau));
            return std::arg(1.0 + sgn * F.value);
        },
        0.0, T, 512);

    // base segment: int_a^{sigma0} log|g(sigma)| with its integrable log
    // singularities at real zeros/poles of f split out
    std::vector<double> cuts;
    cuts.push_back(a);
    SpecialValue fa = fam.f(cplx(a, 0.0));
    bool sing_at_a = fam.sign == families::Sign::minus ||
                     std::abs(fa.value) <= std::max(kNoiseFloor, 10.0 * fa.est_error);
    for (const auto& z : zerofind::real_zeros(fam, a, sigma0))
        if (z.s.real() > a + 1e-9 && z.s.real() < sigma0 - 1e-9)
            cuts.push_back(z.s.real());
    for (const auto& [z, order] : fam.f_poles)
        if (std::abs(z.imag()) < 1e-12 && z.real() > a + 1e-9 && z.real() < sigma0 - 1e-9)
            cuts.push_back(z.real());
    cuts.push_back(sigma0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double u, double v) { return std::abs(u - v) < 1e-12; }),
               cuts.end());

    double ic = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        bool s_lo = i > 0 || sing_at_a;
        bool s_hi = i + 2 < cuts.size();
        ic += log_integral([&](double sig) { return log_abs_g(cplx(sig, 0.0)); },
                           cuts[i], cuts[i + 1], s_lo, s_hi);
    }

    return (ia + ib - ic) / (pi_const * T);
}

} // namespace critline::winding
