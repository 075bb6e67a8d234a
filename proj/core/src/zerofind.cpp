#include "critline/zerofind.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "critline/phase.hpp"
#include "critline/specfun.hpp"

namespace critline::zerofind {

namespace {

constexpr double kNoiseFloor = 1e-290;

long poles_inside(const families::SymmetricFamily& fam, const winding::Rect& r) {
    long total = 0;
    for (const auto& [z, order] : fam.f_poles)
        if (z.real() > r.sigma0 && z.real() < r.sigma1 && z.imag() > r.tau0 &&
            z.imag() < r.tau1)
            total += order;
    return total;
}

// zeros of g inside rect (poles of f added back when g counts f), retrying
// with slightly perturbed edges when the boundary grazes a zero
long robust_cell_count(const std::function<SpecialValue(cplx)>& g,
                       const families::SymmetricFamily& fam, winding::Rect rect,
                       bool add_poles) {
    const double ds = 3e-3 * (rect.sigma1 - rect.sigma0);
    const double dt = 3e-3 * (rect.tau1 - rect.tau0);
    const double grow[3] = {0.0, 1.0, -0.7};
    for (int j = 0; j < 3; ++j) {
        winding::Rect r{rect.sigma0 - grow[j] * ds, rect.sigma1 + grow[j] * ds,
                        rect.tau0 - grow[j] * dt, rect.tau1 + grow[j] * dt};
        try {
            long w = winding::rectangle_count(g, r, 1e-9);
            return w + (add_poles ? poles_inside(fam, r) : 0);
        } catch (const boundary_error&) {
            if (j == 2) throw;
        }
    }
    return 0; // unreachable
}

// square winding at radius r around z (counts zeros minus poles strictly inside)
long square_count(const std::function<SpecialValue(cplx)>& g, cplx z, double r) {
    return winding::rectangle_count(
        g, {z.real() - r, z.real() + r, z.imag() - r, z.imag() + r}, 1e-9);
}

cplx numeric_step(const std::function<SpecialValue(cplx)>& g, cplx z) {
    double h = 1e-6 * (1.0 + std::abs(z));
    cplx v = g(z).value;
    cplx d = (g(z + h).value - g(z - h).value) / (2.0 * h);
    if (d == cplx(0.0)) return cplx(0.0);
    return v / d;
}

struct SubdivideState {
    const families::SymmetricFamily* fam = nullptr;
    const std::function<SpecialValue(cplx)>* g = nullptr;
    bool add_poles = false;
    std::vector<ZeroRecord>* out = nullptr;
    long cells = 0;
};

void subdivide(SubdivideState& st, const winding::Rect& rect, long count, int depth) {
    if (count <= 0) return;
    if (++st.cells > 4000)
        throw budget_error("off-line subdivision exceeded its cell budget");

    cplx center(0.5 * (rect.sigma0 + rect.sigma1), 0.5 * (rect.tau0 + rect.tau1));
    double diag = std::hypot(rect.sigma1 - rect.sigma0, rect.tau1 - rect.tau0);
    if (diag < 1e-7 * (1.0 + std::abs(center)) || depth > 60) {
        cplx z = center;
        for (int it = 0; it < 40; ++it) {
            cplx step = numeric_step(*st.g, z);
            if (!is_finite(step)) break;
            z -= step;
            if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) break;
        }
        if (std::abs(z - center) > 4.0 * diag + 1e-9) z = center; // polish ran away
        ZeroRecord rec;
        rec.s = z;
        rec.multiplicity = (int)count;
        rec.on_line = std::abs(z.real() - st.fam->a) < 1e-7;
        SpecialValue fv = st.fam->f(z);
        rec.residual = is_finite(fv.value) ? std::abs(fv.value)
                                           : std::abs((*st.g)(z).value);
        rec.method = "newton";
        st.out->push_back(rec);
        return;
    }

    bool split_sigma = (rect.sigma1 - rect.sigma0) >= (rect.tau1 - rect.tau0);
    double lo = split_sigma ? rect.sigma0 : rect.tau0;
    double hi = split_sigma ? rect.sigma1 : rect.tau1;
    const double offs[3] = {0.5, 0.33, 0.67};
    for (int j = 0; j < 3; ++j) {
        double mid = lo + (hi - lo) * offs[j];
        winding::Rect left = rect, right = rect;
        if (split_sigma) { left.sigma1 = mid; right.sigma0 = mid; }
        else { left.tau1 = mid; right.tau0 = mid; }
        try {
            long cl = robust_cell_count(*st.g, *st.fam, left, st.add_poles);
            long cr = count - cl; // shared boundary is clean, counts add up
            subdivide(st, left, cl, depth + 1);
            subdivide(st, right, cr, depth + 1);
            return;
        } catch (const boundary_error&) {
            if (j == 2) throw;
        }
    }
}

} // namespace

std::vector<ZeroRecord> line_zeros(const families::SymmetricFamily& fam, double T,
                                   bool with_multiplicity) {
    if (!(T > 0.0)) throw parameter_error("line_zeros: T must be positive");
    phase::PhaseTrace trace =
        phase::trace_phase(fam, fam.conjugate() ? -T : 0.0, T, 1e-9);
    phase::CrossingList cl = phase::count_line_zeros(fam, trace);

    std::vector<ZeroRecord> out;
    out.reserve(cl.crossings.size() + cl.tangential.size());
    for (double tau : cl.crossings) {
        ZeroRecord rec;
        rec.s = cplx(fam.a, tau);
        rec.on_line = true;
        rec.method = "bisect";
        rec.residual = std::abs(fam.f(rec.s).value);
        rec.multiplicity = with_multiplicity ? multiplicity(fam, rec.s) : 1;
        out.push_back(rec);
    }
    for (double tau : cl.tangential) {
        ZeroRecord rec;
        rec.s = cplx(fam.a, tau);
        rec.on_line = true;
        rec.method = "bisect";
        rec.residual = std::abs(fam.f(rec.s).value);
        rec.multiplicity = multiplicity(fam, rec.s);
        if (rec.multiplicity < 2) rec.multiplicity = 2; // tangential touch
        out.push_back(rec);
    }
    if (fam.conjugate()) {
        // the centre zero is booked by count_N, not by the phase sweep
        bool booked = false;
        for (const auto& rec : out)
            if (std::abs(rec.s.imag()) < 1e-6 * (1.0 + T)) booked = true;
        SpecialValue fa = fam.f(cplx(fam.a, 0.0));
        if (!booked && (!is_finite(fa.value) ||
                        std::abs(fa.value) <= std::max(kNoiseFloor, 10.0 * fa.est_error))) {
            ZeroRecord rec;
            rec.s = cplx(fam.a, 0.0);
            rec.on_line = true;
            rec.method = "centre";
            rec.residual = std::abs(fa.value);
            rec.multiplicity = with_multiplicity ? multiplicity(fam, rec.s) : 1;
            out.push_back(rec);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const ZeroRecord& u, const ZeroRecord& v) { return u.s.imag() < v.s.imag(); });
    return out;
}

std::vector<ZeroRecord> real_zeros(const families::SymmetricFamily& fam, double lo,
                                   double hi) {
    std::vector<ZeroRecord> out;
    if (fam.conjugate()) return out; // f is not real on the real axis
    if (hi <= lo) return out;

    // segment endpoints: scan starts right of the line, splits at real poles
    double start = std::max(lo, fam.a) + 1e-5;
    std::vector<double> breaks{start};
    for (const auto& [z, order] : fam.f_poles)
        if (std::abs(z.imag()) < 1e-12 && z.real() > start && z.real() < hi)
            breaks.push_back(z.real());
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());

    auto fr = [&](double x) { return fam.f(cplx(x, 0.0)).value.real(); };

    auto record_zero = [&](double x, const char* how, int fallback_mult) {
        ZeroRecord rec;
        rec.s = cplx(x, 0.0);
        rec.method = how;
        rec.residual = std::abs(fam.f(rec.s).value);
        rec.multiplicity = fallback_mult;
        try {
            int m = multiplicity(fam, rec.s);
            if (m > 0) rec.multiplicity = m;
            else if (fallback_mult == 0) return; // dip without an actual zero
        } catch (const error&) {
            if (fallback_mult == 0) return;
        }
        out.push_back(rec);
    };

    for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
        double u = breaks[seg] + (seg > 0 ? 1e-6 : 0.0);
        double v = breaks[seg + 1] - (seg + 2 < breaks.size() ? 1e-6 : 0.0);
        if (v <= u) continue;

        std::vector<double> xs{u};
        while (xs.back() < v)
            xs.push_back(std::min(xs.back() + 0.02 * (1.0 + std::abs(xs.back()) / 10.0), v));
        std::vector<double> fs(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = fr(xs[i]);

        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            if (!(fs[i] == 0.0 || fs[i + 1] == 0.0 || fs[i] * fs[i + 1] < 0.0)) continue;
            double aa = xs[i], bb = xs[i + 1], fa = fs[i];
            for (int it = 0; it < 80 && bb - aa > 1e-15 * (1.0 + std::abs(bb)); ++it) {
                double m = 0.5 * (aa + bb);
                double fm = fr(m);
                if (fm == 0.0) { aa = bb = m; break; }
                if (fa * fm < 0.0) bb = m;
                else { aa = m; fa = fm; }
            }
            record_zero(0.5 * (aa + bb), "scan", 1);
        }

        // even-order touches: local minima of |f| without a sign change
        for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
            double m0 = std::abs(fs[i - 1]), m1 = std::abs(fs[i]), m2 = std::abs(fs[i + 1]);
            if (!(m1 < m0 && m1 < m2)) continue;
            if (fs[i - 1] * fs[i + 1] <= 0.0) continue; // handled by bisection
            if (m1 >= 1e-6 * (m0 + m2)) continue;
            record_zero(xs[i], "scan", 0);
        }
    }

    // mirrors left of the line
    std::size_t found = out.size();
    for (std::size_t i = 0; i < found; ++i) {
        double m = 2.0 * fam.a - out[i].s.real();
        if (m >= lo && m <= hi && m < fam.a - 1e-9) {
            ZeroRecord rec = out[i];
            rec.s = cplx(m, 0.0);
            rec.method = "mirror";
            rec.residual = std::abs(fam.f(rec.s).value);
            out.push_back(rec);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const ZeroRecord& u, const ZeroRecord& v) { return u.s.real() < v.s.real(); });
    return out;
}

std::vector<ZeroRecord> offline_zeros(const families::SymmetricFamily& fam,
                                      const winding::Rect& box) {
    const bool far = static_cast<bool>(fam.far_field) && box.sigma0 > fam.a + 0.4;
    const std::function<SpecialValue(cplx)>& g = far ? fam.far_field : fam.f;

    std::vector<ZeroRecord> out;
    SubdivideState st;
    st.fam = &fam;
    st.g = &g;
    st.add_poles = !far; // far-field rescaling clears the catalog poles
    st.out = &out;

    long count = robust_cell_count(g, fam, box, st.add_poles);
    subdivide(st, box, count, 0);

    if (!fam.conjugate()) {
        std::size_t found = out.size();
        for (std::size_t i = 0; i < found; ++i) {
            if (out[i].on_line) continue;
            ZeroRecord rec = out[i];
            rec.s = cplx(2.0 * fam.a - out[i].s.real(), out[i].s.imag());
            rec.method = "mirror";
            out.push_back(rec);
        }
    }
    std::sort(out.begin(), out.end(), [](const ZeroRecord& u, const ZeroRecord& v) {
        if (u.s.imag() != v.s.imag()) return u.s.imag() < v.s.imag();
        return u.s.real() < v.s.real();
    });
    return out;
}

int multiplicity(const families::SymmetricFamily& fam, cplx z) {
    double r = 0.02 * (1.0 + std::abs(z) / 20.0);
    for (int round = 0; round < 5; ++round) {
        try {
            long w1 = square_count(fam.f, z, r);
            long w2 = square_count(fam.f, z, 0.5 * r);
            if (w1 == w2 && w1 >= 0) return (int)w1;
        } catch (const boundary_error&) {
        }
        r *= 0.61;
    }
    throw parameter_error("multiplicity: winding did not stabilize (zero not isolated?)");
}

SolveResult solve_alpha_star(double lo, double hi) {
    auto d = [&](double alpha) {
        const double h = 1e-6;
        double up = specfun::zeta_completed(cplx(0.5 + alpha + h, 0.0)).value.real();
        double dn = specfun::zeta_completed(cplx(0.5 + alpha - h, 0.0)).value.real();
        return (up - dn) / (2.0 * h);
    };
    double fa = d(lo), fb = d(hi);
    if (!(fa < 0.0 && fb > 0.0))
        throw parameter_error("solve_alpha_star: bracket does not straddle the minimum");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
        double m = 0.5 * (lo + hi);
        double fm = d(m);
        if (fm == 0.0) { lo = hi = m; break; }
        if (fm < 0.0) lo = m;
        else hi = m;
    }
    SolveResult res;
    res.parameter = 0.5 * (lo + hi);
    res.certificate = std::abs(d(res.parameter));
    return res;
}

SolveResult solve_y_star(const poly::RealPolynomial& q) {
    double q_half = q.eval(0.5);
    if (q_half == 0.0)
        throw parameter_error("solve_y_star: q(1/2) = 0 has no tangency parameter");
    double ratio = q.derivative().eval(0.5) / q_half;
    SolveResult res;
    res.parameter = 4.0 * pi_const * std::exp(-euler_gamma - ratio);

    families::FamilySpec spec;
    if (q.degree() < 1)
        spec.params = families::EisensteinParams{res.parameter};
    else
        spec.params = families::HPolyParams{res.parameter, q};
    spec.sign = families::Sign::minus;
    families::SymmetricFamily fam = families::build_family(spec);
    const double h = 1e-4;
    double up = fam.f(cplx(0.5 + h, 0.0)).value.real();
    double dn = fam.f(cplx(0.5 - h, 0.0)).value.real();
    res.certificate = std::abs((up - dn) / (2.0 * h));
    return res;
}

namespace {

// phi at tau, re-walked from the nearest trace sample so the interpolation
// error of phi_at never enters
double phi_exact(const families::SymmetricFamily& fam, const phase::PhaseTrace& trace,
                 double tau) {
    auto it = std::lower_bound(
        trace.samples.begin(), trace.samples.end(), tau,
        [](const phase::PhaseSample& s, double t) { return s.tau < t; });
    if (it != trace.samples.begin()) --it;
    double t0 = it->tau, phi = it->phi;
    cplx prev = fam.phase_sign * fam.h(cplx(fam.a, t0)).value;
    double remaining = tau - t0;
    int n = 8;
    for (int attempt = 0; attempt < 20; ++attempt) {
        double step = remaining / n;
        double acc = 0.0;
        cplx p = prev;
        bool ok = true;
        for (int i = 1; i <= n; ++i) {
            cplx w = fam.phase_sign * fam.h(cplx(fam.a, t0 + step * i)).value;
            double d = std::arg(w / p);
            if (std::abs(d) >= pi_const / 2) { ok = false; break; }
            acc += d;
            p = w;
        }
        if (ok) return phi + acc;
        n *= 2;
    }
    throw trace_error("phi_exact: refinement failed");
}

} // namespace

DoubleZeroResult solve_double_zero(
    const std::function<families::SymmetricFamily(double)>& make, double alpha_lo,
    double alpha_hi, double tau_lo, double tau_hi) {
    if (!(alpha_lo < alpha_hi) || !(0.0 <= tau_lo && tau_lo < tau_hi))
        throw parameter_error("solve_double_zero: bad brackets");

    long lattice = std::numeric_limits<long>::min();

    // distance of the phase dip from its nearest lattice line
    auto dip = [&](double alpha, double* tau_at = nullptr) {
        families::SymmetricFamily fam = make(alpha);
        phase::PhaseTrace trace = phase::trace_phase(fam, 0.0, tau_hi + 0.5, 1e-9);
        const auto& S = trace.samples;
        double best = std::numeric_limits<double>::max();
        double best_x = 0.0, best_tau = 0.0;
        bool found = false;
        for (std::size_t i = 1; i + 1 < S.size(); ++i) {
            if (S[i].tau <= tau_lo || S[i].tau >= tau_hi) continue;
            double d0 = S[i].phi - S[i - 1].phi;
            double d1 = S[i + 1].phi - S[i].phi;
            if (!(d0 * d1 < 0.0)) continue;
            // refine the extremum on the phase derivative
            double aa = S[i - 1].tau, bb = S[i + 1].tau;
            double da = phase::phase_derivative(fam, aa);
            for (int it = 0; it < 70 && bb - aa > 1e-12; ++it) {
                double m = 0.5 * (aa + bb);
                double dm = phase::phase_derivative(fam, m);
                if (dm == 0.0) { aa = bb = m; break; }
                if (da * dm < 0.0) bb = m;
                else { aa = m; da = dm; }
            }
            double t_ext = 0.5 * (aa + bb);
            double x = phi_exact(fam, trace, t_ext) / pi_const - fam.u.value();
            double dist = std::abs(x - std::round(x));
            if (dist < best) {
                best = dist;
                best_x = x;
                best_tau = t_ext;
                found = true;
            }
        }
        if (!found)
            throw parameter_error("solve_double_zero: no phase extremum in the window");
        if (lattice == std::numeric_limits<long>::min())
            lattice = std::lround(best_x);
        if (tau_at) *tau_at = best_tau;
        return best_x - (double)lattice;
    };

    double da = dip(alpha_lo), db = dip(alpha_hi);
    if (da == 0.0 || db == 0.0 || da * db < 0.0) {
        double lo = alpha_lo, hi = alpha_hi;
        double fl = da;
        for (int it = 0; it < 60 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
            double m = 0.5 * (lo + hi);
            double fm = dip(m);
            if (fm == 0.0) { lo = hi = m; break; }
            if (fl * fm < 0.0) hi = m;
            else { lo = m; fl = fm; }
        }
        DoubleZeroResult res;
        res.alpha = 0.5 * (lo + hi);
        double tau0 = 0.0;
        dip(res.alpha, &tau0);
        res.tau0 = tau0;
        families::SymmetricFamily fam = make(res.alpha);
        res.certificate = std::abs(fam.f(cplx(fam.a, tau0)).value);
        return res;
    }
    throw parameter_error("solve_double_zero: dip does not change side over the bracket");
}

std::string zeros_to_csv(const std::vector<ZeroRecord>& zs) {
    std::string out = "# critline zeros v1\n";
    out += "re,im,multiplicity,on_line,residual,method\n";
    char buf[192];
    for (const auto& z : zs) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%d,%d,%.3g,%s\n", z.s.real(),
                      z.s.imag(), z.multiplicity, z.on_line ? 1 : 0, z.residual,
                      z.method.c_str());
        out += buf;
    }
    return out;
}

} // namespace critline::zerofind
