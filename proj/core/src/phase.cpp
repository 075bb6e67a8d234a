#include "critline/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace critline::phase {

namespace {

constexpr double kNoiseFloor = 1e-290;

cplx oriented_h(const families::SymmetricFamily& fam, double tau, double* est = nullptr) {
    SpecialValue v = fam.h(cplx(fam.a, tau));
    if (est) *est = v.est_error;
    return fam.phase_sign * v.value;
}

// walk the continuous argument from (tau0, phi0, w0) to tau1, appending every
// accepted sample after tau0; returns the final (phi, w)
struct WalkEnd {
    double phi = 0.0;
    cplx w;
};

WalkEnd walk_segment(const families::SymmetricFamily& fam, double tau0, double phi0,
                     cplx w0, double tau1, std::vector<PhaseSample>& out) {
    const double span = std::abs(tau1 - tau0);
    if (span <= 0.0) return {phi0, w0};
    const double dir = tau1 > tau0 ? 1.0 : -1.0;
    double step = std::min(0.05, span);
    double tau = tau0, phi = phi0;
    cplx prev = w0;
    while (dir * (tau1 - tau) > 1e-15 * (1.0 + span)) {
        double next = tau + dir * step;
        if (dir * (next - tau1) >= 0.0) next = tau1;
        double est = 0.0;
        cplx w = oriented_h(fam, next, &est);
        bool unusable = !is_finite(w) || std::abs(w) <= std::max(kNoiseFloor, 10.0 * est);
        double d = unusable ? 10.0 : std::arg(w / prev);
        if (unusable || std::abs(d) >= pi_const / 2) {
            step *= 0.5;
            if (step < 1e-12 * (1.0 + std::abs(tau))) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "phase trace stalled near tau = %.9g "
                              "(h appears to vanish on the critical line)",
                              next);
                throw trace_error(buf);
            }
            continue;
        }
        tau = next;
        phi += d;
        prev = w;
        out.push_back({tau, phi});
        if (std::abs(d) < 0.25) step = std::min(step * 1.6, 0.05);
    }
    return {phi, prev};
}

// component of the oriented h that vanishes exactly where phi/pi - offset is
// an integer; 2 pi periodic in phi, so it needs no unwrapping
double lattice_proj(const families::SymmetricFamily& fam, double offset, double tau,
                    double* scale = nullptr, double* est = nullptr) {
    double e = 0.0;
    cplx w = oriented_h(fam, tau, &e);
    double m = std::abs(w);
    if (scale) *scale = m;
    if (est) *est = e;
    if (m == 0.0) return 0.0;
    return std::sin(std::arg(w) - offset * pi_const);
}

struct LatticeEvent {
    double tau = 0.0;
    long value = 0;      // integer value of phi/pi - offset at the event
    bool tangential = false;
};

// crossings (and touch candidates) of phi/pi - offset through the integers,
// tau strictly inside the trace range. fam == nullptr restricts refinement to
// the sampled data (linear interpolation, parabolic vertices).
std::vector<LatticeEvent> sweep_lattice(const families::SymmetricFamily* fam,
                                        const PhaseTrace& trace, double offset) {
    const auto& S = trace.samples;
    std::vector<LatticeEvent> events;
    if (S.size() < 2) return events;

    for (std::size_t i = 0; i + 1 < S.size(); ++i) {
        double x0 = S[i].phi / pi_const - offset;
        double x1 = S[i + 1].phi / pi_const - offset;
        double lo = std::min(x0, x1), hi = std::max(x0, x1);
        long k0 = (long)std::floor(lo) + 1;
        long k1 = (long)std::ceil(hi) - 1;
        for (long k = k0; k <= k1; ++k) {
            double ta = S[i].tau, tb = S[i + 1].tau;
            double t_lin = ta + (tb - ta) * (double(k) - x0) / (x1 - x0);
            double t_star = t_lin;
            if (fam) {
                double pa = lattice_proj(*fam, offset, ta);
                double pb = lattice_proj(*fam, offset, tb);
                if (pa == 0.0) {
                    t_star = ta;
                } else if (pb == 0.0) {
                    t_star = tb;
                } else if (pa * pb < 0.0) {
                    for (int it = 0; it < 60 && tb - ta > 0.0; ++it) {
                        double tm = 0.5 * (ta + tb);
                        double pm = lattice_proj(*fam, offset, tm);
                        if (pm == 0.0) { ta = tb = tm; break; }
                        if (pa * pm < 0.0) { tb = tm; pb = pm; }
                        else { ta = tm; pa = pm; }
                    }
                    t_star = 0.5 * (ta + tb);
                }
            }
            events.push_back({t_star, k, false});
        }
    }

    // tangential touches: sampled local extrema of phi sitting on the lattice
    for (std::size_t i = 1; i + 1 < S.size(); ++i) {
        double d0 = S[i].phi - S[i - 1].phi;
        double d1 = S[i + 1].phi - S[i].phi;
        if (!(d0 * d1 < 0.0)) continue;
        double xi = S[i].phi / pi_const - offset;
        double m = std::round(xi);
        if (std::abs(xi - m) >= 0.02) continue;
        double lo_t = S[i - 1].tau, hi_t = S[i + 1].tau;
        bool already = false;
        for (const auto& ev : events)
            if (ev.tau > lo_t && ev.tau < hi_t) { already = true; break; }
        if (already) continue;

        if (fam) {
            // golden-section minimum of |proj| over the bracket
            const double gr = 0.6180339887498949;
            double a = lo_t, b = hi_t;
            double c = b - gr * (b - a), d = a + gr * (b - a);
            double qc = std::abs(lattice_proj(*fam, offset, c));
            double qd = std::abs(lattice_proj(*fam, offset, d));
            for (int it = 0; it < 90; ++it) {
                if (qc < qd) {
                    b = d; d = c; qd = qc;
                    c = b - gr * (b - a);
                    qc = std::abs(lattice_proj(*fam, offset, c));
                } else {
                    a = c; c = d; qc = qd;
                    d = a + gr * (b - a);
                    qd = std::abs(lattice_proj(*fam, offset, d));
                }
            }
            double t_star = 0.5 * (a + b);
            double scale = 0.0, est = 0.0;
            double q = std::abs(lattice_proj(*fam, offset, t_star, &scale, &est));
            double floor_q = scale > 0.0 ? std::max(1e-8, 60.0 * est / scale) : 1e-8;
            if (q <= floor_q) events.push_back({t_star, (long)m, true});
        } else {
            // parabola vertex from the three samples
            double t0 = S[i - 1].tau, t1 = S[i].tau, t2 = S[i + 1].tau;
            double y0 = S[i - 1].phi, y1 = S[i].phi, y2 = S[i + 1].phi;
            double denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
            if (denom == 0.0) continue;
            double A = (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom;
            double B = (t2 * t2 * (y0 - y1) + t1 * t1 * (y2 - y0) + t0 * t0 * (y1 - y2)) / denom;
            if (A == 0.0) continue;
            double tv = -B / (2.0 * A);
            if (tv <= lo_t || tv >= hi_t) tv = t1;
            double C = y0 - A * t0 * t0 - B * t0;
            double xv = (A * tv * tv + B * tv + C) / pi_const - offset;
            if (std::abs(xv - m) < 1e-6) events.push_back({tv, (long)m, true});
        }
    }

    std::sort(events.begin(), events.end(),
              [](const LatticeEvent& u, const LatticeEvent& v) { return u.tau < v.tau; });
    return events;
}

} // namespace

double PhaseTrace::phi_at(double tau) const {
    if (samples.size() < 2 || tau < tau_min - 1e-9 * (1.0 + std::abs(tau_min)) ||
        tau > tau_max + 1e-9 * (1.0 + std::abs(tau_max)))
        throw usage_error("phi_at: tau outside the traced range");
    auto it = std::lower_bound(samples.begin(), samples.end(), tau,
                               [](const PhaseSample& s, double t) { return s.tau < t; });
    if (it == samples.begin()) return it->phi;
    if (it == samples.end()) return samples.back().phi;
    const PhaseSample& hi = *it;
    const PhaseSample& lo = *(it - 1);
    if (hi.tau == lo.tau) return hi.phi;
    double t = (tau - lo.tau) / (hi.tau - lo.tau);
    return lo.phi + t * (hi.phi - lo.phi);
}

PhaseTrace trace_phase(const families::SymmetricFamily& fam, double tau_min,
                       double tau_max, double tol) {
    if (!(tau_min < tau_max)) throw usage_error("trace_phase: empty tau range");
    if (!fam.conjugate() && tau_min < 0.0)
        throw usage_error("trace_phase: negative tau in one-sided mode");

    PhaseTrace tr;
    tr.a = fam.a;
    tr.tau_min = tau_min;
    tr.tau_max = tau_max;
    tr.tol = tol;

    double est0 = 0.0;
    cplx w0 = oriented_h(fam, 0.0, &est0);
    if (!is_finite(w0) || std::abs(w0) <= std::max(kNoiseFloor, 10.0 * est0))
        throw trace_error("trace_phase: h vanishes at the anchor tau = 0");
    double phi0 = fam.conjugate() ? std::arg(w0) : 0.0;
    // the folded root number makes h(a) real, so any residual argument is
    // rounding noise; snapping it keeps the anchor off the crossing lattice
    // (the centre zero is booked separately, not as a phase crossing)
    if (std::abs(phi0) < 1e-9) phi0 = 0.0;

    std::vector<PhaseSample> up, down;
    if (tau_max > 0.0) {
        if (tau_min > 0.0) {
            // force a sample exactly at tau_min, then continue
            WalkEnd mid = walk_segment(fam, 0.0, phi0, w0, tau_min, up);
            walk_segment(fam, tau_min, mid.phi, mid.w, tau_max, up);
        } else {
            walk_segment(fam, 0.0, phi0, w0, tau_max, up);
        }
    }
    if (tau_min < 0.0) {
        if (tau_max < 0.0) {
            WalkEnd mid = walk_segment(fam, 0.0, phi0, w0, tau_max, down);
            walk_segment(fam, tau_max, mid.phi, mid.w, tau_min, down);
        } else {
            walk_segment(fam, 0.0, phi0, w0, tau_min, down);
        }
    }

    auto& s = tr.samples;
    s.reserve(up.size() + down.size() + 1);
    for (auto it = down.rbegin(); it != down.rend(); ++it) s.push_back(*it);
    s.push_back({0.0, phi0});
    for (const auto& p : up) s.push_back(p);

    const double eps_lo = 1e-12 * (1.0 + std::abs(tau_min));
    const double eps_hi = 1e-12 * (1.0 + std::abs(tau_max));
    std::erase_if(s, [&](const PhaseSample& p) {
        return p.tau < tau_min - eps_lo || p.tau > tau_max + eps_hi;
    });
    if (s.size() < 2) throw trace_error("trace_phase: range too small to sample");
    return tr;
}

CrossingList count_line_zeros(const families::SymmetricFamily& fam,
                              const PhaseTrace& trace) {
    double offset = fam.sign == families::Sign::plus ? 0.5 : 0.0;
    auto events = sweep_lattice(&fam, trace, offset);
    CrossingList out;
    for (const auto& ev : events) {
        if (ev.tangential) out.tangential.push_back(ev.tau);
        else out.crossings.push_back(ev.tau);
    }
    out.count = (long)events.size();
    return out;
}

IntegerPointReport integer_point_report(const PhaseTrace& trace, double offset) {
    auto events = sweep_lattice(nullptr, trace, offset);
    IntegerPointReport rep;
    rep.x.reserve(events.size());
    rep.g.reserve(events.size());
    for (const auto& ev : events) {
        rep.x.push_back(ev.tau);
        rep.g.push_back(ev.value);
    }
    for (std::size_t i = 0; i + 1 < rep.g.size(); ++i) {
        long diff = rep.g[i + 1] - rep.g[i];
        if (diff == 0) ++rep.c;
        else if (diff == -1) ++rep.d;
    }
    rep.k = rep.g.empty() ? 0 : rep.c + 2 * rep.d - rep.g.front();
    return rep;
}

double phase_derivative(const families::SymmetricFamily& fam, double tau) {
    double e = 5e-4 * (1.0 + std::abs(tau) / 10.0);
    cplx w = oriented_h(fam, tau);
    auto psi = [&](double delta) {
        cplx v = oriented_h(fam, tau + delta);
        return std::arg(v / w);
    };
    return (8.0 * (psi(e) - psi(-e)) - (psi(2.0 * e) - psi(-2.0 * e))) / (12.0 * e);
}

} // namespace critline::phase
