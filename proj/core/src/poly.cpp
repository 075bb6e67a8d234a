#include "critline/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace critline::poly {

void RealPolynomial::trim() {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
}

int RealPolynomial::degree() const { return int(c.size()) - 1; }

cplx RealPolynomial::eval(cplx z) const {
    cplx acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
    return acc;
}

double RealPolynomial::eval(double x) const {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

RealPolynomial RealPolynomial::derivative() const {
    RealPolynomial d;
    for (size_t k = 1; k < c.size(); ++k) d.c.push_back(double(k) * c[k]);
    d.trim();
    return d;
}

RealPolynomial RealPolynomial::operator*(const RealPolynomial& o) const {
    if (c.empty() || o.c.empty()) return RealPolynomial{};
    RealPolynomial r;
    r.c.assign(c.size() + o.c.size() - 1, 0.0);
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    r.trim();
    return r;
}

RealPolynomial RealPolynomial::operator+(const RealPolynomial& o) const {
    RealPolynomial r;
    r.c.assign(std::max(c.size(), o.c.size()), 0.0);
    for (size_t i = 0; i < c.size(); ++i) r.c[i] += c[i];
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] += o.c[i];
    r.trim();
    return r;
}

RealPolynomial RealPolynomial::compose_affine(double a, double b) const {
    // Horner in (a z + b)
    RealPolynomial acc;
    RealPolynomial lin{{b, a}};
    for (size_t i = c.size(); i-- > 0;) {
        acc = acc * lin;
        if (acc.c.empty()) acc.c.push_back(0.0);
        acc.c[0] += c[i];
        acc.trim();
    }
    return acc;
}

RealPolynomial RealPolynomial::reflect() const {
    RealPolynomial r = *this;
    for (size_t k = 1; k < r.c.size(); k += 2) r.c[k] = -r.c[k];
    return r;
}

RealPolynomial RealPolynomial::from_roots(const std::vector<double>& roots, double lead) {
    RealPolynomial p{{lead}};
    for (double r : roots) p = p * RealPolynomial{{-r, 1.0}};
    return p;
}

std::string RealPolynomial::str(const std::string& var) const {
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t k = c.size(); k-- > 0;) {
        if (c[k] == 0.0 && c.size() > 1) continue;
        if (!first) os << (c[k] < 0 ? " - " : " + ");
        else if (c[k] < 0) os << "-";
        double av = std::abs(c[k]);
        if (k == 0 || av != 1.0) os << av;
        if (k >= 1) os << var;
        if (k >= 2) os << "^" << k;
        first = false;
    }
    return os.str();
}

RealPolynomial deflate_linear(const RealPolynomial& p, double r, double* rem) {
    RealPolynomial q;
    if (p.c.size() < 2) {
        if (rem) *rem = p.c.empty() ? 0.0 : p.c[0];
        return q;
    }
    q.c.assign(p.c.size() - 1, 0.0);
    double carry = p.c.back();
    for (size_t i = p.c.size() - 1; i-- > 0;) {
        q.c[i] = carry;
        carry = p.c[i] + carry * r;
    }
    if (rem) *rem = carry;
    q.trim();
    return q;
}

std::vector<cplx> roots(const RealPolynomial& p) {
    RealPolynomial q = p;
    q.trim();
    int n = q.degree();
    if (n > max_root_degree) throw parameter_error("polynomial degree beyond root-finder cap");
    std::vector<cplx> z;
    if (n <= 0) return z;
    if (n == 1) return {cplx(-q.c[0] / q.c[1], 0.0)};

    // Cauchy bound start circle, deterministic golden-angle spacing
    double lead = q.c[n];
    double R = 0.0;
    for (int k = 0; k < n; ++k) R = std::max(R, std::abs(q.c[k] / lead));
    R = 1.0 + R;
    z.resize(n);
    for (int j = 0; j < n; ++j) {
        double th = 2.0 * pi_const * j / n + 0.7;
        z[j] = R * cplx(std::cos(th), std::sin(th)) * (0.4 + 0.6 * (j + 1.0) / n);
    }

    RealPolynomial dq = q.derivative();
    // Aberth-Ehrlich simultaneous iteration
    for (int it = 0; it < 400; ++it) {
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            cplx pj = q.eval(z[j]);
            cplx dj = dq.eval(z[j]);
            if (pj == cplx(0.0)) continue;
            cplx w = (dj == cplx(0.0)) ? cplx(1e-12) : pj / dj;
            cplx sum = 0.0;
            for (int k = 0; k < n; ++k)
                if (k != j) {
                    cplx dz = z[j] - z[k];
                    if (std::abs(dz) < 1e-300) dz = 1e-300;
                    sum += 1.0 / dz;
                }
            cplx step = w / (1.0 - w * sum);
            z[j] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[j])));
        }
        if (worst < 1e-15) break;
    }
    // Newton polish and conjugate symmetrization
    for (int j = 0; j < n; ++j) {
        for (int t = 0; t < 3; ++t) {
            cplx dj = dq.eval(z[j]);
            if (std::abs(dj) < 1e-280) break;
            z[j] -= q.eval(z[j]) / dj;
        }
        if (std::abs(z[j].imag()) < 1e-10 * (1.0 + std::abs(z[j])))
            z[j] = cplx(z[j].real(), 0.0);
    }
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

RealPolynomial parse_coeff_list(const std::string& text) {
    RealPolynomial p;
    std::string tok;
    std::istringstream is(text);
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        while (end && *end == ' ') ++end;
        if (!end || *end != '\0') throw parameter_error("bad coefficient token: " + tok);
        p.c.push_back(v);
    }
    p.trim();
    if (p.c.empty()) throw parameter_error("empty coefficient list");
    return p;
}

} // namespace critline::poly
