#include "critline/characters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace critline::characters {

namespace {

long mod_pow(long b, long e, long m) {
    long r = 1 % m;
    b %= m;
    while (e > 0) {
        if (e & 1) r = (__int128(r) * b) % m;
        b = (__int128(b) * b) % m;
        e >>= 1;
    }
    return r;
}

std::vector<std::pair<long, int>> factorize(long n) {
    std::vector<std::pair<long, int>> f;
    for (long p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            f.push_back({p, e});
        }
    }
    if (n > 1) f.push_back({n, 1});
    return f;
}

long multiplicative_order(long g, long m, long group_order) {
    long ord = group_order;
    for (auto [q, e] : factorize(group_order)) {
        (void)e;
        while (ord % q == 0 && mod_pow(g, ord / q, m) == 1) ord /= q;
    }
    return ord;
}

// primitive root mod p^e for odd prime p
long primitive_root(long pe, long p) {
    long phi = pe / p * (p - 1);
    for (long g = 2; g < pe; ++g) {
        if (std::gcd(g, pe) != 1) continue;
        if (multiplicative_order(g, pe, phi) == phi) return g;
    }
    throw error("no primitive root found");
}

struct CyclicFactor {
    long pe;          // prime power modulus of this CRT component
    long order;       // order of the generator
    std::vector<long> dlog; // residue mod pe -> exponent of generator, -1 off units
};

// discrete-log tables for each cyclic factor of (Z/N)^*
std::vector<CyclicFactor> unit_group(long N) {
    std::vector<CyclicFactor> comps;
    for (auto [p, e] : factorize(N)) {
        long pe = 1;
        for (int i = 0; i < e; ++i) pe *= p;
        if (p == 2) {
            if (e == 1) continue; // trivial
            // <-1> x <5>; for e == 2 only the <-1> part survives
            CyclicFactor c1{pe, 2, std::vector<long>(pe, -1)};
            long ord5 = pe / 4; // order of 5 mod 2^e, e >= 3
            CyclicFactor c5{pe, ord5, std::vector<long>(pe, -1)};
            // enumerate +-5^k
            long v = 1 % pe;
            for (long k = 0; k < std::max(ord5, 1L); ++k) {
                c1.dlog[v] = 0;
                c5.dlog[v] = k;
                long w = pe - v;
                c1.dlog[w] = 1;
                c5.dlog[w] = k;
                v = (__int128(v) * 5) % pe;
            }
            comps.push_back(std::move(c1));
            if (e >= 3) comps.push_back(std::move(c5));
        } else {
            long phi = pe / p * (p - 1);
            long g = primitive_root(pe, p);
            CyclicFactor c{pe, phi, std::vector<long>(pe, -1)};
            long v = 1;
            for (long k = 0; k < phi; ++k) {
                c.dlog[v] = k;
                v = (__int128(v) * g) % pe;
            }
            comps.push_back(std::move(c));
        }
    }
    return comps;
}

} // namespace

DirichletCharacter::DirichletCharacter(long modulus, long expo_den, std::vector<long> expo_num)
    : modulus_(modulus), expo_den_(expo_den), expo_num_(std::move(expo_num)) {
    if (modulus_ < 1 || expo_den_ < 1 || long(expo_num_.size()) != modulus_)
        throw parameter_error("malformed character table");
    // kappa from chi(-1)
    if (modulus_ == 1) {
        kappa_ = 0;
    } else {
        long em = expo_num_[modulus_ - 1];
        kappa_ = (em == 0) ? 0 : 1;
    }
    // conductor: least d | N with chi trivial on units = 1 (mod d)
    conductor_ = modulus_;
    for (long d = 1; d <= modulus_; ++d) {
        if (modulus_ % d != 0) continue;
        bool ok = true;
        for (long a = 1; a < modulus_ && ok; ++a) {
            if (expo_num_[a] < 0) continue;
            if ((a - 1) % d == 0 && expo_num_[a] != 0) ok = false;
        }
        if (d == modulus_ && modulus_ == 1) ok = true;
        if (ok) { conductor_ = d; break; }
    }
    primitive_ = (conductor_ == modulus_);
}

std::string DirichletCharacter::label() const {
    return std::to_string(modulus_) + "." + std::to_string(index_);
}

bool DirichletCharacter::is_principal() const {
    for (long a = 0; a < modulus_; ++a)
        if (expo_num_[a] > 0) return false;
    return true;
}

bool DirichletCharacter::is_real() const {
    for (long a = 0; a < modulus_; ++a) {
        long e = expo_num_[a];
        if (e > 0 && 2 * e != expo_den_) return false;
    }
    return true;
}

cplx DirichletCharacter::operator()(long n) const {
    long r = n % modulus_;
    if (r < 0) r += modulus_;
    long e = expo_num_[r];
    if (e < 0) return 0.0;
    if (e == 0) return 1.0;
    if (2 * e == expo_den_) return -1.0;
    double t = 2.0 * pi_const * double(e) / double(expo_den_);
    return cplx(std::cos(t), std::sin(t));
}

std::optional<std::pair<long, long>> DirichletCharacter::exponent(long n) const {
    long r = n % modulus_;
    if (r < 0) r += modulus_;
    long e = expo_num_[r];
    if (e < 0) return std::nullopt;
    long g = std::gcd(e, expo_den_);
    if (e == 0) return std::make_pair(0L, 1L);
    return std::make_pair(e / g, expo_den_ / g);
}

bool DirichletCharacter::table_less(const DirichletCharacter& o) const {
    if (modulus_ != o.modulus_) return modulus_ < o.modulus_;
    for (long a = 0; a < modulus_; ++a) {
        // common denominator is the group exponent for catalog characters,
        // but compare as fractions to stay safe for hand-built tables
        long ea = expo_num_[a], eb = o.expo_num_[a];
        if (ea < 0 && eb < 0) continue;
        if ((ea < 0) != (eb < 0)) return eb < 0; // units sort before zeros? both tables share units
        __int128 lhs = __int128(ea) * o.expo_den_;
        __int128 rhs = __int128(eb) * expo_den_;
        if (lhs != rhs) return lhs < rhs;
    }
    return false;
}

bool DirichletCharacter::table_equal(const DirichletCharacter& o) const {
    return !table_less(o) && !o.table_less(*this);
}

DirichletCharacter DirichletCharacter::conjugate() const {
    std::vector<long> e = expo_num_;
    for (long a = 0; a < modulus_; ++a)
        if (e[a] > 0) e[a] = expo_den_ - e[a];
    DirichletCharacter r(modulus_, expo_den_, std::move(e));
    // recover catalog index
    auto all = enumerate_characters(modulus_);
    for (const auto& c : all)
        if (c.table_equal(r)) return c;
    return r;
}

DirichletCharacter DirichletCharacter::primitive_core() const {
    if (primitive_) return *this;
    long f = conductor_;
    std::vector<long> e(f, -1);
    for (long b = 0; b < f; ++b) {
        if (std::gcd(b, f) != 1) continue;
        // lift b to a unit mod N congruent to b mod f
        for (long a = b; a < b + modulus_; a += f) {
            long r = a % modulus_;
            if (r > 0 && std::gcd(r, modulus_) == 1) {
                e[b] = expo_num_[r];
                break;
            }
        }
        if (e[b] < 0) throw error("conductor lift failed");
    }
    DirichletCharacter core(f, expo_den_, std::move(e));
    auto all = enumerate_characters(f);
    for (const auto& c : all)
        if (c.table_equal(core)) return c;
    return core;
}

std::vector<DirichletCharacter> enumerate_characters(long N) {
    if (N < 1) throw parameter_error("modulus must be positive");
    if (N > 100000) throw parameter_error("catalog enumeration capped at modulus 100000");
    auto comps = unit_group(N);
    long group_exp = 1;
    for (const auto& c : comps) group_exp = std::lcm(group_exp, c.order);

    std::vector<long> idx(comps.size(), 0);
    std::vector<DirichletCharacter> out;
    while (true) {
        std::vector<long> table(N, -1);
        for (long a = 0; a < N; ++a) {
            if (N == 1) { table[a] = 0; break; }
            if (std::gcd(a, N) != 1) continue;
            long num = 0;
            bool unit = true;
            for (size_t i = 0; i < comps.size(); ++i) {
                long d = comps[i].dlog[a % comps[i].pe];
                if (d < 0) { unit = false; break; }
                long step = group_exp / comps[i].order;
                num = (num + (__int128(idx[i]) * d) % comps[i].order * step) % group_exp;
            }
            if (unit) table[a] = num;
        }
        out.emplace_back(DirichletCharacter(N, group_exp, std::move(table)));
        // odometer over exponent tuples
        size_t i = 0;
        for (; i < comps.size(); ++i) {
            if (++idx[i] < comps[i].order) break;
            idx[i] = 0;
        }
        if (i == comps.size()) break;
    }
    std::sort(out.begin(), out.end(),
              [](const DirichletCharacter& a, const DirichletCharacter& b) { return a.table_less(b); });
    for (size_t j = 0; j < out.size(); ++j) out[j].index_ = long(j);
    return out;
}

DirichletCharacter character_from_label(const std::string& label) {
    auto dot = label.find('.');
    if (dot == std::string::npos) throw parameter_error("character label must be N.j");
    long N = 0, j = 0;
    try {
        N = std::stol(label.substr(0, dot));
        j = std::stol(label.substr(dot + 1));
    } catch (const std::exception&) {
        throw parameter_error("bad character label: " + label);
    }
    auto all = enumerate_characters(N);
    if (j < 0 || j >= long(all.size()))
        throw parameter_error("character index out of range for modulus " + std::to_string(N));
    return all[j];
}

cplx gauss_sum(const DirichletCharacter& chi) {
    long N = chi.modulus();
    cplx s = 0.0;
    for (long a = 1; a <= N; ++a) {
        cplx v = chi(a);
        if (v == cplx(0.0)) continue;
        double t = 2.0 * pi_const * double(a % N) / double(N);
        s += v * cplx(std::cos(t), std::sin(t));
    }
    return s;
}

cplx root_number(const DirichletCharacter& chi) {
    if (!chi.is_primitive())
        throw primitivity_error("root number needs a primitive character");
    if (chi.modulus() == 1) return 1.0;
    cplx tau = gauss_sum(chi);
    cplx ik = (chi.kappa() == 0) ? cplx(1.0) : cplx(0.0, 1.0);
    cplx eps = tau / (ik * std::sqrt(double(chi.modulus())));
    if (std::abs(std::abs(eps) - 1.0) > 1e-8)
        throw error("root number failed modulus-one check");
    return eps;
}

} // namespace critline::characters
