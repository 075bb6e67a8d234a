#pragma once

// Dirichlet characters mod N as exact tables of rational exponents:
// chi(a) = e^{2 pi i t(a)} with t(a) in [0,1) stored as a fraction, so
// equality tests and the lexicographic catalog order are exact.

#include <optional>
#include <string>
#include <vector>

#include "critline/numeric.hpp"

namespace critline::characters {

class DirichletCharacter {
  public:
    // exponent numerators over a common denominator; -1 marks chi(a) = 0
    DirichletCharacter(long modulus, long expo_den, std::vector<long> expo_num);

    long modulus() const { return modulus_; }
    long index() const { return index_; }          // position in catalog order
    std::string label() const;                     // "N.j"
    bool is_principal() const;
    bool is_primitive() const { return primitive_; }
    long conductor() const { return conductor_; }
    int kappa() const { return kappa_; }           // 0 even, 1 odd
    bool is_real() const;

    cplx operator()(long n) const;                 // chi(n), n any integer
    // exact exponent of chi(n) as (num, den), or nullopt when chi(n) = 0
    std::optional<std::pair<long, long>> exponent(long n) const;

    DirichletCharacter conjugate() const;
    // primitive character inducing this one (self when already primitive)
    DirichletCharacter primitive_core() const;

    // exact lexicographic order on the exponent table
    bool table_less(const DirichletCharacter& o) const;
    bool table_equal(const DirichletCharacter& o) const;

  private:
    friend std::vector<DirichletCharacter> enumerate_characters(long N);
    long modulus_;
    long expo_den_;                 // common denominator (the group exponent)
    std::vector<long> expo_num_;    // size N, -1 for non-units
    long index_ = -1;
    bool primitive_ = false;
    long conductor_ = 1;
    int kappa_ = 0;
};

// all phi(N) characters mod N, sorted by table_less; index() set to position
std::vector<DirichletCharacter> enumerate_characters(long N);

// parse a "N.j" selector against the catalog order
DirichletCharacter character_from_label(const std::string& label);

// Gauss sum tau(chi) = sum_a chi(a) e^{2 pi i a / N}
cplx gauss_sum(const DirichletCharacter& chi);

// root number eps(chi) = tau(chi) / (i^kappa sqrt(N)); primitive chi only
cplx root_number(const DirichletCharacter& chi);

} // namespace critline::characters
