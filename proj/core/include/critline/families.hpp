#pragma once

// Catalog of symmetrized families f(s) = h(s) +- h(2a-s) (real mode) and
// f(s) = h(s) +- conj(h(2a - conj s)) (conjugate mode). build_family wires
// the evaluators, the phase normalization h(a) > 0, the declared pole/zero
// inventory right of the critical line, and a certified envelope for |F|,
// F(s) = (reflected term)/h(s).

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "critline/characters.hpp"
#include "critline/numeric.hpp"
#include "critline/poly.hpp"
#include "critline/specfun.hpp"

namespace critline::families {

enum class Sign { minus, plus };
enum class Mode { real_onesided, conjugate_twosided };

inline const char* sign_name(Sign s) { return s == Sign::minus ? "minus" : "plus"; }

// positive definite binary quadratic form a u^2 + b uv + c v^2
struct QuadraticForm {
    double a = 1, b = 0, c = 1;
    double discriminant4() const { return 4 * a * c - b * b; } // = Delta > 0
};

struct GClassEntry {
    double b;      // coefficient b_j
    double lambda; // lambda_j
    double A;      // A_j
};

// user-supplied h for the custom variant
struct MeromorphicSpec {
    std::function<SpecialValue(cplx)> eval;
    double axis = 0.0;
    bool real_on_real = true;
    // zeros of h with sigma > axis (with multiplicity), if known
    int zeros_right = 0;
    // poles of h as (location, order)
    std::vector<std::pair<cplx, int>> poles;
    // declared zeros (order > 0) / poles (order < 0) of h on the critical
    // line; with factor_out_line_points the builder divides them out so the
    // hypothesis h(a) != 0 holds for the family actually counted
    std::vector<std::pair<cplx, int>> line_points;
    bool factor_out_line_points = true;
    // certified upper bound for |h(2a-s)/h(s)| on sigma >= x, if available
    std::function<double(double)> envelope;
    std::string description = "custom";
};

struct Zeta2Params { double alpha; double beta; };
struct TranslateParams { double alpha; bool completed = true; };
struct EisensteinParams { double y; };
struct HPolyParams { double y; poly::RealPolynomial p; };
struct WengParams { double T; };
struct EpsteinParams { QuadraticForm Q; int n; };
struct GClassParams { double lambda; std::vector<GClassEntry> entries; };
struct LTranslateParams {
    double alpha;
    characters::DirichletCharacter chi;
    std::vector<cplx> p = {1.0}; // ascending coefficients, complex allowed
};
struct CustomParams { MeromorphicSpec h; };

using FamilyParams = std::variant<Zeta2Params, TranslateParams, EisensteinParams,
                                  HPolyParams, WengParams, EpsteinParams,
                                  GClassParams, LTranslateParams, CustomParams>;

struct FamilySpec {
    FamilyParams params;
    Sign sign = Sign::minus;
    // count on both sides of the real axis (automatic for families whose h
    // is not real on the real axis; a real family may opt in, its f is even
    // about the axis and the two-sided counts are just doubled)
    bool conjugated = false;
};

struct SymmetricFamily {
    std::string name;
    Sign sign = Sign::minus;
    Mode mode = Mode::real_onesided;
    double a = 0.0;     // critical line Re s = a
    Rational u;         // u_+ = 1/2, u_- = 1 (real mode)

    // normalized h: real mode has h(a) > 0; conjugate mode folds the root
    // number into h so that f = h(s) +- conj(h(2a - conj s)) on both modes
    std::function<SpecialValue(cplx)> h;
    // counting evaluator (poles cleared off the line where the catalog does so)
    std::function<SpecialValue(cplx)> f;
    // public evaluator; equals f except where the catalog documents a
    // normalized form (a0 for the Eisenstein constant term, Z^T for the
    // truncated Weng zeta, G resp. Z_{Q,n} for the Bessel-series families)
    std::function<SpecialValue(cplx)> display;

    // certified envelope for |F| on sigma >= x including the safety factor;
    // empty when no certification exists (custom without envelope)
    std::function<double(double)> envelope;

    // optional rescaling of f by a nonvanishing analytic factor on sigma > a,
    // evaluated in log space so it stays representable at heights where f
    // itself underflows; shares f's zeros there (far-field box scans)
    std::function<SpecialValue(cplx)> far_field;

    // declared inventory (exact by construction for catalog variants)
    std::vector<std::pair<cplx, int>> f_poles; // all poles of f
    int P_h_right = 0;  // poles of h with sigma > a, with multiplicity
    int N_h_right = 0;  // zeros of h with sigma > a (or -1: compute numerically)
    bool h_entire = false;

    // sign making phase_sign * h(a) > 0; the catalog keeps h in its natural
    // orientation and phase tracing applies this factor (real mode only)
    double phase_sign = 1.0;

    // hint for real-axis zero scans
    double real_scan_limit = 30.0;

    SpecialValue eval_f(cplx s) const { return f(s); }
    SpecialValue eval_h(cplx s) const { return h(s); }
    SpecialValue ratio_F(cplx s) const;
    int P_f_right() const; // poles of f with sigma > a, with multiplicity
    bool conjugate() const { return mode == Mode::conjugate_twosided; }
};

SymmetricFamily build_family(const FamilySpec& spec);

// certified upper bound for |F(s)| valid on Re s >= sigma (safety factor
// included); throws envelope_error when the family has none
double stirling_envelope(const SymmetricFamily& fam, double sigma);

// smallest sigma0 with envelope < 1/2, capped; the cap value is still usable
// for counting whenever envelope(cap) < 1, which count_N verifies
double choose_sigma0(const SymmetricFamily& fam, double cap = 40.0);

// flat key=value family description (decimal commas normalized in scalars)
FamilySpec parse_family_file(const std::string& path);
FamilySpec parse_family_kv(const std::vector<std::pair<std::string, std::string>>& kv);

// "2,61117" -> 2.61117; plain decimal points pass through
double parse_real_token(const std::string& text);

// Epstein helper: G-class data of the weight-n partial sum of the form Q
GClassParams epstein_to_gclass(const QuadraticForm& Q, int n);

} // namespace critline::families
