#pragma once

#include <optional>
#include <string_view>
#include <string>
#include <vector>

#include "qarf/groups.hpp"
#include "qarf/kinv.hpp"

namespace qarf {

// ---------------------------------------------------------------------------
// Kähler differentials of a polynomial ring: the free module on dx_i.
// Laurent rings are supported; rings with nilpotent variables are not.

class DifferentialForm {
public:
    DifferentialForm() = default;
    explicit DifferentialForm(PolyRingPtr r);

    static DifferentialForm basis(PolyRingPtr r, int i);

    const PolyRingPtr& ring() const { return r_; }
    const Poly& coeff(int i) const { return c_.at(i); }
    Poly& coeff(int i) { return c_.at(i); }
    int size() const { return static_cast<int>(c_.size()); }
    bool is_zero() const;

    DifferentialForm& operator+=(const DifferentialForm& o);
    DifferentialForm& operator-=(const DifferentialForm& o);
    friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
    friend DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a -= b; }
    DifferentialForm operator-() const;
    friend DifferentialForm operator*(const Poly& p, const DifferentialForm& w);
    bool operator==(const DifferentialForm& o) const { return c_ == o.c_; }
    bool operator!=(const DifferentialForm& o) const { return !(*this == o); }

private:
    PolyRingPtr r_;
    std::vector<Poly> c_;
};

// Universal derivation.
DifferentialForm delta(const Poly& p);
// "a dX + b dY"
std::string to_string(const DifferentialForm& w);
DifferentialForm parse_form(const PolyRingPtr& r, std::string_view text);

// Canonical representative of the class in Omega/(2 Omega + delta R):
// coefficients 0/1, and in each multidegree the first log-coordinate with odd
// exponent eliminated against delta of the monomial.
DifferentialForm reduce_mod_2_delta(const DifferentialForm& w);

// ---------------------------------------------------------------------------
// 2-lambda structure with theta^2(x_i) = 0, for torsion-free rings (Z and
// integral polynomial or Laurent rings): psi^2(f)(x) = f(x^2),
// theta^2(f) = (f^2 - psi^2(f))/2.

class LambdaStructure {
public:
    // nullopt when no structure is registered for the ring.
    static std::optional<LambdaStructure> for_ring(const PolyRingPtr& r);
    static LambdaStructure require(const PolyRingPtr& r);

    const PolyRingPtr& ring() const { return r_; }
    Poly theta2(const Poly& a) const;
    Poly psi2(const Poly& a) const;

private:
    explicit LambdaStructure(PolyRingPtr r) : r_(std::move(r)) {}
    PolyRingPtr r_;
};

// phi^2(a db) = psi^2(a)(b db - d theta^2(b)), extended additively over the
// terms c x^e dx_i (as a db with a = c x^e, b = x_i).
DifferentialForm phi2(const LambdaStructure& L, const DifferentialForm& w);
// phi^2(a db) on a single generator.
DifferentialForm phi2_generator(const LambdaStructure& L, const Poly& a, const Poly& b);

// ---------------------------------------------------------------------------
// Dennis-Stein symbols <a,b> in K_2(R_n, I_n), R_n = R[T]/(T^{n+1}).

using TPoly = Truncated<Poly>;

struct DSSymbol {
    TPoly a, b;
};

DSSymbol make_symbol(const TPoly& a, const TPoly& b);
// {r,s} = <(1-r)s^-1, s>
DSSymbol steinberg_symbol(const TPoly& r, const TPoly& s);
std::string to_string(const DSSymbol& s);

// n = 1: (alpha, [c]) in Omega_R + R/2R.
// n = 2: (alpha, [r, gamma]) in Omega_R + (R + Omega_R)/span{(2a, da)}.
struct NuValue {
    int n = 1;
    DifferentialForm alpha;
    Poly r;
    DifferentialForm gamma;

    bool is_zero() const { return alpha.is_zero() && r.is_zero() && gamma.is_zero(); }
    bool operator==(const NuValue& o) const { return n == o.n && alpha == o.alpha && r == o.r && gamma == o.gamma; }
    bool operator!=(const NuValue& o) const { return !(*this == o); }
};

NuValue nu_zero(const PolyRingPtr& r, int n);
NuValue operator+(const NuValue& x, const NuValue& y);
NuValue operator-(const NuValue& x);
NuValue operator-(const NuValue& x, const NuValue& y);
std::string to_string(const NuValue& v);

// nu_1 / tilde nu_2 on arbitrary symbols; generators use the closed
// formulas, other symbols are first rewritten into generators with the
// defining relations.
NuValue nu(const LambdaStructure& L, const DSSymbol& s);
NuValue nu1(const LambdaStructure& L, const DSSymbol& s);
NuValue nu2(const LambdaStructure& L, const DSSymbol& s);
NuValue nu(const LambdaStructure& L, const std::vector<DSSymbol>& sum);

// nu_1^-1(sum a_i dx_i, [c]) = sum <a_i T, x_i> + <a_i^2 theta^2(x_i) T, T> + <cT, T>
std::vector<DSSymbol> nu1_inverse(const LambdaStructure& L, const DifferentialForm& alpha, const Poly& c);

enum class DSRelation { AntiSymmetry, Additivity, Multiplicativity };
std::string ds_relation_name(DSRelation r);

// nu(LHS) - nu(RHS) for
//   AntiSymmetry      <a,b> + <b,a> = 0          (a or b in I)
//   Additivity        <a,b> + <a,c> = <a,b+c-abc> (a in I, or b and c in I)
//   Multiplicativity  <a,bc> = <ab,c> + <ac,b>    (a, b or c in I)
// Throws when the side condition fails.
NuValue ds_relation_residual(const LambdaStructure& L, DSRelation rel, const TPoly& a, const TPoly& b,
                             const std::optional<TPoly>& c = std::nullopt);

// ---------------------------------------------------------------------------
// Omega_R / (2 Omega_R + delta R + {x dy + x^2 y dy}).
// Modulo 2 Omega + delta R the relation for general y reduces to monomial y,
// and then to M dlog x_i = M^2 dlog x_i for monomials M. The class is stored
// as a canonical form: one log-term per squaring orbit, first odd
// coordinate eliminated against delta of the orbit root.

class OmegaQuotientClass {
public:
    OmegaQuotientClass() = default;
    explicit OmegaQuotientClass(const DifferentialForm& w);

    const DifferentialForm& rep() const { return rep_; }
    bool is_zero() const { return rep_.is_zero(); }
    OmegaQuotientClass& operator+=(const OmegaQuotientClass& o);
    friend OmegaQuotientClass operator+(OmegaQuotientClass a, const OmegaQuotientClass& b) { return a += b; }
    bool operator==(const OmegaQuotientClass& o) const { return rep_ == o.rep_; }
    bool operator!=(const OmegaQuotientClass& o) const { return !(*this == o); }

private:
    DifferentialForm rep_;
};

std::string to_string(const OmegaQuotientClass& c);

// Bounded search for w in span{x dy + x^2 y dy} modulo 2 Omega + delta R with
// x a monomial and y a sum of at most `ysupport` monomials from the window.
// true means a certificate was found; false is inconclusive.
bool in_extra_span_window(const DifferentialForm& w, int window, int ysupport);

// omega_2(<<a,b>>) = class of a db; needs a registered lambda structure.
OmegaQuotientClass omega2(const ArfExpression& e);

// <a,b> -> ([ab], [a db]) for RingPairs with u = -1 (or u = 1 in
// characteristic 2) and ReducedPairs, trivial involution.
struct TotalInvariant {
    CRClass primary;
    OmegaQuotientClass secondary;
    bool operator==(const TotalInvariant& o) const { return primary == o.primary && secondary == o.secondary; }
    bool operator!=(const TotalInvariant& o) const { return !(*this == o); }
};

TotalInvariant total_invariant(const ArfExpression& e);
std::string to_string(const TotalInvariant& t);

// ---------------------------------------------------------------------------
// The group G = <X,Y,S | S^2 = (XS)^2 = (YS)^2 = 1, XY = YX> and R = F_2[H],
// H = <X,Y>.

// F_2[X^+-1, Y^+-1] with the trivial involution (target of psi) and with
// X -> X^-1 (the group-ring involution).
PolyRingPtr z2c2_coefficient_ring();
PolyRingPtr z2c2_involutive_ring();
// X^i Y^j -> X^-i Y^-j
Poly bar_variables(const Poly& p);

// <X^iY^jS, X^kY^lS> -> <X^-iY^-j, X^kY^l> + <X^iY^j, X^-kY^-l>
ArfExpression psi_representation_map(const ArfExpression& e);

// <fS, gS> -> ([f gbar], [fbar dg + f dgbar]); pairs through 1 count as <S,S>.
struct Z2C2Invariant {
    CRClass primary;  // in R / span{a + abar, b + b^2}
    OmegaQuotientClass secondary;
    bool operator==(const Z2C2Invariant& o) const { return primary == o.primary && secondary == o.secondary; }
    bool operator!=(const Z2C2Invariant& o) const { return !(*this == o); }
};
Z2C2Invariant z2c2_invariant(const ArfExpression& e);

// Basis of Arf^s(G): <1,1>, <X^mY^nS,S>, <X^mY^nS,XS>, <X^mY^nS,YS> with the
// parity and sign restrictions of the generating set.
enum class Z2C2Kind { One = 0, WithS = 1, WithXS = 2, WithYS = 3 };
struct Z2C2Basis {
    Z2C2Kind kind = Z2C2Kind::One;
    std::int64_t m = 0, n = 0;
    auto operator<=>(const Z2C2Basis&) const = default;
};
bool z2c2_is_basis(const Z2C2Basis& b);
std::string to_string(const Z2C2Basis& b);

// Normal form by the rewriting of the generating-set proof.
std::vector<Z2C2Basis> z2c2_normal_form(const ArfExpression& e);
// Single generator <X^iY^jS, X^kY^lS> in normal form.
std::vector<Z2C2Basis> z2c2_normal_form_pair(std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t l);

// The normal form as f', g, h with xi = <f'S,S> + <gS,XS> + <hS,YS>.
struct Z2C2Coordinates {
    Poly f, g, h;
};
Z2C2Coordinates z2c2_coordinates(const std::vector<Z2C2Basis>& nf);

// Decision for the constrained shape
//   (g X^-1 + gbar X) X^-1 dX + (h Y^-1 + hbar Y) Y^-1 dY
// with g = g_2^2 Y + g_3^2 XY (g_2, g_3 with nonnegative Y-exponents) and
// h = h_3^2 XY (h_3 with nonnegative X-exponents): the form is zero in the
// quotient exactly when g = h = 0. Throws when the form is not of that shape.
struct QuotientDecision {
    bool zero = true;
    Poly g, h;
    std::string witness;
};
QuotientDecision omega_quotient_decide(const DifferentialForm& w);
// The form attached to (g, h).
DifferentialForm z2c2_constrained_form(const Poly& g, const Poly& h);

// Equality in Arf^s(G), decided by normal forms and cross-checked against
// the invariant; throws Error if the two routes disagree.
enum class Z2C2Verdict { Equal, Distinct };
struct Z2C2Comparison {
    Z2C2Verdict verdict = Z2C2Verdict::Equal;
    std::vector<Z2C2Basis> difference;  // normal form of e1 + e2
    Z2C2Invariant invariant;            // invariant of e1 + e2
};
Z2C2Comparison z2c2_compare(const ArfExpression& e1, const ArfExpression& e2);

} // namespace qarf
