#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qarf/arf.hpp"

namespace qarf {

// ---------------------------------------------------------------------------
// K(G) = F_2[G]/kappa = F_2[cl(G)], stored as a set of canonical
// representatives.

class KGClass {
public:
    KGClass() = default;
    explicit KGClass(groups::GroupPtr g) : g_(std::move(g)) {}

    const groups::GroupPtr& group() const { return g_; }
    const groups::ElementSet& reps() const { return reps_; }
    bool is_zero() const { return reps_.empty(); }
    // adds the class of x
    void toggle(const groups::Element& x);

    KGClass& operator+=(const KGClass& o);
    friend KGClass operator+(KGClass a, const KGClass& b) { return a += b; }
    bool operator==(const KGClass& o) const { return reps_ == o.reps_; }
    bool operator!=(const KGClass& o) const { return !(*this == o); }

private:
    groups::GroupPtr g_;
    groups::ElementSet reps_;
};

std::string to_string(const KGClass& c);

// ---------------------------------------------------------------------------
// R/kappa(R) for commutative polynomial rings, kappa = span{x + x^2, y + ybar}.
// Monomials are identified along m ~ m^2 (and m ~ m^-1 when the involution
// inverts the variables); monomials in a nilpotent variable vanish, and
// everything vanishes in odd characteristic.

class CRClass {
public:
    CRClass() = default;
    explicit CRClass(PolyRingPtr r) : r_(std::move(r)) {}

    const PolyRingPtr& ring() const { return r_; }
    const std::set<Monomial>& reps() const { return reps_; }
    bool is_zero() const { return reps_.empty(); }
    void toggle_monomial(const Monomial& m);
    void add(const Poly& p);

    CRClass& operator+=(const CRClass& o);
    friend CRClass operator+(CRClass a, const CRClass& b) { return a += b; }
    bool operator==(const CRClass& o) const { return reps_ == o.reps_; }
    bool operator!=(const CRClass& o) const { return !(*this == o); }

    // the canonical representative as a polynomial with coefficients 1
    Poly representative() const;

private:
    PolyRingPtr r_;
    std::set<Monomial> reps_;
};

// Orbit-minimal representative, nullopt when the orbit is zero.
std::optional<Monomial> cr_canonical(const PolyRing& r, const Monomial& m);
CRClass cr_class(const Poly& p);
std::string to_string(const CRClass& c);

// For trivial involution: p = rest + 2x + y + y^2 with rest reduced
// (coefficients 0/1 on canonical monomials). `rest` is zero exactly when
// [p] = 0 in C(R).
struct CReduction {
    Poly rest, x, y;
};
CReduction c_reduce(const Poly& p);

// ---------------------------------------------------------------------------
// The Arf invariant omega: <A,B> -> [Tr(A^alpha B)].

using OmegaValue = std::variant<KGClass, CRClass>;

OmegaValue omega(const ArfExpression& e);
KGClass omega_group(const ArfExpression& e);
CRClass omega_ring(const ArfExpression& e);
std::string to_string(const OmegaValue& v);
bool operator==(const OmegaValue& a, const OmegaValue& b);

// ---------------------------------------------------------------------------
// omega_1 into H^0(1 + I_n) for commutative R, and lambda / mu with C(R).

struct UnitClass {
    Truncated<Poly> rep;
    int degree() const { return rep.degree(); }
};

// f = fbar and f = 1 mod T
bool in_cycles(const Truncated<Poly>& f);

// prod over pairs of 1 + alpha(a) b T^2/(1+T) in R_n
UnitClass omega1(const ArfExpression& e, int n);

// lambda([f]) = [b bbar] for f = 1 + aT + bT^2 + ...; needs trivial
// involution on R and n even.
CRClass lambda(const UnitClass& f);
// mu([z]) = [1 + z T^2/(1+T)]
UnitClass mu(const CRClass& z, int n);

// For h in Z with lambda(h) = 0, a unit g in 1 + I_n with h g gbar = 1,
// built degree by degree as in the proof that mu is well defined. Returns
// nullopt when lambda(h) != 0.
std::optional<Truncated<Poly>> norm_certificate(const Truncated<Poly>& h);

// [f] = [g] in H^0(1 + I_n), decided by a norm certificate for f g^-1.
bool unit_classes_equal(const UnitClass& f, const UnitClass& g);

// ---------------------------------------------------------------------------
// Coker(delta) for Z[G], G finite:
//   {a in Z[G]_ab | a = abar} / span{g - h^-1gh, g_1 + g_1^-1, g_2 + g_2^2 | g_2 ~ g_2^-1}

struct H0Cokernel {
    int dimension = 0;
    // conjugacy-class representatives whose classes form a basis
    std::vector<groups::Element> basis;
    // self-inverse conjugacy classes (the spanning set before the relations)
    std::vector<groups::Element> self_inverse_classes;
};

H0Cokernel group_ring_h0_cokernel(const groups::FiniteGroupPtr& g);

} // namespace qarf
