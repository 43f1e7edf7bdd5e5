#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qarf/groups.hpp"
#include "qarf/rings.hpp"

namespace qarf {

// ---------------------------------------------------------------------------
// Arf expressions: sums mod 2 of generators <a,b>.
//
//   GroupPairs    <g,h> with g, h involutions of a group G, in Arf(F_2[G],α,1)
//   RingPairs     <a,b> with a, b in Λ_1(R) for a commutative R with unit u
//   ReducedPairs  <<a,b>> = <a,b> + <ab,1> for commutative R, trivial
//                 involution, u = -1
//
// Pairs are ordered; <a,b> and <b,a> are different summands until a Swap
// step identifies them.

enum class ArfFlavor { GroupPairs, RingPairs, ReducedPairs };

struct GroupPair {
    groups::Element a, b;
    bool operator==(const GroupPair& o) const { return a == o.a && b == o.b; }
};

struct RingPair {
    Poly a, b;
    bool operator==(const RingPair& o) const { return a == o.a && b == o.b; }
};

class ArfExpression {
public:
    static ArfExpression group(groups::GroupPtr g);
    static ArfExpression ring(PolyRingPtr r, Poly u);
    static ArfExpression reduced(PolyRingPtr r);

    ArfFlavor flavor() const { return flavor_; }
    const groups::GroupPtr& group_ptr() const { return g_; }
    const PolyRingPtr& ring_ptr() const { return r_; }
    const Poly& unit() const { return u_; }

    // Adds one generator (mod 2). Side conditions are checked.
    void toggle(const groups::Element& a, const groups::Element& b);
    void toggle(const Poly& a, const Poly& b);
    // <a,b> for a, b in Λ_1(F_2[G]) (u = 1): expanded bilinearly into
    // involution pairs, the parts of the form h + h^-1 being dropped.
    void toggle_lambda(const GAElem& a, const GAElem& b);

    const std::vector<GroupPair>& group_pairs() const { return gp_; }
    const std::vector<RingPair>& ring_pairs() const { return rp_; }
    int size() const;
    bool empty() const { return size() == 0; }

    ArfExpression& operator+=(const ArfExpression& o);
    friend ArfExpression operator+(ArfExpression a, const ArfExpression& b) { return a += b; }
    bool operator==(const ArfExpression& o) const;
    bool operator!=(const ArfExpression& o) const { return !(*this == o); }

    // Same context (descriptor, ring, unit and flavor).
    bool compatible(const ArfExpression& o) const;
    ArfExpression empty_like() const;

private:
    ArfFlavor flavor_ = ArfFlavor::GroupPairs;
    groups::GroupPtr g_;
    PolyRingPtr r_;
    Poly u_;
    std::vector<GroupPair> gp_;  // sorted, no repeats
    std::vector<RingPair> rp_;   // sorted, no repeats
};

std::string to_string(const ArfExpression& e);
// Display form with each pair written smaller component first.
std::string to_display_string(const ArfExpression& e);

// "<w1, w2> + <w3, w4>", "0"
ArfExpression parse_group_expression(const groups::GroupPtr& g, std::string_view text);
// "<a, b> + ..." with polynomial entries; "<<a, b>> + ..." for the reduced flavor
ArfExpression parse_ring_expression(const PolyRingPtr& r, const Poly& u, std::string_view text);
ArfExpression parse_reduced_expression(const PolyRingPtr& r, std::string_view text);

// ---------------------------------------------------------------------------
// Derivation steps. Each step names one relation instance.
//
// Group flavor
//   Swap               <a,b> = <b,a>
//   Conj(x)            <a,b> = <xax^-1, xbx^-1>
//   Absorb             slot 2: <a,b> = <a,bab>;  slot 1: <a,b> = <aba,b>.
//                      Backward direction replaces the slot by the witness w
//                      with waw = b (slot 2) or wbw = a (slot 1).
//   CentralAbsorb(c)   <a,b> = <a,bc> (slot 2) or <ac,b> (slot 1), c an
//                      involution commuting with a and b
//   PowerTwo(k)        <a,b> = <a,a(ab)^{2^k}> (slot 2) or <b,b(ab)^{2^k}>
//                      (slot 1); backward with witness
//   FiniteOrderCancel  <a,az> + <b,bz> = 0 when ab z^i has finite order
//                      (pair2 given), or <a,az> = <b,bz> (witness b)
// Ring flavors
//   Swap               <a,b> = <b,uau^-1>;  <<a,b>> = <<b,a>>
//   Conj(x)            <a, α(x)bx> = <xaα^-1(x), b>;  <<a, bx^2>> = <<ax^2, b>>
//                      (forward moves x from slot 2 to slot 1; the untouched
//                      factor is the witness)
//   Absorb             <a,b> = <a, baα^-1(b)>;  <<a,b>> = <<a,ab^2>>
//   BilinearSplit      <a,b1+b2> = <a,b1> + <a,b2> (witness b1, slot chooses
//                      the component); with pair2 the inverse merge
//   GammaDrop          <a,b> = 0 for b in Γ_1 (slot 2) or a in Γ_1 (slot 1);
//                      <<a,b>> = 0 for a or b in 2R
//   UnitDrop           <<a,1>> = <<1,a>> = 0

enum class Relation {
    Swap,
    Conj,
    Absorb,
    CentralAbsorb,
    PowerTwo,
    FiniteOrderCancel,
    BilinearSplit,
    GammaDrop,
    UnitDrop
};

std::string relation_name(Relation r);
Relation relation_from_name(std::string_view name);

struct DerivationStep {
    Relation rel = Relation::Swap;
    int pair = 0;       // index into the sorted pair list before the step
    int pair2 = -1;     // second pair for two-pair relations
    int slot = 2;       // 1 or 2
    bool forward = true;
    int k = 0;          // PowerTwo exponent, FiniteOrderCancel power i
    // group parameters (conjugator, central element, witness)
    std::optional<groups::Element> x;
    std::optional<groups::Element> witness;
    // ring parameters
    std::optional<Poly> px;
    std::optional<Poly> pwitness;
};

// Applies one step. Throws PreconditionError naming the failed side
// condition.
ArfExpression apply_step(const ArfExpression& e, const DerivationStep& s);

struct DerivationResult {
    bool ok = false;
    int failed_step = -1;  // index of the rejected step, or steps.size() for a target mismatch
    std::string message;
    std::vector<std::string> transcript;  // start and every intermediate
};

DerivationResult check_derivation(const ArfExpression& start, const std::vector<DerivationStep>& steps,
                                  const ArfExpression& target);

std::string to_string(const DerivationStep& s, const ArfExpression& context);

// ---------------------------------------------------------------------------
// Relation 7: sum_i <(X^α Z)_ii, (Y^α T)_ii> for M = (X Y; Z T) with
// t_{α,u}(M) = M^-1.

ArfExpression gq_relation_instance(const Matrix<GAElem>& m, const GAElem& u);
ArfExpression gq_relation_instance(const Matrix<Poly>& m, const Poly& u);

} // namespace qarf

namespace qarf {

// ---------------------------------------------------------------------------
// Worked equality chains, encoded as derivations.

struct WorkedDerivation {
    std::string name;
    ArfExpression start;
    ArfExpression target;
    std::vector<DerivationStep> steps;
};

// <S,SX^2Y^2> = <SX,SX^3Y^2> in <X,Y,S | S^2 = (XS)^2 = Y^12 = 1, SYS = Y^5, XY = YX>
WorkedDerivation chain_c2_c_c12();
// In <Y,S | S^2 = (YS)^4 = (Y^2S)^2 = 1>:
//   <Y^{2i}S, Y^2S> = <Y^{2i-2}S, S>
WorkedDerivation chain_d4_shift(int i);
//   <Y^{4i}S, S> = <Y^{2i}S, S>
WorkedDerivation chain_d4_halve(int i);
//   <Y^{2i}S, S> = <Y^{-2i}S, S>
WorkedDerivation chain_d4_reflect(int i);
//   <Y^{2i}S, Y^{2j}S> = <Y^{2i-4k}S, Y^{2j-4k}S>
WorkedDerivation chain_d4_translate(int i, int j, int k);

std::vector<WorkedDerivation> worked_derivations();

} // namespace qarf
