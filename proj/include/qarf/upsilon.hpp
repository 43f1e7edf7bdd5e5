#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qarf/arf.hpp"
#include "qarf/groups.hpp"
#include "qarf/linalg.hpp"

namespace qarf {

using groups::Element;
using groups::ElementType;
using linalg::BitVec;

// ---------------------------------------------------------------------------
// J_# = J / <squares> for J = G_z or the extended centralizer of z, computed
// on a finite model J/N with N a normal subgroup inside J^2 (N trivial for
// finite J; N generated by the square of a translation for infinite J in
// the built-in infinite families).

class SharpGroup {
public:
    SharpGroup() = default;

    int dim() const { return dim_; }
    bool contains(const Element& g) const;
    // coordinates of the class of g; throws PreconditionError when g is not in J
    BitVec coords(const Element& g) const;
    // elements whose classes form the coordinate basis
    const std::vector<Element>& basis() const { return basis_; }
    // one representative per element of J/N, in encoding order
    const std::vector<Element>& model() const { return elems_; }
    // 2M when N = <T^{2M}> (or 2 for N = 2Z^n), 0 when J is finite
    std::int64_t period() const { return period_; }

private:
    friend SharpGroup make_sharp(const groups::Group&, const std::vector<Element>&,
                                 const std::function<bool(const Element&)>&);
    const groups::Group* g_ = nullptr;
    std::function<Element(const Element&)> reduce_;
    std::function<bool(const Element&)> member_;
    std::vector<Element> elems_;
    std::map<Element, int, groups::ElementLess> index_;
    std::vector<BitVec> coords_;
    std::vector<Element> basis_;
    int dim_ = 0;
    std::int64_t period_ = 0;
};

// J_# for the subgroup generated by gens; member decides membership in J.
SharpGroup make_sharp(const groups::Group& g, const std::vector<Element>& gens,
                      const std::function<bool(const Element&)>& member);
// (G_z)_# (extended = false) or (extended centralizer)_#.
SharpGroup centralizer_sharp(const groups::Group& g, const Element& z, bool extended);

// ---------------------------------------------------------------------------
// F(z): (G_z)_#/sqrt(z) x C_2 (type 1), (extended G_z)_#/sqrt(z) (type 2),
// (G_z)_#/sqrt(z) (type 3). Local coordinates: those of the sharp group,
// followed by t for type 1.

class FzGroup {
public:
    FzGroup() = default;
    FzGroup(const groups::Group& g, const Element& z, const std::vector<Element>& root_candidates);

    const Element& z() const { return z_; }
    ElementType type() const { return type_; }
    const SharpGroup& sharp() const { return sharp_; }
    // local coordinate count (sharp dimension, plus one for t in type 1)
    int ambient() const { return sharp_.dim() + (type_ == ElementType::Type1 ? 1 : 0); }
    // dimension of F(z)
    int dim() const { return ambient() - root_.rank(); }
    // generators of sqrt(z) found among the candidates
    const std::vector<Element>& roots() const { return roots_; }
    const linalg::F2Subspace& root_span() const { return root_; }
    // local vector of ([g], t^i); t only for type 1
    BitVec local(const Element& g, int t = 0) const;
    bool is_zero(const BitVec& v) const { return root_.contains(v); }
    // w(g) = 0 on G_z, 1 on the rest of the extended centralizer
    int w(const Element& g) const;

private:
    const groups::Group* g_ = nullptr;
    Element z_;
    ElementType type_ = ElementType::Type1;
    SharpGroup sharp_;
    std::vector<Element> roots_;
    linalg::F2Subspace root_;
};

// ---------------------------------------------------------------------------
// L(c): the colimit of F(z) over z in the cl class c.

class LcGroup {
public:
    const Element& rep() const { return rep_; }
    int dim() const { return quotient_ ? quotient_->dim() : 0; }
    // false when the diagram was truncated by a window; equalities found in a
    // truncated diagram still hold in L(c), distinctness may not
    bool exact() const { return exact_; }
    // "finite", "window N", "closed form"
    const std::string& source() const { return source_; }
    int vertex_count() const { return vertex_count_; }

    // image of ([g], t^i) in F(z) for a member z of c; nullopt when z is not
    // a vertex of the computed diagram
    std::optional<BitVec> image(const Element& z, const Element& g, int t = 0) const;
    // readable form: a single generator "[g]", "t", "[g]+t" when one exists,
    // trying the (z, g, t) hints first
    std::string format(const BitVec& v, const std::vector<std::tuple<Element, Element, int>>& hints = {}) const;

private:
    friend LcGroup l_of_class_window(const groups::Group&, const Element&, int, const std::vector<Element>&);
    friend LcGroup l_of_class_closed(const groups::Group&, const Element&);
    const groups::Group* g_ = nullptr;
    Element rep_;
    bool exact_ = true;
    std::string source_;
    int vertex_count_ = 0;
    std::function<std::optional<BitVec>(const Element&, const Element&, int)> ambient_image_;
    std::optional<linalg::F2Quotient> quotient_;
    // (z, g, t) triples tried, in order, when naming a vector
    std::vector<std::tuple<Element, Element, int>> names_;
};

// Window engine: vertices are the members of c reachable from the seeds
// inside g.window(window) through squaring, inversion and conjugation by
// generators. Exact for finite groups and for classes closed in the window.
LcGroup l_of_class_window(const groups::Group& g, const Element& rep, int window,
                          const std::vector<Element>& seeds = {});
// Registered closed forms (Z^n x| C_2): L([1]) = C_2 on t, and for z = v of
// infinite order L = G_# / <odd part of v>.
LcGroup l_of_class_closed(const groups::Group& g, const Element& rep);
bool has_closed_form(const groups::Group& g);
// Closed form when registered, window engine otherwise.
LcGroup l_of_class(const groups::Group& g, const Element& rep, int window = 6,
                   const std::vector<Element>& seeds = {});

// ---------------------------------------------------------------------------
// Values in J(G) = (+)_c L(c).

struct JTerm {
    Element cls;        // cl representative
    BitVec coords;      // coordinates in L(cls)
    std::string text;   // "L([rep]): [g]"
};

struct JValue {
    std::vector<JTerm> terms;  // nonzero terms only, in encoding order of cls
    bool exact = true;
    bool is_zero() const { return terms.empty(); }
    std::string to_string() const;
};

// Upsilon(<g,h>) in F(gh): ([h], t) for gh of type 1, [h] for type 2.
struct UpsilonSummand {
    Element z;
    Element h;
    int t = 0;
};
UpsilonSummand upsilon_summand(const groups::Group& g, const Element& a, const Element& b);

JValue upsilon_eval(const ArfExpression& e, int window = 6);

enum class UpsilonVerdict { Distinct, SameImage, Equal, Unknown };
std::string verdict_name(UpsilonVerdict v);

struct UpsilonDecision {
    UpsilonVerdict verdict = UpsilonVerdict::Unknown;
    std::string witness;
    std::vector<std::string> transcript;
};

// Compares Upsilon(e1) and Upsilon(e2) coordinate-wise. SameImage becomes
// Equal for groups with two ends, where Upsilon is injective.
UpsilonDecision upsilon_distinguish(const ArfExpression& e1, const ArfExpression& e2, int window = 6,
                                    int max_window = 24);

bool has_two_ends(const groups::Group& g);

// dim J(G) for a finite group
int j_dimension(const groups::FiniteGroupPtr& g);

// ---------------------------------------------------------------------------
// Sigma(G) summands and the coordinate maps eta (finite groups).

// [sum a_i (x) g_i, n1 z + n2 z^-1, n3 z + n4 z^-1] over F_2.
struct TotChain {
    std::vector<std::pair<bool, Element>> terms;  // (a_i = z^-1, g_i)
    int n1 = 0, n2 = 0, n3 = 0, n4 = 0;
};

class SigmaSummand {
public:
    SigmaSummand(const groups::FiniteGroupPtr& g, const Element& z);

    const Element& z() const { return z_; }
    ElementType type() const { return type_; }
    int dim() const { return quotient_->dim(); }
    // cycle condition of the summand's eta
    bool is_cycle(const TotChain& c) const;
    // coordinates of eta(c)
    BitVec eta(const TotChain& c) const;

private:
    groups::FiniteGroupPtr g_;
    Element z_;
    ElementType type_;
    // model group: G_z, or the pull-back with C_4 for type 2, on indices
    std::vector<Element> elems_;
    std::vector<int> tpow_;
    std::vector<BitVec> coords_;
    std::optional<linalg::F2Quotient> quotient_;
    int sharp_dim_ = 0;
    int model_index(const Element& g, int tp) const;
    BitVec model_coords(const Element& g, int tp) const;
};

// The relations valid in the degree-1 homology of the total complex for z,
// instantiated over a in {z, z^-1} and g, g1, g2 in the extended centralizer.
// Each entry is (relation number, chain).
std::vector<std::pair<int, TotChain>> eta_relation_instances(const groups::FiniteGroup& g, const Element& z);

// dim Sigma(G): one summand per conjugacy class of types 1 and 2 and per
// pair of mutually inverse classes of type 3.
int sigma_dimension(const groups::FiniteGroupPtr& g);

} // namespace qarf
