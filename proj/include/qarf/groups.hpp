#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qarf/error.hpp"

namespace qarf::groups {

// ---------------------------------------------------------------------------
// Elements

// Canonical encoding of a group element. The layout of `code` depends on the
// family:
//   finite            {index}
//   SemidirectZnC2    {s, v_1, ..., v_n}
//   PullbackCyclic    {i, e}
//   PullbackDihedral  {i, eps, e}        meaning (T^i S^eps, e)
struct Element {
    std::uint32_t gid = 0;
    std::vector<std::int64_t> code;

    bool operator==(const Element& o) const { return gid == o.gid && code == o.code; }
    bool operator!=(const Element& o) const { return !(*this == o); }
};

// Integers ordered 0, 1, -1, 2, -2, ...
inline std::uint64_t zigzag(std::int64_t x)
{
    return x > 0 ? 2 * static_cast<std::uint64_t>(x) - 1 : 2 * static_cast<std::uint64_t>(-x);
}

// Fixed total order on encodings: lexicographic in the zigzag order.
bool encoding_less(const Element& a, const Element& b);

struct ElementLess {
    bool operator()(const Element& a, const Element& b) const { return encoding_less(a, b); }
};

struct ElementHash {
    std::size_t operator()(const Element& e) const;
};

using ElementSet = std::set<Element, ElementLess>;

enum class Family { FiniteTable, FinitePerm, SemidirectZnC2, PullbackCyclic, PullbackDihedral };

std::string family_name(Family f);

enum class ElementType { Type1 = 1, Type2 = 2, Type3 = 3 };

// ---------------------------------------------------------------------------
// Equivalence classes of cl(G)

struct EquivClass {
    Element rep;
    // Full certificate: every member (finite groups).
    std::vector<Element> members;
    // Window certificate: bound and canonicalizer id (infinite families).
    bool windowed = false;
    int window = 0;
    std::string canonicalizer;
};

class FiniteGroup;

// ---------------------------------------------------------------------------
// Group interface

class Group {
public:
    virtual ~Group() = default;

    Family family() const { return family_; }
    std::uint32_t id() const { return id_; }
    const std::string& name() const { return name_; }

    virtual Element identity() const = 0;
    virtual Element mul(const Element& a, const Element& b) const = 0;
    virtual Element inv(const Element& a) const = 0;
    // nullopt means infinite order.
    virtual std::optional<std::int64_t> order(const Element& g) const = 0;
    virtual bool is_finite() const = 0;
    virtual std::optional<std::int64_t> size() const { return std::nullopt; }
    virtual std::string format(const Element& g) const = 0;
    // Checks that the encoding is valid for this group.
    virtual void validate(const Element& g) const = 0;

    // All elements for finite groups; a bounded window otherwise.
    virtual std::vector<Element> window(int bound) const = 0;

    // Exact conjugacy decision.
    virtual bool are_conjugate(const Element& a, const Element& b) const = 0;
    // Canonical representative of the cl class of g (encoding-minimal member).
    virtual Element cl_canonical(const Element& g) const = 0;
    virtual std::string canonicalizer_id() const = 0;

    // Generating sets of G_z and of the extended centralizer.
    virtual std::vector<Element> centralizer(const Element& z) const = 0;
    virtual std::vector<Element> extended_centralizer(const Element& z) const = 0;

    // Named generators, in declaration order.
    const std::vector<std::pair<std::string, Element>>& generators() const { return gens_; }
    std::vector<Element> generator_elements() const;

    // Convenience derived from the virtual core.
    Element pow(const Element& g, std::int64_t k) const;
    Element conj(const Element& x, const Element& g) const;  // x g x^-1
    bool is_identity(const Element& g) const { return g == identity(); }
    bool is_involution(const Element& g) const;               // g^2 = 1
    ElementType type_of(const Element& z) const;
    Element parse(std::string_view word) const;
    void check_same(const Element& a) const;

protected:
    Group(Family f, std::string name);
    void set_generators(std::vector<std::pair<std::string, Element>> g) { gens_ = std::move(g); }
    Element make(std::vector<std::int64_t> code) const { return Element{id_, std::move(code)}; }

private:
    Family family_;
    std::uint32_t id_;
    std::string name_;
    std::vector<std::pair<std::string, Element>> gens_;
};

using GroupPtr = std::shared_ptr<const Group>;

// ---------------------------------------------------------------------------
// Finite groups: FiniteTable and FinitePerm

class FiniteGroup : public Group {
public:
    // Multiplication table in row-major order, table[a*n+b] = index of ab.
    static std::shared_ptr<FiniteGroup> from_table(std::string name, std::vector<int> table,
                                                   std::vector<std::string> labels,
                                                   std::vector<std::pair<std::string, int>> gens);
    // Closure of permutation generators on `points` points (0-based images).
    static std::shared_ptr<FiniteGroup> from_permutations(std::string name, int points,
                                                          std::vector<std::pair<std::string, std::vector<int>>> gens,
                                                          int cap = 10000);

    Element identity() const override { return make({identity_}); }
    Element mul(const Element& a, const Element& b) const override;
    Element inv(const Element& a) const override;
    std::optional<std::int64_t> order(const Element& g) const override;
    bool is_finite() const override { return true; }
    std::optional<std::int64_t> size() const override { return n_; }
    std::string format(const Element& g) const override;
    void validate(const Element& g) const override;
    std::vector<Element> window(int bound) const override;
    bool are_conjugate(const Element& a, const Element& b) const override;
    Element cl_canonical(const Element& g) const override;
    std::string canonicalizer_id() const override { return "finite-closure"; }
    std::vector<Element> centralizer(const Element& z) const override;
    std::vector<Element> extended_centralizer(const Element& z) const override;

    int n() const { return n_; }
    int mul_index(int a, int b) const;
    int inv_index(int a) const { return inv_[a]; }
    int identity_index() const { return identity_; }
    const std::vector<std::string>& labels() const { return labels_; }
    Element element(int i) const { return make({i}); }
    int index(const Element& g) const;
    // index of the conjugacy class and of the cl class of element i
    int conj_class_of(int i) const { return conj_class_[i]; }
    int cl_class_of(int i) const { return cl_class_[i]; }
    const std::vector<std::vector<int>>& conj_classes() const { return conj_members_; }
    const std::vector<std::vector<int>>& cl_members() const { return cl_members_; }
    const std::vector<int>& permutation(int i) const { return perms_.at(i); }
    bool has_table() const { return !table_.empty(); }

private:
    FiniteGroup(Family f, std::string name) : Group(f, std::move(name)) {}
    void finish(std::vector<std::pair<std::string, int>> gens);

    int n_ = 0;
    int identity_ = 0;
    std::vector<int> table_;
    std::vector<int> inv_;
    std::vector<std::string> labels_;
    // permutation mode
    int points_ = 0;
    std::vector<std::vector<int>> perms_;
    std::map<std::vector<int>, int> perm_index_;

    std::vector<int> conj_class_;
    std::vector<std::vector<int>> conj_members_;
    std::vector<int> cl_class_;
    std::vector<std::vector<int>> cl_members_;
};

using FiniteGroupPtr = std::shared_ptr<const FiniteGroup>;

// ---------------------------------------------------------------------------
// Z^n semidirect C_2, the generator of C_2 acting by negation.

class SemidirectZnC2 : public Group {
public:
    explicit SemidirectZnC2(int rank);

    int rank() const { return n_; }
    Element make_element(const std::vector<std::int64_t>& v, int s) const;
    std::vector<std::int64_t> vec(const Element& g) const;
    int sign_bit(const Element& g) const;

    Element identity() const override;
    Element mul(const Element& a, const Element& b) const override;
    Element inv(const Element& a) const override;
    std::optional<std::int64_t> order(const Element& g) const override;
    bool is_finite() const override { return false; }
    std::string format(const Element& g) const override;
    void validate(const Element& g) const override;
    std::vector<Element> window(int bound) const override;
    bool are_conjugate(const Element& a, const Element& b) const override;
    Element cl_canonical(const Element& g) const override;
    std::string canonicalizer_id() const override { return "zn-c2-odd-part"; }
    std::vector<Element> centralizer(const Element& z) const override;
    std::vector<Element> extended_centralizer(const Element& z) const override;

    // v divided by the largest power of two dividing all its entries
    static std::vector<std::int64_t> odd_part(const std::vector<std::int64_t>& v);

private:
    int n_;
};

// ---------------------------------------------------------------------------
// Pull-backs of C -> C_m <- E (cyclic) or D -> D_m <- E (dihedral), D the
// infinite dihedral group <T,S>. D_m elements are pairs (k mod m, eps)
// meaning r^k s^eps.

struct DihedralM {
    std::int64_t k = 0;
    int eps = 0;
    bool operator==(const DihedralM&) const = default;
};

class PullbackGroup : public Group {
public:
    using Formatter = std::function<std::string(const PullbackGroup&, const Element&)>;

    // hom[e] is the image of E-element e in C_m (eps = 0) or D_m.
    PullbackGroup(std::string name, bool dihedral, FiniteGroupPtr e, std::int64_t m, std::vector<DihedralM> hom,
                  std::vector<std::pair<std::string, Element>> gens = {}, Formatter fmt = {});

    bool dihedral() const { return dihedral_; }
    const FiniteGroup& e_group() const { return *e_; }
    FiniteGroupPtr e_group_ptr() const { return e_; }
    std::int64_t modulus() const { return m_; }
    const std::vector<DihedralM>& hom() const { return hom_; }
    DihedralM dm_mul(DihedralM a, DihedralM b) const;

    Element make_element(std::int64_t i, int eps, int e) const;
    std::int64_t rot(const Element& g) const { return g.code[0]; }
    int refl(const Element& g) const { return dihedral_ ? static_cast<int>(g.code[1]) : 0; }
    int epart(const Element& g) const { return static_cast<int>(dihedral_ ? g.code[2] : g.code[1]); }
    // image of T^i S^eps in D_m
    DihedralM project(std::int64_t i, int eps) const;
    void set_named_generators(std::vector<std::pair<std::string, Element>> g) { set_generators(std::move(g)); }

    Element identity() const override;
    Element mul(const Element& a, const Element& b) const override;
    Element inv(const Element& a) const override;
    std::optional<std::int64_t> order(const Element& g) const override;
    bool is_finite() const override { return false; }
    std::string format(const Element& g) const override;
    void validate(const Element& g) const override;
    std::vector<Element> window(int bound) const override;
    bool are_conjugate(const Element& a, const Element& b) const override;
    Element cl_canonical(const Element& g) const override;
    std::string canonicalizer_id() const override { return "pullback-level-min"; }
    std::vector<Element> centralizer(const Element& z) const override;
    std::vector<Element> extended_centralizer(const Element& z) const override;

    // "x conjugates a onto b, or onto b^-1" for elements of E-parts at a
    // fixed rotation level A (sign handled by the caller).
    // Relation used by the cl canonicalizer: (T^A, a) ~ (T^B, b) with |A| = |B|.
    bool level_related(std::int64_t a_rot, int a_e, std::int64_t b_rot, int b_e) const;

private:
    bool dihedral_;
    FiniteGroupPtr e_;
    std::int64_t m_;
    std::vector<DihedralM> hom_;
    Formatter fmt_;
};

// ---------------------------------------------------------------------------
// Operations of the groups module

std::vector<EquivClass> cl_classes(const Group& g, int window);
std::vector<Element> involutions(const Group& g, int window);

// Elementary abelian 2-group H_# = H_ab / (H_ab)^2 of a subgroup H of a
// finite group, with the projection to coordinates.
class ElementaryAbelian2 {
public:
    ElementaryAbelian2() = default;
    ElementaryAbelian2(FiniteGroupPtr g, std::vector<int> subgroup);

    int dim() const { return dim_; }
    const std::vector<int>& subgroup() const { return members_; }
    bool contains(int idx) const { return coord_.count(idx) != 0; }
    // Coordinates (bit mask) of a subgroup element.
    std::uint64_t coords(int idx) const;
    // Subgroup elements chosen as basis.
    const std::vector<int>& basis() const { return basis_; }

private:
    FiniteGroupPtr g_;
    std::vector<int> members_;
    std::unordered_map<int, std::uint64_t> coord_;
    std::vector<int> basis_;
    int dim_ = 0;
};

// Subgroup generated by the given indices.
std::vector<int> subgroup_closure(const FiniteGroup& g, const std::vector<int>& gens);

// G_# for a subgroup generated by `gens` of a finite group.
ElementaryAbelian2 ab_mod_squares(FiniteGroupPtr g, const std::vector<Element>& gens);

// ---------------------------------------------------------------------------
// Word parsing helpers

// Parses words like "X^2*Y^-1*S", "SX^2Y^2", "(YS)^2", "1" against a
// generator naming map.
Element parse_word(const Group& g, std::string_view word);

// Formats a product of named powers, e.g. {{"X",2},{"S",1}} -> "X^2*S".
std::string format_word(const std::vector<std::pair<std::string, std::int64_t>>& powers);

} // namespace qarf::groups
