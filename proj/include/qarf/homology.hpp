#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qarf/error.hpp"
#include "qarf/groups.hpp"
#include "qarf/linalg.hpp"

namespace qarf {

using linalg::FpVec;

// ---------------------------------------------------------------------------
// Finite-dimensional associative algebras over F_p given by structure
// constants, optionally with an anti-involution.

class FiniteAlgebra {
public:
    // mult[i][j] = e_i e_j; involution[i] = image of e_i.
    FiniteAlgebra(int p, std::vector<std::string> labels, std::vector<std::vector<FpVec>> mult, FpVec unit,
                  std::optional<std::vector<FpVec>> involution = std::nullopt, std::string name = "");

    // F_p[G] with the involution g -> g^-1.
    static FiniteAlgebra group_algebra(const groups::FiniteGroupPtr& g, int p);
    // M_m(R), basis E_ij(e_k) at index (i m + j) dim(R) + k; the involution
    // (if any) is X -> (bar X_ji).
    static FiniteAlgebra matrix_algebra(const FiniteAlgebra& r, int m);
    // F_p itself with the identity involution.
    static FiniteAlgebra prime_field(int p);

    int p() const { return p_; }
    int dim() const { return n_; }
    const std::string& name() const { return name_; }
    const std::vector<std::string>& labels() const { return labels_; }
    bool has_involution() const { return inv_.has_value(); }

    FpVec zero() const { return FpVec(n_, 0); }
    FpVec one() const { return unit_; }
    FpVec basis(int i) const;
    FpVec add(const FpVec& a, const FpVec& b) const;
    FpVec sub(const FpVec& a, const FpVec& b) const;
    FpVec scale(const FpVec& a, int c) const;
    FpVec mul(const FpVec& a, const FpVec& b) const;
    FpVec pow(const FpVec& a, int k) const;
    FpVec bar(const FpVec& a) const;
    const FpVec& basis_product(int i, int j) const { return mult_[i][j]; }

    // Associativity, unit laws and the anti-involution axioms on all basis
    // triples; throws PreconditionError naming the first failure.
    void validate() const;
    std::string format(const FpVec& a) const;

private:
    int p_;
    int n_;
    std::string name_;
    std::vector<std::string> labels_;
    std::vector<std::vector<FpVec>> mult_;
    FpVec unit_;
    std::optional<std::vector<FpVec>> inv_;
};

// ---------------------------------------------------------------------------
// Tensor powers R^{(k)} = R (x) ... (x) R (k factors) as dense vectors of
// length dim^k, index i_1 dim^{k-1} + ... + i_k.

int tensor_size(const FiniteAlgebra& r, int k);
FpVec tensor(const FiniteAlgebra& r, const std::vector<FpVec>& factors);
std::string format_tensor(const FiniteAlgebra& r, const FpVec& t, int k);

// Face, cyclic and dihedral operators on R^{(k)} (level k-1).
FpVec face(const FiniteAlgebra& r, const FpVec& t, int k, int i);     // d_i
FpVec hochschild_b(const FiniteAlgebra& r, const FpVec& t, int k);     // b: R^(k) -> R^(k-1)
FpVec hochschild_bprime(const FiniteAlgebra& r, const FpVec& t, int k);
FpVec cyclic_x(const FiniteAlgebra& r, const FpVec& t, int k);
FpVec dihedral_y(const FiniteAlgebra& r, const FpVec& t, int k);

// ---------------------------------------------------------------------------
// Homology groups as subquotients U / W with exact F_p linear algebra.

enum class HomologyKind { H0, H1, HC0, HC1, HQ1 };
std::string homology_kind_name(HomologyKind k);

// Level-2 chain spaces have dim^3 coordinates; beyond this dimension the
// module refuses.
inline constexpr int kHomologyDimGuard = 20;

class HomologyGroup {
public:
    HomologyGroup(HomologyKind kind, int ambient, int p, std::vector<FpVec> cycles, linalg::FpSubspace boundaries,
                  std::string label);

    HomologyKind kind() const { return kind_; }
    int ambient() const { return ambient_; }
    int prime() const { return p_; }
    int dim() const { return sq_.dim(); }
    const std::string& label() const { return label_; }
    // representatives of a basis
    const std::vector<FpVec>& basis() const { return sq_.basis; }
    // spanning set of the cycle space U
    const std::vector<FpVec>& cycles() const { return cycles_; }
    const linalg::FpSubspace& boundaries() const { return sq_.w; }

    bool is_cycle(const FpVec& v) const;
    bool is_zero(const FpVec& v) const { return sq_.w.contains(v); }
    bool equal(const FpVec& a, const FpVec& b) const { return sq_.equal(a, b); }
    FpVec reduce(const FpVec& v) const { return sq_.reduce(v); }
    // coordinates on basis(); throws when v is not a cycle
    FpVec coords(const FpVec& v) const;

    // The quotient by further relations (images of maps into this group).
    HomologyGroup quotient(const std::vector<FpVec>& extra, std::string label) const;

private:
    HomologyKind kind_;
    int ambient_;
    int p_;
    std::string label_;
    std::vector<FpVec> cycles_;
    linalg::FpSubspace cycle_span_;
    linalg::FpSubquotient sq_;
};

// H_0, HC_0 live in R; H_1, HC_1 in R (x) R; HQ_1 in (R (x) R) + R through
//   Ker(b, 1 - y) / span{(r(x)s + s(x)r, -rs - bar(rs)), (u(x)v + bar u(x)bar v, vu - uv),
//                        (0, 2(w + bar w)), (b(x(x)y(x)z), 0)}.
HomologyGroup homology(const FiniteAlgebra& r, HomologyKind kind);

// HQ_1 from the total complex of the quaternionic double complex in degree
// 1 (characteristic 2 only, where all signs vanish). Returns its dimension.
int hq1_dimension_from_total_complex(const FiniteAlgebra& r);

// (w, c) in (R (x) R) + R
FpVec hq_pack(const FiniteAlgebra& r, const FpVec& w, const FpVec& c);
std::pair<FpVec, FpVec> hq_unpack(const FiniteAlgebra& r, const FpVec& v);

// ---------------------------------------------------------------------------
// Elementary-tensor presentations sum_i alpha_i (x) beta_i.

using Summands = std::vector<std::pair<FpVec, FpVec>>;

FpVec summands_tensor(const FiniteAlgebra& r, const Summands& s);
// basis tensors, coefficient c folded into c repeated summands
Summands decompose(const FiniteAlgebra& r, const FpVec& t);

// ---------------------------------------------------------------------------
// Reduced power operations (for F_p-algebras, R/pR = R).

// theta_p([r]) = [r^p] in H_0
FpVec theta_p_h0(const FiniteAlgebra& r, const FpVec& x);

// Orbit representatives Gamma_n of sigma on I_n^p minus the diagonal:
// lexicographically minimal members, or a seeded random member per orbit.
std::vector<std::vector<int>> gamma_representatives(int n, int p, std::optional<std::uint64_t> seed = std::nullopt);

// theta_p: H_1(R) -> HC_1(R) on a presentation of a cycle.
FpVec theta_p_h1(const FiniteAlgebra& r, const Summands& s, std::optional<std::uint64_t> gamma_seed = std::nullopt);

// B([r]) = [1 (x) r] and q([r]) = [r^{p-1} (x) r].
FpVec connes_b(const FiniteAlgebra& r, const FpVec& x);
FpVec q_map(const FiniteAlgebra& r, const FpVec& x);
// HC_1(R) / Im(q)
HomologyGroup hc1_mod_q(const FiniteAlgebra& r);

// theta(sum u_i (x) v_i) = sum_{i<j} [u_i,v_i][u_j,v_j] + sum_i u_i v_i [u_i,v_i]
// in R_ab = R/[R,R] (returned as an element of R, compare in H_0).
FpVec aux_theta(const FiniteAlgebra& r, const Summands& s);

// vartheta: HQ_1(R) -> Coker(mu) (characteristic 2).
FpVec vartheta(const FiniteAlgebra& r, const Summands& s, const FpVec& c);
// HQ_1(R) / span{[x (x) x, 0]}
HomologyGroup coker_mu(const FiniteAlgebra& r);
// Coker(1 + vartheta)
HomologyGroup coker_one_plus_vartheta(const FiniteAlgebra& r);
// <a,b> -> [a (x) b, ab]
FpVec upsilon_algebra(const FiniteAlgebra& r, const FpVec& a, const FpVec& b);

// ---------------------------------------------------------------------------
// Morita invariance for A = M_m(R); k is the number of tensor factors.

FpVec morita_trace(const FiniteAlgebra& r, int m, const FpVec& t, int k);   // A^(k) -> R^(k)
FpVec morita_iota(const FiniteAlgebra& r, int m, const FpVec& t, int k);    // R^(k) -> A^(k)
FpVec morita_gamma(const FiniteAlgebra& r, int m, const FpVec& t, int k);   // A^(k) -> A^(k)
FpVec morita_chi(const FiniteAlgebra& r, int m, const FpVec& t, int k);     // A^(k) -> A^(k+1)
// Trace on the HQ_1 presentation space: (w, c) -> (Tr w, tr c).
FpVec morita_trace_hq(const FiniteAlgebra& r, int m, const FpVec& v);

struct MoritaReport {
    bool trace_iota_identity = true;  // Tr iota = 1 at every level checked
    bool homotopy = true;             // b chi_k + chi_{k-1} b = 1 - iota Tr
    bool chain_maps = true;           // Tr and iota commute with b
    bool preserve_xy = true;          // Tr and iota commute with x (and y)
    std::vector<std::string> failures;
    bool ok() const { return trace_iota_identity && homotopy && chain_maps && preserve_xy; }
};
// Identities as exact matrices: Tr iota for k <= max_level, the homotopy for
// k <= homotopy_level.
MoritaReport morita_check(const FiniteAlgebra& r, int m, int max_level, int homotopy_level);

struct MoritaSquares {
    bool connes_b = true;
    bool theta_h0 = true;
    bool theta_hc1 = true;
    bool vartheta = true;
    std::vector<std::string> failures;
    bool ok() const { return connes_b && theta_h0 && theta_hc1 && vartheta; }
};
// The four squares Tr o op_A = op_R o Tr on basis classes of the source.
MoritaSquares morita_squares(const FiniteAlgebra& r, int m);

} // namespace qarf
