#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace qarf::linalg {

// ---------------------------------------------------------------------------
// F_2 vectors packed in 64-bit words.

class BitVec {
public:
    BitVec() = default;
    explicit BitVec(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int size() const { return n_; }
    bool get(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i, bool b = true)
    {
        if (b) w_[i >> 6] |= (std::uint64_t{1} << (i & 63));
        else w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }
    void flip(int i) { w_[i >> 6] ^= (std::uint64_t{1} << (i & 63)); }
    BitVec& operator^=(const BitVec& o);
    bool is_zero() const;
    int first_set() const;  // -1 when zero
    int popcount() const;
    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator<(const BitVec& o) const { return w_ < o.w_; }

    // extend or shrink, keeping the leading bits
    void resize(int n);

private:
    int n_ = 0;
    std::vector<std::uint64_t> w_;
};

inline BitVec operator^(BitVec a, const BitVec& b)
{
    a ^= b;
    return a;
}

// Reduced row echelon basis of a subspace of F_2^n, built incrementally.
// Optionally records each basis row as a combination of the inserted
// generators, so that membership comes with a witness.
class F2Subspace {
public:
    explicit F2Subspace(int n = 0, bool track = false) : n_(n), track_(track) {}

    int ambient() const { return n_; }
    int rank() const { return static_cast<int>(rows_.size()); }

    // Returns true when v was independent of the current span.
    bool insert(const BitVec& v);
    // Canonical representative of v modulo the span.
    BitVec reduce(const BitVec& v) const;
    bool contains(const BitVec& v) const { return reduce(v).is_zero(); }
    // Indices of inserted generators summing to v, if v lies in the span.
    // Requires tracking.
    std::optional<std::vector<int>> witness(const BitVec& v) const;
    // Pivot columns in increasing order.
    std::vector<int> pivots() const;
    int generators_seen() const { return gens_; }

private:
    int n_;
    bool track_;
    int gens_ = 0;
    std::map<int, std::pair<BitVec, BitVec>> rows_;  // pivot -> (row, combination)
};

// Basis of the quotient F_2^n / W given by non-pivot coordinates: the
// coordinates of reduce(v) on the free columns.
class F2Quotient {
public:
    explicit F2Quotient(const F2Subspace& w);
    int dim() const { return static_cast<int>(free_.size()); }
    BitVec coords(const BitVec& v) const;
    // Column index in the ambient space of the i-th quotient basis vector.
    int free_column(int i) const { return free_[i]; }

private:
    F2Subspace w_;
    std::vector<int> free_;
    std::vector<int> pos_;  // ambient column -> quotient index or -1
};

// ---------------------------------------------------------------------------
// F_p vectors, p a small prime, stored densely.

using FpVec = std::vector<std::uint8_t>;

int mod_inverse(int a, int p);

class FpSubspace {
public:
    FpSubspace(int n, int p) : n_(n), p_(p) {}

    int ambient() const { return n_; }
    int prime() const { return p_; }
    int rank() const { return static_cast<int>(rows_.size()); }

    bool insert(FpVec v);
    FpVec reduce(FpVec v) const;
    bool contains(const FpVec& v) const;
    std::vector<int> pivots() const;
    // basis rows in pivot order
    std::vector<FpVec> basis() const;

private:
    int n_;
    int p_;
    std::map<int, FpVec> rows_;  // pivot -> row with leading 1
};

// Linear map F_p^n -> F_p^m given by the images of the n basis vectors.
struct FpMap {
    int src = 0;
    int dst = 0;
    int p = 2;
    std::vector<FpVec> cols;

    FpVec apply(const FpVec& x) const;
};

FpVec fp_add(const FpVec& a, const FpVec& b, int p);
FpVec fp_scale(const FpVec& a, int c, int p);
bool fp_is_zero(const FpVec& a);

// Basis of ker(f).
std::vector<FpVec> kernel(const FpMap& f);
// Span of the image of f.
FpSubspace image(const FpMap& f);

// Subquotient U / (U ∩ W) with U given by a basis (assumed to contain W
// when used as a homology computation). Classes are compared by reducing
// modulo W; the basis lists representatives of a complement of W in U.
struct FpSubquotient {
    FpSubspace w;
    std::vector<FpVec> basis;

    int dim() const { return static_cast<int>(basis.size()); }
    FpVec reduce(const FpVec& v) const { return w.reduce(v); }
    bool equal(const FpVec& a, const FpVec& b) const;
    // Coordinates of v (which must lie in U + W) on the complement basis.
    std::optional<FpVec> coords(const FpVec& v) const;
};

FpSubquotient subquotient(const std::vector<FpVec>& u, FpSubspace w);

} // namespace qarf::linalg
