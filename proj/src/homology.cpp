#include "qarf/homology.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

namespace qarf {

using linalg::FpMap;
using linalg::FpSubspace;

namespace {

int md(long long a, int p)
{
    a %= p;
    return static_cast<int>(a < 0 ? a + p : a);
}

using Sparse = std::vector<std::pair<int, int>>;  // (index, coefficient)

Sparse sparse_of(const FpVec& v)
{
    Sparse s;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (v[i]) s.emplace_back(i, v[i]);
    return s;
}

int ipow(int b, int e)
{
    int r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Accumulates tensor-product terms into a dense vector of length d^k.
class TensorAcc {
public:
    TensorAcc(int d, int k, int p) : d_(d), k_(k), p_(p), v_(ipow(d, k), 0) {}

    void add(const std::vector<int>& idx, int c)
    {
        int pos = 0;
        for (int i : idx) pos = pos * d_ + i;
        v_[pos] = static_cast<std::uint8_t>(md(v_[pos] + c, p_));
    }
    // c * f_1 (x) ... (x) f_k
    void add_product(const std::vector<Sparse>& factors, int c)
    {
        std::vector<int> idx(factors.size());
        std::function<void(std::size_t, int)> rec = [&](std::size_t i, int coef) {
            if (i == factors.size()) {
                add(idx, coef);
                return;
            }
            for (const auto& [j, a] : factors[i]) {
                idx[i] = j;
                rec(i + 1, md(static_cast<long long>(coef) * a, p_));
            }
        };
        if (c % p_) rec(0, md(c, p_));
    }
    FpVec take() { return std::move(v_); }

private:
    int d_, k_, p_;
    FpVec v_;
};

// Calls f(multi-index, coefficient) for each nonzero coordinate.
template <class F>
void for_each_term(const FpVec& t, int d, int k, F f)
{
    std::vector<int> idx(k);
    for (int pos = 0; pos < static_cast<int>(t.size()); ++pos) {
        if (!t[pos]) continue;
        int rest = pos;
        for (int i = k - 1; i >= 0; --i) {
            idx[i] = rest % d;
            rest /= d;
        }
        f(idx, static_cast<int>(t[pos]));
    }
}

void check_size(const FiniteAlgebra& r, const FpVec& t, int k, const char* who)
{
    if (static_cast<int>(t.size()) != tensor_size(r, k))
        throw PreconditionError(std::string(who) + ": vector does not lie in R^(" + std::to_string(k) + ")");
}

Sparse unit_sparse(int i) { return Sparse{{i, 1}}; }

} // namespace

// ---------------------------------------------------------------------------
// FiniteAlgebra

FiniteAlgebra::FiniteAlgebra(int p, std::vector<std::string> labels, std::vector<std::vector<FpVec>> mult, FpVec unit,
                             std::optional<std::vector<FpVec>> involution, std::string name)
    : p_(p), n_(static_cast<int>(labels.size())), name_(std::move(name)), labels_(std::move(labels)),
      mult_(std::move(mult)), unit_(std::move(unit)), inv_(std::move(involution))
{
    if (p_ < 2) throw PreconditionError("algebra: characteristic must be a prime");
    if (n_ == 0) throw PreconditionError("algebra: empty basis");
    if (static_cast<int>(mult_.size()) != n_) throw PreconditionError("algebra: structure constants have wrong shape");
    for (auto& row : mult_) {
        if (static_cast<int>(row.size()) != n_) throw PreconditionError("algebra: structure constants have wrong shape");
        for (auto& v : row) {
            if (static_cast<int>(v.size()) != n_) throw PreconditionError("algebra: product vector has wrong length");
            for (auto& c : v) c = static_cast<std::uint8_t>(c % p_);
        }
    }
    if (static_cast<int>(unit_.size()) != n_) throw PreconditionError("algebra: unit has wrong length");
    if (inv_) {
        if (static_cast<int>(inv_->size()) != n_) throw PreconditionError("algebra: involution has wrong shape");
        for (const auto& v : *inv_)
            if (static_cast<int>(v.size()) != n_) throw PreconditionError("algebra: involution has wrong shape");
    }
}

FiniteAlgebra FiniteAlgebra::group_algebra(const groups::FiniteGroupPtr& g, int p)
{
    const int n = g->n();
    std::vector<std::vector<FpVec>> mult(n, std::vector<FpVec>(n, FpVec(n, 0)));
    std::vector<FpVec> inv(n, FpVec(n, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) mult[i][j][g->mul_index(i, j)] = 1;
        inv[i][g->inv_index(i)] = 1;
    }
    FpVec unit(n, 0);
    unit[g->identity_index()] = 1;
    return FiniteAlgebra(p, g->labels(), std::move(mult), std::move(unit), std::move(inv),
                         "F_" + std::to_string(p) + "[" + g->name() + "]");
}

FiniteAlgebra FiniteAlgebra::matrix_algebra(const FiniteAlgebra& r, int m)
{
    if (m < 1) throw PreconditionError("matrix algebra: size must be positive");
    const int d = r.dim(), n = m * m * d;
    auto at = [&](int i, int j, int k) { return (i * m + j) * d + k; };
    std::vector<std::string> labels(n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < d; ++k)
                labels[at(i, j, k)] = "E" + std::to_string(i + 1) + std::to_string(j + 1) + "(" + r.labels()[k] + ")";
    std::vector<std::vector<FpVec>> mult(n, std::vector<FpVec>(n, FpVec(n, 0)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < m; ++l)
                    for (int k2 = 0; k2 < d; ++k2) {
                        const FpVec& prod = r.basis_product(k, k2);
                        for (int t = 0; t < d; ++t) mult[at(i, j, k)][at(j, l, k2)][at(i, l, t)] = prod[t];
                    }
    FpVec unit(n, 0);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < d; ++k) unit[at(i, i, k)] = r.one()[k];
    std::optional<std::vector<FpVec>> inv;
    if (r.has_involution()) {
        inv.emplace(n, FpVec(n, 0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < d; ++k) {
                    FpVec b = r.bar(r.basis(k));
                    for (int t = 0; t < d; ++t) (*inv)[at(i, j, k)][at(j, i, t)] = b[t];
                }
    }
    return FiniteAlgebra(r.p(), std::move(labels), std::move(mult), std::move(unit), std::move(inv),
                         "M_" + std::to_string(m) + "(" + r.name() + ")");
}

FiniteAlgebra FiniteAlgebra::prime_field(int p)
{
    return FiniteAlgebra(p, {"1"}, {{FpVec{1}}}, FpVec{1}, std::vector<FpVec>{FpVec{1}}, "F_" + std::to_string(p));
}

FpVec FiniteAlgebra::basis(int i) const
{
    FpVec v(n_, 0);
    v.at(i) = 1;
    return v;
}

FpVec FiniteAlgebra::add(const FpVec& a, const FpVec& b) const { return linalg::fp_add(a, b, p_); }

FpVec FiniteAlgebra::sub(const FpVec& a, const FpVec& b) const
{
    return linalg::fp_add(a, linalg::fp_scale(b, p_ - 1, p_), p_);
}

FpVec FiniteAlgebra::scale(const FpVec& a, int c) const { return linalg::fp_scale(a, md(c, p_), p_); }

FpVec FiniteAlgebra::mul(const FpVec& a, const FpVec& b) const
{
    std::vector<int> acc(n_, 0);
    for (int i = 0; i < n_; ++i) {
        if (!a[i]) continue;
        for (int j = 0; j < n_; ++j) {
            if (!b[j]) continue;
            const int c = a[i] * b[j];
            const FpVec& prod = mult_[i][j];
            for (int k = 0; k < n_; ++k)
                if (prod[k]) acc[k] += c * prod[k];
        }
    }
    FpVec out(n_);
    for (int k = 0; k < n_; ++k) out[k] = static_cast<std::uint8_t>(acc[k] % p_);
    return out;
}

FpVec FiniteAlgebra::pow(const FpVec& a, int k) const
{
    FpVec r = unit_;
    for (int i = 0; i < k; ++i) r = mul(r, a);
    return r;
}

FpVec FiniteAlgebra::bar(const FpVec& a) const
{
    if (!inv_) throw PreconditionError("algebra " + name_ + ": no involution registered");
    FpVec out(n_, 0);
    for (int i = 0; i < n_; ++i)
        if (a[i]) out = add(out, scale((*inv_)[i], a[i]));
    return out;
}

void FiniteAlgebra::validate() const
{
    for (int i = 0; i < n_; ++i) {
        FpVec e = basis(i);
        if (mul(unit_, e) != e || mul(e, unit_) != e)
            throw PreconditionError("algebra " + name_ + ": unit law fails at " + labels_[i]);
        for (int j = 0; j < n_; ++j) {
            FpVec ej = basis(j);
            FpVec ij = mult_[i][j];
            for (int k = 0; k < n_; ++k) {
                FpVec ek = basis(k);
                if (mul(ij, ek) != mul(e, mult_[j][k]))
                    throw PreconditionError("algebra " + name_ + ": associativity fails at (" + labels_[i] + ", " +
                                            labels_[j] + ", " + labels_[k] + ")");
            }
            if (inv_ && bar(ij) != mul(bar(ej), bar(e)))
                throw PreconditionError("algebra " + name_ + ": involution is not anti-multiplicative at (" +
                                        labels_[i] + ", " + labels_[j] + ")");
        }
        if (inv_ && bar(bar(e)) != e)
            throw PreconditionError("algebra " + name_ + ": involution does not square to 1 at " + labels_[i]);
    }
}

std::string FiniteAlgebra::format(const FpVec& a) const
{
    std::string out;
    for (int i = 0; i < n_; ++i) {
        if (!a[i]) continue;
        if (!out.empty()) out += " + ";
        if (a[i] != 1) out += std::to_string(a[i]) + "*";
        out += labels_[i];
    }
    return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// Tensors

int tensor_size(const FiniteAlgebra& r, int k) { return ipow(r.dim(), k); }

FpVec tensor(const FiniteAlgebra& r, const std::vector<FpVec>& factors)
{
    TensorAcc acc(r.dim(), static_cast<int>(factors.size()), r.p());
    std::vector<Sparse> s;
    for (const auto& f : factors) s.push_back(sparse_of(f));
    acc.add_product(s, 1);
    return acc.take();
}

std::string format_tensor(const FiniteAlgebra& r, const FpVec& t, int k)
{
    std::string out;
    for_each_term(t, r.dim(), k, [&](const std::vector<int>& idx, int c) {
        if (!out.empty()) out += " + ";
        if (c != 1) out += std::to_string(c) + "*";
        for (int i = 0; i < k; ++i) out += (i ? "(x)" : "") + r.labels()[idx[i]];
    });
    return out.empty() ? "0" : out;
}

FpVec face(const FiniteAlgebra& r, const FpVec& t, int k, int i)
{
    check_size(r, t, k, "face");
    const int n = k - 1;
    if (n < 1 || i < 0 || i > n) throw PreconditionError("face: index out of range");
    TensorAcc acc(r.dim(), k - 1, r.p());
    for_each_term(t, r.dim(), k, [&](const std::vector<int>& idx, int c) {
        std::vector<Sparse> f;
        if (i < n) {
            for (int j = 0; j < i; ++j) f.push_back(unit_sparse(idx[j]));
            f.push_back(sparse_of(r.basis_product(idx[i], idx[i + 1])));
            for (int j = i + 2; j < k; ++j) f.push_back(unit_sparse(idx[j]));
        } else {
            f.push_back(sparse_of(r.basis_product(idx[n], idx[0])));
            for (int j = 1; j < n; ++j) f.push_back(unit_sparse(idx[j]));
        }
        acc.add_product(f, c);
    });
    return acc.take();
}

FpVec hochschild_b(const FiniteAlgebra& r, const FpVec& t, int k)
{
    FpVec out(tensor_size(r, k - 1), 0);
    for (int i = 0; i <= k - 1; ++i) out = linalg::fp_add(out, r.scale(face(r, t, k, i), i % 2 ? -1 : 1), r.p());
    return out;
}

FpVec hochschild_bprime(const FiniteAlgebra& r, const FpVec& t, int k)
{
    FpVec out(tensor_size(r, k - 1), 0);
    for (int i = 0; i < k - 1; ++i) out = linalg::fp_add(out, r.scale(face(r, t, k, i), i % 2 ? -1 : 1), r.p());
    return out;
}

FpVec cyclic_x(const FiniteAlgebra& r, const FpVec& t, int k)
{
    check_size(r, t, k, "x");
    const int n = k - 1;
    TensorAcc acc(r.dim(), k, r.p());
    for_each_term(t, r.dim(), k, [&](const std::vector<int>& idx, int c) {
        std::vector<int> j(k);
        j[0] = idx[n];
        for (int a = 0; a < n; ++a) j[a + 1] = idx[a];
        acc.add(j, n % 2 ? -c : c);
    });
    return acc.take();
}

FpVec dihedral_y(const FiniteAlgebra& r, const FpVec& t, int k)
{
    check_size(r, t, k, "y");
    const int n = k - 1;
    const int sign = (n * (n + 1) / 2) % 2 ? -1 : 1;
    TensorAcc acc(r.dim(), k, r.p());
    std::vector<Sparse> bars;
    for (int i = 0; i < r.dim(); ++i) bars.push_back(sparse_of(r.bar(r.basis(i))));
    for_each_term(t, r.dim(), k, [&](const std::vector<int>& idx, int c) {
        std::vector<Sparse> f{bars[idx[0]]};
        for (int a = n; a >= 1; --a) f.push_back(bars[idx[a]]);
        acc.add_product(f, sign * c);
    });
    return acc.take();
}

// ---------------------------------------------------------------------------
// Homology

std::string homology_kind_name(HomologyKind k)
{
    switch (k) {
    case HomologyKind::H0: return "H0";
    case HomologyKind::H1: return "H1";
    case HomologyKind::HC0: return "HC0";
    case HomologyKind::HC1: return "HC1";
    case HomologyKind::HQ1: return "HQ1";
    }
    return "?";
}

HomologyGroup::HomologyGroup(HomologyKind kind, int ambient, int p, std::vector<FpVec> cycles,
                             linalg::FpSubspace boundaries, std::string label)
    : kind_(kind), ambient_(ambient), p_(p), label_(std::move(label)), cycles_(std::move(cycles)),
      cycle_span_(ambient, p), sq_(linalg::subquotient(cycles_, boundaries))
{
    for (const auto& c : cycles_) cycle_span_.insert(c);
    for (const auto& w : boundaries.basis())
        if (!cycle_span_.contains(w)) throw Error("homology " + label_ + ": a relation is not a cycle");
}

bool HomologyGroup::is_cycle(const FpVec& v) const
{
    return static_cast<int>(v.size()) == ambient_ && cycle_span_.contains(v);
}

FpVec HomologyGroup::coords(const FpVec& v) const
{
    if (!is_cycle(v)) throw PreconditionError("homology " + label_ + ": not a cycle");
    auto c = sq_.coords(v);
    if (!c) throw Error("homology " + label_ + ": coordinates not found for a cycle");
    return *c;
}

HomologyGroup HomologyGroup::quotient(const std::vector<FpVec>& extra, std::string label) const
{
    FpSubspace w = sq_.w;
    for (const auto& v : extra) {
        if (!is_cycle(v)) throw PreconditionError("homology " + label_ + ": quotient relation is not a cycle");
        w.insert(v);
    }
    return HomologyGroup(kind_, ambient_, p_, cycles_, std::move(w), std::move(label));
}

namespace {

void guard(const FiniteAlgebra& r)
{
    if (r.dim() > kHomologyDimGuard)
        throw PreconditionError("homology: algebra " + r.name() + " has dimension " + std::to_string(r.dim()) +
                                " above the guard " + std::to_string(kHomologyDimGuard));
}

FpMap tensor_map(const FiniteAlgebra& r, int k_src, int k_dst, const std::function<FpVec(const FpVec&)>& f)
{
    FpMap m;
    m.src = tensor_size(r, k_src);
    m.dst = tensor_size(r, k_dst);
    m.p = r.p();
    for (int j = 0; j < m.src; ++j) {
        FpVec e(m.src, 0);
        e[j] = 1;
        m.cols.push_back(f(e));
    }
    return m;
}

std::vector<FpVec> all_basis(int n)
{
    std::vector<FpVec> out;
    for (int i = 0; i < n; ++i) {
        FpVec e(n, 0);
        e[i] = 1;
        out.push_back(e);
    }
    return out;
}

} // namespace

FpVec hq_pack(const FiniteAlgebra& r, const FpVec& w, const FpVec& c)
{
    check_size(r, w, 2, "hq_pack");
    check_size(r, c, 1, "hq_pack");
    FpVec v = w;
    v.insert(v.end(), c.begin(), c.end());
    return v;
}

std::pair<FpVec, FpVec> hq_unpack(const FiniteAlgebra& r, const FpVec& v)
{
    const int d2 = tensor_size(r, 2);
    if (static_cast<int>(v.size()) != d2 + r.dim()) throw PreconditionError("hq_unpack: wrong length");
    return {FpVec(v.begin(), v.begin() + d2), FpVec(v.begin() + d2, v.end())};
}

HomologyGroup homology(const FiniteAlgebra& r, HomologyKind kind)
{
    guard(r);
    const int d = r.dim(), p = r.p();
    const std::string label = homology_kind_name(kind) + "(" + r.name() + ")";
    switch (kind) {
    case HomologyKind::H0:
    case HomologyKind::HC0: {
        FpSubspace w = linalg::image(tensor_map(r, 2, 1, [&](const FpVec& t) { return hochschild_b(r, t, 2); }));
        return HomologyGroup(kind, d, p, all_basis(d), std::move(w), label);
    }
    case HomologyKind::H1:
    case HomologyKind::HC1: {
        auto cycles = linalg::kernel(tensor_map(r, 2, 1, [&](const FpVec& t) { return hochschild_b(r, t, 2); }));
        FpSubspace w = linalg::image(tensor_map(r, 3, 2, [&](const FpVec& t) { return hochschild_b(r, t, 3); }));
        if (kind == HomologyKind::HC1) {
            for (const auto& e : all_basis(d * d)) w.insert(r.sub(e, cyclic_x(r, e, 2)));
        }
        return HomologyGroup(kind, d * d, p, std::move(cycles), std::move(w), label);
    }
    case HomologyKind::HQ1: {
        if (!r.has_involution()) throw PreconditionError("HQ1: algebra " + r.name() + " has no involution");
        const int n = d * d + d;
        // (w, c) -> b(w) + c - bar c
        FpMap m;
        m.src = n;
        m.dst = d;
        m.p = p;
        for (int j = 0; j < n; ++j) {
            if (j < d * d) {
                FpVec e(d * d, 0);
                e[j] = 1;
                m.cols.push_back(hochschild_b(r, e, 2));
            } else {
                FpVec c = r.basis(j - d * d);
                m.cols.push_back(r.sub(c, r.bar(c)));
            }
        }
        auto cycles = linalg::kernel(m);
        FpSubspace w(n, p);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                FpVec a = r.basis(i), b = r.basis(j);
                FpVec ab = r.mul(a, b), ba = r.mul(b, a);
                // (r(x)s + s(x)r, -rs - bar(rs))
                w.insert(hq_pack(r, r.add(tensor(r, {a, b}), tensor(r, {b, a})), r.scale(r.add(ab, r.bar(ab)), -1)));
                // (u(x)v + bar u (x) bar v, vu - uv)
                w.insert(hq_pack(r, r.add(tensor(r, {a, b}), tensor(r, {r.bar(a), r.bar(b)})), r.sub(ba, ab)));
            }
        for (int i = 0; i < d; ++i) {
            FpVec e = r.basis(i);
            w.insert(hq_pack(r, FpVec(d * d, 0), r.scale(r.add(e, r.bar(e)), 2)));
        }
        for (const auto& e : all_basis(d * d * d)) w.insert(hq_pack(r, hochschild_b(r, e, 3), r.zero()));
        return HomologyGroup(kind, n, p, std::move(cycles), std::move(w), label);
    }
    }
    throw PreconditionError("homology: unknown kind");
}

int hq1_dimension_from_total_complex(const FiniteAlgebra& r)
{
    guard(r);
    if (r.p() != 2) throw PreconditionError("total complex: implemented in characteristic 2 only");
    if (!r.has_involution()) throw PreconditionError("total complex: algebra has no involution");
    const int d = r.dim(), d2 = d * d, d3 = d2 * d;
    // Tot_1 = M_1 + (M_0 + M_0), Tot_0 = M_0
    const int t1 = d2 + 2 * d;
    auto slice = [](const FpVec& v, int from, int len) { return FpVec(v.begin() + from, v.begin() + from + len); };
    auto put = [](FpVec& v, int at, const FpVec& x) {
        for (std::size_t i = 0; i < x.size(); ++i) v[at + i] ^= x[i];
    };
    FpMap d1;
    d1.src = t1;
    d1.dst = d;
    d1.p = 2;
    for (int j = 0; j < t1; ++j) {
        FpVec e(t1, 0);
        e[j] = 1;
        FpVec out(d, 0);
        put(out, 0, hochschild_b(r, slice(e, 0, d2), 2));
        // alpha = (1 - x, 1 - y) with x = 1 on M_0
        FpVec c = slice(e, d2 + d, d);
        put(out, 0, r.add(c, r.bar(c)));
        d1.cols.push_back(out);
    }
    const int ker = static_cast<int>(linalg::kernel(d1).size());
    // Tot_2 = M_2 + (M_1 + M_1) + (M_0 + M_0)
    FpSubspace im(t1, 2);
    for (int j = 0; j < d3; ++j) {
        FpVec e(d3, 0);
        e[j] = 1;
        FpVec out(t1, 0);
        put(out, 0, hochschild_b(r, e, 3));
        im.insert(out);
    }
    for (int j = 0; j < 2 * d2; ++j) {
        FpVec u(d2, 0), v(d2, 0);
        (j < d2 ? u : v)[j % d2] = 1;
        FpVec out(t1, 0);
        put(out, 0, r.add(r.sub(u, cyclic_x(r, u, 2)), r.sub(v, dihedral_y(r, v, 2))));
        put(out, d2, hochschild_bprime(r, u, 2));
        put(out, d2 + d, hochschild_b(r, v, 2));
        im.insert(out);
    }
    for (int j = 0; j < 2 * d; ++j) {
        FpVec s(d, 0), w(d, 0);
        (j < d ? s : w)[j % d] = 1;
        FpVec out(t1, 0);
        // beta = (L, 1 + yx; -1 - y, x - 1) with L = x = 1 on M_0
        put(out, d2, r.add(s, r.add(w, r.bar(w))));
        put(out, d2 + d, r.add(s, r.bar(s)));
        im.insert(out);
    }
    return ker - im.rank();
}

// ---------------------------------------------------------------------------
// Summands

FpVec summands_tensor(const FiniteAlgebra& r, const Summands& s)
{
    FpVec out(tensor_size(r, 2), 0);
    for (const auto& [a, b] : s) out = r.add(out, tensor(r, {a, b}));
    return out;
}

Summands decompose(const FiniteAlgebra& r, const FpVec& t)
{
    check_size(r, t, 2, "decompose");
    Summands s;
    for_each_term(t, r.dim(), 2, [&](const std::vector<int>& idx, int c) {
        for (int k = 0; k < c; ++k) s.emplace_back(r.basis(idx[0]), r.basis(idx[1]));
    });
    return s;
}

// ---------------------------------------------------------------------------
// Operations

FpVec theta_p_h0(const FiniteAlgebra& r, const FpVec& x) { return r.pow(x, r.p()); }

std::vector<std::vector<int>> gamma_representatives(int n, int p, std::optional<std::uint64_t> seed)
{
    std::vector<std::vector<int>> out;
    if (n <= 0) return out;
    std::mt19937_64 rng(seed.value_or(0));
    std::vector<int> g(p, 0);
    auto rotate = [p](const std::vector<int>& v) {
        // sigma (i_1, ..., i_p) = (i_p, i_1, ..., i_{p-1})
        std::vector<int> w(p);
        w[0] = v[p - 1];
        for (int i = 1; i < p; ++i) w[i] = v[i - 1];
        return w;
    };
    for (;;) {
        bool constant = std::all_of(g.begin(), g.end(), [&](int v) { return v == g[0]; });
        if (!constant) {
            bool minimal = true;
            std::vector<int> w = g;
            for (int t = 1; t < p && minimal; ++t) {
                w = rotate(w);
                if (w < g) minimal = false;
            }
            if (minimal) {
                std::vector<int> rep = g;
                if (seed) {
                    int t = std::uniform_int_distribution<int>(0, p - 1)(rng);
                    for (int k = 0; k < t; ++k) rep = rotate(rep);
                }
                out.push_back(rep);
            }
        }
        int i = p - 1;
        while (i >= 0 && g[i] == n - 1) g[i--] = 0;
        if (i < 0) break;
        ++g[i];
    }
    return out;
}

FpVec theta_p_h1(const FiniteAlgebra& r, const Summands& s, std::optional<std::uint64_t> gamma_seed)
{
    const int p = r.p();
    const int n = static_cast<int>(s.size());
    FpVec out(tensor_size(r, 2), 0);
    std::vector<FpVec> P, Q;
    for (const auto& [a, b] : s) {
        P.push_back(r.mul(a, b));
        Q.push_back(r.mul(b, a));
        out = r.add(out, tensor(r, {r.mul(r.pow(P.back(), p - 1), a), b}));
    }
    // products of the first p - 1 entries, cached for p = 3
    auto left_product = [&](const std::vector<int>& g, const std::vector<FpVec>& X,
                            std::vector<std::vector<FpVec>>& cache) -> const FpVec& {
        if (p == 3) {
            FpVec& c = cache[g[0]][g[1]];
            if (c.empty()) c = r.mul(X[g[0]], X[g[1]]);
            return c;
        }
        FpVec& c = cache[0][0];
        c = r.one();
        for (int i = 0; i < p - 1; ++i) c = r.mul(c, X[g[i]]);
        return c;
    };
    const int cn = p == 3 ? n : 1;
    std::vector<std::vector<FpVec>> cacheP(cn, std::vector<FpVec>(cn)), cacheQ = cacheP;
    std::vector<Sparse> sP, sQ;
    for (int i = 0; i < n; ++i) {
        sP.push_back(sparse_of(P[i]));
        sQ.push_back(sparse_of(Q[i]));
    }
    const int d = r.dim();
    std::vector<long long> acc(out.size(), 0);
    auto add_eval = [&](const std::vector<int>& g, const std::vector<FpVec>& X, const std::vector<Sparse>& sx,
                        std::vector<std::vector<FpVec>>& cache, long long coef) {
        const FpVec& left = left_product(g, X, cache);
        for (int a = 0; a < d; ++a) {
            if (!left[a]) continue;
            for (const auto& [b, c] : sx[g[p - 1]]) acc[a * d + b] += coef * left[a] * c;
        }
    };
    auto rotate = [p](const std::vector<int>& v) {
        std::vector<int> w(p);
        w[0] = v[p - 1];
        for (int i = 1; i < p; ++i) w[i] = v[i - 1];
        return w;
    };
    for (const auto& g : gamma_representatives(n, p, gamma_seed)) {
        std::vector<int> st = g;
        for (int t = 1; t <= p - 1; ++t) {
            st = rotate(st);
            add_eval(st, P, sP, cacheP, t);
            add_eval(st, Q, sQ, cacheQ, p - t);
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>((out[i] + acc[i]) % p);
    return out;
}

FpVec connes_b(const FiniteAlgebra& r, const FpVec& x) { return tensor(r, {r.one(), x}); }

FpVec q_map(const FiniteAlgebra& r, const FpVec& x) { return tensor(r, {r.pow(x, r.p() - 1), x}); }

HomologyGroup hc1_mod_q(const FiniteAlgebra& r)
{
    HomologyGroup hc1 = homology(r, HomologyKind::HC1);
    std::vector<FpVec> extra;
    for (int i = 0; i < r.dim(); ++i) extra.push_back(q_map(r, r.basis(i)));
    return hc1.quotient(extra, "HC1(" + r.name() + ")/Im(q)");
}

FpVec aux_theta(const FiniteAlgebra& r, const Summands& s)
{
    std::vector<FpVec> br;
    FpVec out = r.zero();
    for (const auto& [u, v] : s) {
        FpVec uv = r.mul(u, v);
        br.push_back(r.sub(uv, r.mul(v, u)));
        out = r.add(out, r.mul(uv, br.back()));
    }
    for (std::size_t i = 0; i < br.size(); ++i)
        for (std::size_t j = i + 1; j < br.size(); ++j) out = r.add(out, r.mul(br[i], br[j]));
    return out;
}

FpVec vartheta(const FiniteAlgebra& r, const Summands& s, const FpVec& c)
{
    if (r.p() != 2) throw PreconditionError("vartheta: needs characteristic 2");
    FpVec w(tensor_size(r, 2), 0);
    std::vector<FpVec> sym;
    for (const auto& [a, b] : s) {
        FpVec ab = r.mul(a, b), ba = r.mul(b, a);
        w = r.add(w, tensor(r, {r.mul(ab, a), b}));
        w = r.add(w, tensor(r, {ab, ba}));
        sym.push_back(r.add(ab, ba));
    }
    for (std::size_t i = 0; i < sym.size(); ++i)
        for (std::size_t j = i + 1; j < sym.size(); ++j) w = r.add(w, tensor(r, {sym[i], sym[j]}));
    w = r.add(w, tensor(r, {c, r.bar(c)}));
    return hq_pack(r, w, r.mul(c, c));
}

HomologyGroup coker_mu(const FiniteAlgebra& r)
{
    if (r.p() != 2) throw PreconditionError("Coker(mu): needs characteristic 2");
    HomologyGroup hq = homology(r, HomologyKind::HQ1);
    std::vector<FpVec> extra;
    for (int i = 0; i < r.dim(); ++i)
        for (int j = i; j < r.dim(); ++j) {
            FpVec a = r.basis(i), b = r.basis(j);
            FpVec t = i == j ? tensor(r, {a, a}) : r.add(tensor(r, {a, b}), tensor(r, {b, a}));
            extra.push_back(hq_pack(r, t, r.zero()));
        }
    return hq.quotient(extra, "Coker(mu_" + r.name() + ")");
}

HomologyGroup coker_one_plus_vartheta(const FiniteAlgebra& r)
{
    HomologyGroup cm = coker_mu(r);
    std::vector<FpVec> extra;
    for (const auto& v : cm.cycles()) {
        auto [w, c] = hq_unpack(r, v);
        extra.push_back(r.add(v, vartheta(r, decompose(r, w), c)));
    }
    // vartheta adds in characteristic 2, so the sum is a plain vector sum
    return cm.quotient(extra, "Coker(1+vartheta_" + r.name() + ")");
}

FpVec upsilon_algebra(const FiniteAlgebra& r, const FpVec& a, const FpVec& b)
{
    return hq_pack(r, tensor(r, {a, b}), r.mul(a, b));
}

// ---------------------------------------------------------------------------
// Morita

namespace {

struct MatIndex {
    int m, d;
    int at(int i, int j, int k) const { return (i * m + j) * d + k; }
    int row(int a) const { return a / d / m; }
    int col(int a) const { return (a / d) % m; }
    int entry(int a) const { return a % d; }
};

} // namespace

FpVec morita_trace(const FiniteAlgebra& r, int m, const FpVec& t, int k)
{
    const int d = r.dim(), da = m * m * d;
    if (static_cast<int>(t.size()) != ipow(da, k)) throw PreconditionError("Tr: vector does not lie in A^(k)");
    MatIndex mi{m, d};
    TensorAcc acc(d, k, r.p());
    std::vector<int> out(k);
    for_each_term(t, da, k, [&](const std::vector<int>& idx, int c) {
        for (int a = 0; a < k; ++a)
            if (mi.col(idx[a]) != mi.row(idx[(a + 1) % k])) return;
        for (int a = 0; a < k; ++a) out[a] = mi.entry(idx[a]);
        acc.add(out, c);
    });
    return acc.take();
}

FpVec morita_iota(const FiniteAlgebra& r, int m, const FpVec& t, int k)
{
    check_size(r, t, k, "iota");
    const int d = r.dim(), da = m * m * d;
    MatIndex mi{m, d};
    TensorAcc acc(da, k, r.p());
    std::vector<int> out(k);
    for_each_term(t, d, k, [&](const std::vector<int>& idx, int c) {
        for (int a = 0; a < k; ++a) out[a] = mi.at(0, 0, idx[a]);
        acc.add(out, c);
    });
    return acc.take();
}

FpVec morita_gamma(const FiniteAlgebra& r, int m, const FpVec& t, int k)
{
    if (k < 2) throw PreconditionError("gamma: needs at least two tensor factors");
    const FiniteAlgebra A = FiniteAlgebra::matrix_algebra(r, m);
    check_size(A, t, k, "gamma");
    const int n = k - 1;
    const int sign = (n + 1) % 2 ? -1 : 1;
    MatIndex mi{m, r.dim()};
    std::vector<Sparse> ei1(m), e1i(m);
    for (int i = 0; i < m; ++i) {
        FpVec a = A.zero(), b = A.zero();
        for (int kk = 0; kk < r.dim(); ++kk) {
            a[mi.at(i, 0, kk)] = r.one()[kk];
            b[mi.at(0, i, kk)] = r.one()[kk];
        }
        ei1[i] = sparse_of(a);
        e1i[i] = sparse_of(b);
    }
    TensorAcc acc(A.dim(), k, r.p());
    for_each_term(t, A.dim(), k, [&](const std::vector<int>& idx, int c) {
        FpVec xnx0 = A.basis_product(idx[n], idx[0]);
        for (int i = 0; i < m; ++i) {
            FpVec e1 = A.zero();
            for (const auto& [j, a] : e1i[i]) e1[j] = static_cast<std::uint8_t>(a);
            std::vector<Sparse> f{ei1[i], sparse_of(A.mul(e1, xnx0))};
            for (int a = 1; a < n; ++a) f.push_back(unit_sparse(idx[a]));
            acc.add_product(f, sign * c);
        }
    });
    return acc.take();
}

FpVec morita_chi(const FiniteAlgebra& r, int m, const FpVec& t, int k)
{
    const FiniteAlgebra A = FiniteAlgebra::matrix_algebra(r, m);
    check_size(A, t, k, "chi");
    // s: append 1
    FpVec st = [&] {
        TensorAcc acc(A.dim(), k + 1, r.p());
        Sparse one = sparse_of(A.one());
        for_each_term(t, A.dim(), k, [&](const std::vector<int>& idx, int c) {
            std::vector<Sparse> f;
            for (int i : idx) f.push_back(unit_sparse(i));
            f.push_back(one);
            acc.add_product(f, c);
        });
        return acc.take();
    }();
    FpVec out(tensor_size(A, k + 1), 0), g = st;
    for (int j = 1; j <= k; ++j) {
        g = morita_gamma(r, m, g, k + 1);
        out = A.add(out, g);
    }
    return A.scale(out, (k + 1) % 2 ? -1 : 1);
}

FpVec morita_trace_hq(const FiniteAlgebra& r, int m, const FpVec& v)
{
    const FiniteAlgebra A = FiniteAlgebra::matrix_algebra(r, m);
    auto [w, c] = hq_unpack(A, v);
    return hq_pack(r, morita_trace(r, m, w, 2), morita_trace(r, m, c, 1));
}

MoritaReport morita_check(const FiniteAlgebra& r, int m, int max_level, int homotopy_level)
{
    const FiniteAlgebra A = FiniteAlgebra::matrix_algebra(r, m);
    MoritaReport rep;
    auto fail = [&](bool& flag, std::string what) {
        if (flag) rep.failures.push_back(std::move(what));
        flag = false;
    };
    for (int k = 1; k <= max_level; ++k) {
        for (const auto& e : all_basis(tensor_size(r, k))) {
            FpVec i = morita_iota(r, m, e, k);
            if (morita_trace(r, m, i, k) != e) fail(rep.trace_iota_identity, "Tr iota != 1 at level " + std::to_string(k));
            if (k >= 2 && hochschild_b(A, i, k) != morita_iota(r, m, hochschild_b(r, e, k), k - 1))
                fail(rep.chain_maps, "iota b != b iota at level " + std::to_string(k));
            if (morita_trace(r, m, cyclic_x(A, i, k), k) != cyclic_x(r, e, k))
                fail(rep.preserve_xy, "iota does not preserve x at level " + std::to_string(k));
            if (r.has_involution() && dihedral_y(A, i, k) != morita_iota(r, m, dihedral_y(r, e, k), k))
                fail(rep.preserve_xy, "iota does not preserve y at level " + std::to_string(k));
        }
        for (const auto& e : all_basis(tensor_size(A, k))) {
            FpVec t = morita_trace(r, m, e, k);
            if (k >= 2 && hochschild_b(r, t, k) != morita_trace(r, m, hochschild_b(A, e, k), k - 1))
                fail(rep.chain_maps, "Tr b != b Tr at level " + std::to_string(k));
            if (morita_trace(r, m, cyclic_x(A, e, k), k) != cyclic_x(r, t, k))
                fail(rep.preserve_xy, "Tr does not preserve x at level " + std::to_string(k));
            if (r.has_involution() && morita_trace(r, m, dihedral_y(A, e, k), k) != dihedral_y(r, t, k))
                fail(rep.preserve_xy, "Tr does not preserve y at level " + std::to_string(k));
            if (k <= homotopy_level) {
                FpVec lhs = hochschild_b(A, morita_chi(r, m, e, k), k + 1);
                if (k >= 2) lhs = A.add(lhs, morita_chi(r, m, hochschild_b(A, e, k), k - 1));
                FpVec rhs = A.sub(e, morita_iota(r, m, t, k));
                if (lhs != rhs) fail(rep.homotopy, "b chi + chi b != 1 - iota Tr at level " + std::to_string(k));
            }
        }
    }
    return rep;
}

MoritaSquares morita_squares(const FiniteAlgebra& r, int m)
{
    const FiniteAlgebra A = FiniteAlgebra::matrix_algebra(r, m);
    MoritaSquares sq;
    auto fail = [&](bool& flag, std::string what) {
        if (flag) sq.failures.push_back(std::move(what));
        flag = false;
    };
    // HC_0 -> H_1 and theta_p on H_0
    HomologyGroup h0A = homology(A, HomologyKind::HC0);
    HomologyGroup h1R = homology(r, HomologyKind::H1);
    HomologyGroup h0R = homology(r, HomologyKind::H0);
    for (const auto& x : h0A.basis()) {
        FpVec tx = morita_trace(r, m, x, 1);
        if (!h1R.equal(morita_trace(r, m, connes_b(A, x), 2), connes_b(r, tx))) fail(sq.connes_b, "B square");
        if (!h0R.equal(morita_trace(r, m, theta_p_h0(A, x), 1), theta_p_h0(r, tx))) fail(sq.theta_h0, "theta_p H0 square");
    }
    // theta_p on HC_1 modulo Im(q)
    HomologyGroup hc1A = homology(A, HomologyKind::HC1);
    HomologyGroup qR = hc1_mod_q(r);
    for (const auto& v : hc1A.basis()) {
        FpVec lhs = morita_trace(r, m, theta_p_h1(A, decompose(A, v)), 2);
        FpVec rhs = theta_p_h1(r, decompose(r, morita_trace(r, m, v, 2)));
        if (!qR.equal(lhs, rhs)) fail(sq.theta_hc1, "theta_p HC1 square");
    }
    // vartheta
    if (r.p() == 2 && r.has_involution()) {
        HomologyGroup hqA = homology(A, HomologyKind::HQ1);
        HomologyGroup cmR = coker_mu(r);
        for (const auto& v : hqA.basis()) {
            auto [w, c] = hq_unpack(A, v);
            FpVec lhs = morita_trace_hq(r, m, vartheta(A, decompose(A, w), c));
            FpVec tv = morita_trace_hq(r, m, v);
            auto [tw, tc] = hq_unpack(r, tv);
            FpVec rhs = vartheta(r, decompose(r, tw), tc);
            if (!cmR.equal(lhs, rhs)) fail(sq.vartheta, "vartheta square");
        }
    }
    return sq;
}

} // namespace qarf
