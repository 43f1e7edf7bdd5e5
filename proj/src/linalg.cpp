#include "qarf/linalg.hpp"

#include "qarf/error.hpp"

#include <bit>

namespace qarf::linalg {

BitVec& BitVec::operator^=(const BitVec& o)
{
    if (o.n_ != n_) throw PreconditionError("BitVec: size mismatch");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
}

bool BitVec::is_zero() const
{
    for (auto x : w_)
        if (x) return false;
    return true;
}

int BitVec::first_set() const
{
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (w_[i]) return static_cast<int>(i * 64 + std::countr_zero(w_[i]));
    return -1;
}

int BitVec::popcount() const
{
    int c = 0;
    for (auto x : w_) c += std::popcount(x);
    return c;
}

void BitVec::resize(int n)
{
    w_.resize((n + 63) / 64, 0);
    if (n < n_ && (n & 63)) w_.back() &= (std::uint64_t{1} << (n & 63)) - 1;
    n_ = n;
}

bool F2Subspace::insert(const BitVec& v)
{
    if (v.size() != n_) throw PreconditionError("F2Subspace: size mismatch");
    BitVec comb(track_ ? gens_ + 1 : 0);
    if (track_) comb.set(gens_);
    ++gens_;
    for (auto& [p, rc] : rows_) rc.second.resize(track_ ? gens_ : 0);
    BitVec r = v;
    for (const auto& [p, rc] : rows_) {
        if (r.get(p)) {
            r ^= rc.first;
            if (track_) comb ^= rc.second;
        }
    }
    int piv = r.first_set();
    if (piv < 0) return false;
    for (auto& [p, rc] : rows_) {
        if (rc.first.get(piv)) {
            rc.first ^= r;
            if (track_) rc.second ^= comb;
        }
    }
    rows_.emplace(piv, std::make_pair(std::move(r), std::move(comb)));
    return true;
}

BitVec F2Subspace::reduce(const BitVec& v) const
{
    if (v.size() != n_) throw PreconditionError("F2Subspace: size mismatch");
    BitVec r = v;
    for (const auto& [p, rc] : rows_)
        if (r.get(p)) r ^= rc.first;
    return r;
}

std::optional<std::vector<int>> F2Subspace::witness(const BitVec& v) const
{
    if (!track_) throw PreconditionError("F2Subspace: witness needs tracking");
    BitVec r = v;
    BitVec comb(gens_);
    for (const auto& [p, rc] : rows_) {
        if (r.get(p)) {
            r ^= rc.first;
            comb ^= rc.second;
        }
    }
    if (!r.is_zero()) return std::nullopt;
    std::vector<int> out;
    for (int i = 0; i < gens_; ++i)
        if (comb.get(i)) out.push_back(i);
    return out;
}

std::vector<int> F2Subspace::pivots() const
{
    std::vector<int> out;
    for (const auto& kv : rows_) out.push_back(kv.first);
    return out;
}

F2Quotient::F2Quotient(const F2Subspace& w) : w_(w), pos_(w.ambient(), -1)
{
    std::vector<bool> piv(w.ambient(), false);
    for (int p : w.pivots()) piv[p] = true;
    for (int c = 0; c < w.ambient(); ++c) {
        if (!piv[c]) {
            pos_[c] = static_cast<int>(free_.size());
            free_.push_back(c);
        }
    }
}

BitVec F2Quotient::coords(const BitVec& v) const
{
    BitVec r = w_.reduce(v);
    BitVec out(dim());
    for (int i = 0; i < dim(); ++i)
        if (r.get(free_[i])) out.set(i);
    return out;
}

int mod_inverse(int a, int p)
{
    a %= p;
    if (a < 0) a += p;
    if (a == 0) throw PreconditionError("mod_inverse: zero has no inverse");
    int r = 1;
    for (int e = p - 2, b = a; e > 0; e >>= 1, b = b * b % p)
        if (e & 1) r = r * b % p;
    return r;
}

FpVec fp_add(const FpVec& a, const FpVec& b, int p)
{
    if (a.size() != b.size()) throw PreconditionError("fp_add: size mismatch");
    FpVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = static_cast<std::uint8_t>((a[i] + b[i]) % p);
    return r;
}

FpVec fp_scale(const FpVec& a, int c, int p)
{
    c %= p;
    if (c < 0) c += p;
    FpVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = static_cast<std::uint8_t>(a[i] * c % p);
    return r;
}

bool fp_is_zero(const FpVec& a)
{
    for (auto x : a)
        if (x) return false;
    return true;
}

namespace {

// r -= c * row  (mod p)
void axpy(FpVec& r, const FpVec& row, int c, int p)
{
    if (c == 0) return;
    int neg = (p - c) % p;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (row[i]) r[i] = static_cast<std::uint8_t>((r[i] + neg * row[i]) % p);
}

} // namespace

bool FpSubspace::insert(FpVec v)
{
    if (static_cast<int>(v.size()) != n_) throw PreconditionError("FpSubspace: size mismatch");
    v = reduce(std::move(v));
    int piv = -1;
    for (int i = 0; i < n_; ++i)
        if (v[i]) {
            piv = i;
            break;
        }
    if (piv < 0) return false;
    v = fp_scale(v, mod_inverse(v[piv], p_), p_);
    for (auto& [q, row] : rows_) axpy(row, v, row[piv], p_);
    rows_.emplace(piv, std::move(v));
    return true;
}

FpVec FpSubspace::reduce(FpVec v) const
{
    if (static_cast<int>(v.size()) != n_) throw PreconditionError("FpSubspace: size mismatch");
    for (const auto& [q, row] : rows_) axpy(v, row, v[q], p_);
    return v;
}

bool FpSubspace::contains(const FpVec& v) const { return fp_is_zero(reduce(v)); }

std::vector<int> FpSubspace::pivots() const
{
    std::vector<int> out;
    for (const auto& kv : rows_) out.push_back(kv.first);
    return out;
}

std::vector<FpVec> FpSubspace::basis() const
{
    std::vector<FpVec> out;
    for (const auto& kv : rows_) out.push_back(kv.second);
    return out;
}

FpVec FpMap::apply(const FpVec& x) const
{
    if (static_cast<int>(x.size()) != src) throw PreconditionError("FpMap: size mismatch");
    FpVec r(dst, 0);
    for (int j = 0; j < src; ++j) {
        if (!x[j]) continue;
        for (int i = 0; i < dst; ++i)
            if (cols[j][i]) r[i] = static_cast<std::uint8_t>((r[i] + x[j] * cols[j][i]) % p);
    }
    return r;
}

std::vector<FpVec> kernel(const FpMap& f)
{
    // Eliminate on [col_j | e_j]; rows whose image part vanishes give the kernel.
    const int n = f.src, m = f.dst, p = f.p;
    std::vector<FpVec> out;
    std::map<int, FpVec> rows;
    for (int j = 0; j < n; ++j) {
        FpVec v(m + n, 0);
        for (int i = 0; i < m; ++i) v[i] = f.cols[j][i];
        v[m + j] = 1;
        for (const auto& [q, row] : rows) axpy(v, row, v[q], p);
        int piv = -1;
        for (int i = 0; i < m; ++i)
            if (v[i]) {
                piv = i;
                break;
            }
        if (piv < 0) {
            out.emplace_back(v.begin() + m, v.end());
            continue;
        }
        v = fp_scale(v, mod_inverse(v[piv], p), p);
        for (auto& [q, row] : rows) axpy(row, v, row[piv], p);
        rows.emplace(piv, std::move(v));
    }
    return out;
}

FpSubspace image(const FpMap& f)
{
    FpSubspace s(f.dst, f.p);
    for (const auto& c : f.cols) s.insert(c);
    return s;
}

bool FpSubquotient::equal(const FpVec& a, const FpVec& b) const
{
    return fp_is_zero(w.reduce(fp_add(a, fp_scale(b, w.prime() - 1, w.prime()), w.prime())));
}

std::optional<FpVec> FpSubquotient::coords(const FpVec& v) const
{
    // Solve v = sum c_i basis_i mod W by elimination on W + basis.
    const int p = w.prime();
    const int n = w.ambient();
    const int k = dim();
    std::map<int, FpVec> rows;
    auto push = [&](FpVec x) {
        for (const auto& [q, row] : rows) axpy(x, row, x[q], p);
        int piv = -1;
        for (int i = 0; i < n; ++i)
            if (x[i]) {
                piv = i;
                break;
            }
        if (piv < 0) return;
        x = fp_scale(x, mod_inverse(x[piv], p), p);
        for (auto& [q, row] : rows) axpy(row, x, row[piv], p);
        rows.emplace(piv, std::move(x));
    };
    for (const auto& b : w.basis()) {
        FpVec x(n + k, 0);
        std::copy(b.begin(), b.end(), x.begin());
        push(std::move(x));
    }
    for (int i = 0; i < k; ++i) {
        FpVec x(n + k, 0);
        std::copy(basis[i].begin(), basis[i].end(), x.begin());
        x[n + i] = 1;
        push(std::move(x));
    }
    FpVec x(n + k, 0);
    std::copy(v.begin(), v.end(), x.begin());
    for (const auto& [q, row] : rows)
        if (q < n) axpy(x, row, x[q], p);
    for (int i = 0; i < n; ++i)
        if (x[i]) return std::nullopt;
    FpVec c(k);
    for (int i = 0; i < k; ++i) c[i] = static_cast<std::uint8_t>((p - x[n + i]) % p);
    return c;
}

FpSubquotient subquotient(const std::vector<FpVec>& u, FpSubspace w)
{
    FpSubquotient out{std::move(w), {}};
    FpSubspace acc = out.w;
    for (const auto& v : u)
        if (acc.insert(v)) out.basis.push_back(out.w.reduce(v));
    return out;
}

} // namespace qarf::linalg
