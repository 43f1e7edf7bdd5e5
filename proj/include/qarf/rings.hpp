#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qarf/error.hpp"
#include "qarf/groups.hpp"

namespace qarf {

// ---------------------------------------------------------------------------
// F_2[G] with the involution g -> g^-1.
//
// Every element carries its group. A default-constructed element has no
// group and behaves as zero in sums and products.

class GAElem {
public:
    GAElem() = default;
    explicit GAElem(groups::GroupPtr g) : g_(std::move(g)) {}
    GAElem(groups::GroupPtr g, const groups::Element& x);

    static GAElem one(groups::GroupPtr g);

    const groups::GroupPtr& group() const { return g_; }
    const groups::ElementSet& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }
    bool contains(const groups::Element& x) const { return t_.count(x) != 0; }
    void toggle(const groups::Element& x);

    GAElem& operator+=(const GAElem& o);
    GAElem& operator-=(const GAElem& o) { return *this += o; }
    friend GAElem operator+(GAElem a, const GAElem& b) { return a += b; }
    friend GAElem operator-(GAElem a, const GAElem& b) { return a += b; }
    GAElem operator-() const { return *this; }
    friend GAElem operator*(const GAElem& a, const GAElem& b);
    bool operator==(const GAElem& o) const { return t_ == o.t_; }
    bool operator!=(const GAElem& o) const { return !(*this == o); }

private:
    groups::GroupPtr g_;
    groups::ElementSet t_;
};

GAElem zero_like(const GAElem& x);
GAElem int_like(const GAElem& x, std::int64_t k);
GAElem involute(const GAElem& x);
bool is_zero(const GAElem& x);
// Two-sided inverse. Exact for finite groups; for infinite groups only
// single terms are decided and anything else raises UnknownError.
std::optional<GAElem> try_inverse(const GAElem& x);
std::string to_string(const GAElem& x);
GAElem parse_ga(const groups::GroupPtr& g, std::string_view text);

// ---------------------------------------------------------------------------
// Commutative polynomial rings over Z or F_p, optionally Laurent, optionally
// with some variables nilpotent (x_i^{nil[i]} = 0).

enum class PolyInvolution { Trivial, InvertVariables };

struct PolyRing {
    std::vector<std::string> vars;
    int characteristic = 0;  // 0 or a prime
    bool laurent = false;
    PolyInvolution involution = PolyInvolution::Trivial;
    std::vector<int> nil;    // 0 = free variable

    PolyRing(std::vector<std::string> vars, int characteristic, bool laurent = false,
             PolyInvolution inv = PolyInvolution::Trivial, std::vector<int> nil = {});

    int nvars() const { return static_cast<int>(vars.size()); }
    int var_index(std::string_view name) const;  // -1 if absent
    bool all_nilpotent() const;
    std::string describe() const;
};

using PolyRingPtr = std::shared_ptr<const PolyRing>;

PolyRingPtr make_poly_ring(std::vector<std::string> vars, int characteristic, bool laurent = false,
                           PolyInvolution inv = PolyInvolution::Trivial, std::vector<int> nil = {});

using Monomial = std::vector<std::int64_t>;

class Poly {
public:
    Poly() = default;
    explicit Poly(PolyRingPtr r) : r_(std::move(r)) {}

    static Poly constant(PolyRingPtr r, std::int64_t c);
    static Poly var(PolyRingPtr r, int i);
    static Poly monomial(PolyRingPtr r, Monomial e, std::int64_t c = 1);

    const PolyRingPtr& ring() const { return r_; }
    const std::map<Monomial, std::int64_t>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::int64_t coeff(const Monomial& e) const;
    std::int64_t constant_term() const;
    void add_term(const Monomial& e, std::int64_t c);

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    Poly operator-() const;
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(std::int64_t c) const;
    bool operator==(const Poly& o) const { return t_ == o.t_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly pow(int k) const;
    // partial derivative with respect to variable i
    Poly partial(int i) const;
    // substitute x_i -> x_i^k in every variable
    Poly frobenius_substitute(int k) const;
    // exact division of every coefficient by k (characteristic 0)
    Poly div_exact(std::int64_t k) const;
    // reduce coefficients to {0,1}; returns the quotient by 2 in `half`
    Poly mod2_split(Poly* half) const;
    // the same polynomial viewed in another ring with the same variables
    Poly change_ring(PolyRingPtr r) const;

private:
    PolyRingPtr r_;
    std::map<Monomial, std::int64_t> t_;
};

Poly zero_like(const Poly& x);
Poly int_like(const Poly& x, std::int64_t k);
Poly involute(const Poly& x);
bool is_zero(const Poly& x);
std::optional<Poly> try_inverse(const Poly& x);
std::string to_string(const Poly& x);
std::string format_monomial(const PolyRing& r, const Monomial& e);
Poly parse_poly(const PolyRingPtr& r, std::string_view text);

// ---------------------------------------------------------------------------
// R_n = R[T]/(T^{n+1}) with the extended involution
//   T -> -T/(1+T),  u_n = u(1+T).

template <class E>
class Truncated {
public:
    Truncated() = default;
    Truncated(int n, const E& proto) : c_(static_cast<std::size_t>(n) + 1, zero_like(proto))
    {
        if (n < 0) throw PreconditionError("Truncated: negative degree");
    }
    Truncated(std::vector<E> coeffs) : c_(std::move(coeffs))
    {
        if (c_.empty()) throw PreconditionError("Truncated: no coefficients");
    }

    static Truncated constant(int n, const E& a)
    {
        Truncated t(n, a);
        t.c_[0] = a;
        return t;
    }
    // a T^k
    static Truncated term(int n, const E& a, int k)
    {
        Truncated t(n, a);
        if (k <= n) t.c_[k] = a;
        return t;
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const E& operator[](int k) const { return c_.at(k); }
    E& operator[](int k) { return c_.at(k); }
    const std::vector<E>& coeffs() const { return c_; }
    bool in_ideal() const { return is_zero(c_[0]); }

    Truncated& operator+=(const Truncated& o)
    {
        check(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Truncated& operator-=(const Truncated& o)
    {
        check(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    friend Truncated operator+(Truncated a, const Truncated& b) { return a += b; }
    friend Truncated operator-(Truncated a, const Truncated& b) { return a -= b; }
    Truncated operator-() const
    {
        Truncated r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend Truncated operator*(const Truncated& a, const Truncated& b)
    {
        a.check(b);
        Truncated r(a.degree(), a.c_[0]);
        const int n = a.degree();
        for (int i = 0; i <= n; ++i) {
            if (is_zero(a.c_[i])) continue;
            for (int j = 0; i + j <= n; ++j)
                if (!is_zero(b.c_[j])) r.c_[i + j] += a.c_[i] * b.c_[j];
        }
        return r;
    }
    bool operator==(const Truncated& o) const { return c_ == o.c_; }
    bool operator!=(const Truncated& o) const { return !(*this == o); }

private:
    void check(const Truncated& o) const
    {
        if (o.c_.size() != c_.size()) throw PreconditionError("Truncated: degree mismatch");
    }
    std::vector<E> c_;
};

// Integer coefficients of (-T/(1+T))^k truncated at degree n.
std::vector<std::vector<std::int64_t>> exotic_powers(int n);

template <class E>
Truncated<E> zero_like(const Truncated<E>& x)
{
    return Truncated<E>(x.degree(), x[0]);
}

template <class E>
Truncated<E> int_like(const Truncated<E>& x, std::int64_t k)
{
    return Truncated<E>::constant(x.degree(), int_like(x[0], k));
}

template <class E>
bool is_zero(const Truncated<E>& x)
{
    for (const auto& c : x.coeffs())
        if (!is_zero(c)) return false;
    return true;
}

template <class E>
Truncated<E> involute(const Truncated<E>& x)
{
    const int n = x.degree();
    const auto pw = exotic_powers(n);
    Truncated<E> r(n, x[0]);
    for (int k = 0; k <= n; ++k) {
        if (is_zero(x[k])) continue;
        E a = involute(x[k]);
        for (int j = k; j <= n; ++j)
            if (pw[k][j] != 0) r[j] += int_like(a, pw[k][j]) * a;
    }
    return r;
}

// Inverse when the constant term is a unit of R.
template <class E>
std::optional<Truncated<E>> try_inverse(const Truncated<E>& x)
{
    auto c0inv = try_inverse(x[0]);
    if (!c0inv) return std::nullopt;
    const int n = x.degree();
    Truncated<E> y(n, x[0]);
    y[0] = *c0inv;
    for (int k = 1; k <= n; ++k) {
        E s = zero_like(x[0]);
        for (int j = 1; j <= k; ++j) s += x[j] * y[k - j];
        y[k] = -(*c0inv * s);
    }
    return y;
}

template <class E>
Truncated<E> truncated_inverse(const Truncated<E>& x)
{
    auto y = try_inverse(x);
    if (!y) throw PreconditionError("truncated_inverse: constant term is not a unit");
    return *y;
}

// u_n = u(1+T)
template <class E>
Truncated<E> unit_n(const E& u, int n)
{
    Truncated<E> t = Truncated<E>::constant(n, u);
    if (n >= 1) t[1] = u;
    return t;
}

template <class E>
std::string to_string(const Truncated<E>& x)
{
    std::string out;
    for (int k = 0; k <= x.degree(); ++k) {
        if (is_zero(x[k])) continue;
        std::string c = to_string(x[k]);
        std::string t = k == 0 ? "" : (k == 1 ? "T" : "T^" + std::to_string(k));
        std::string piece;
        if (k == 0) piece = c;
        else if (c == "1") piece = t;
        else if (c == "-1") piece = "-" + t;
        else if (c.find_first_of(" ", 1) == std::string::npos) piece = c + "*" + t;
        else piece = "(" + c + ")*" + t;
        if (out.empty()) out = piece;
        else if (piece[0] == '-') out += " - " + piece.substr(1);
        else out += " + " + piece;
    }
    return out.empty() ? "0" : out;
}

// Parses "1 + a*T + b*T^2" into R_n, the variable name of T given.
Truncated<Poly> parse_truncated(const PolyRingPtr& r, int n, std::string_view text, const std::string& tvar = "T");

// ---------------------------------------------------------------------------
// Square or rectangular matrices over any of the rings above.

template <class E>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, const E& proto)
        : r_(rows), c_(cols), a_(static_cast<std::size_t>(rows) * cols, zero_like(proto))
    {
    }
    static Matrix identity(int n, const E& proto)
    {
        Matrix m(n, n, proto);
        for (int i = 0; i < n; ++i) m(i, i) = int_like(proto, 1);
        return m;
    }
    static Matrix scalar(int n, const E& s)
    {
        Matrix m(n, n, s);
        for (int i = 0; i < n; ++i) m(i, i) = s;
        return m;
    }
    static Matrix from_rows(const std::vector<std::vector<E>>& rows)
    {
        if (rows.empty() || rows[0].empty()) throw PreconditionError("Matrix: empty rows");
        Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), rows[0][0]);
        for (int i = 0; i < m.r_; ++i) {
            if (static_cast<int>(rows[i].size()) != m.c_) throw PreconditionError("Matrix: ragged rows");
            for (int j = 0; j < m.c_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }
    // (A B; C D)
    static Matrix from_blocks(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d)
    {
        if (a.r_ != b.r_ || c.r_ != d.r_ || a.c_ != c.c_ || b.c_ != d.c_)
            throw PreconditionError("Matrix: block shapes do not fit");
        Matrix m(a.r_ + c.r_, a.c_ + b.c_, a.a_.at(0));
        for (int i = 0; i < m.r_; ++i)
            for (int j = 0; j < m.c_; ++j) {
                const Matrix& s = i < a.r_ ? (j < a.c_ ? a : b) : (j < a.c_ ? c : d);
                m(i, j) = s(i < a.r_ ? i : i - a.r_, j < a.c_ ? j : j - a.c_);
            }
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    bool square() const { return r_ == c_; }
    E& operator()(int i, int j) { return a_.at(static_cast<std::size_t>(i) * c_ + j); }
    const E& operator()(int i, int j) const { return a_.at(static_cast<std::size_t>(i) * c_ + j); }
    const E& proto() const { return a_.at(0); }

    Matrix block(int r0, int c0, int nr, int nc) const
    {
        if (r0 < 0 || c0 < 0 || r0 + nr > r_ || c0 + nc > c_) throw PreconditionError("Matrix: block out of range");
        Matrix m(nr, nc, proto());
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
        return m;
    }

    Matrix& operator+=(const Matrix& o)
    {
        same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o)
    {
        same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.c_ != b.r_) throw PreconditionError("Matrix: shape mismatch in product");
        Matrix m(a.r_, b.c_, a.proto());
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                const E& x = a(i, k);
                if (is_zero(x)) continue;
                for (int j = 0; j < b.c_; ++j)
                    if (!is_zero(b(k, j))) m(i, j) += x * b(k, j);
            }
        return m;
    }
    // entrywise s*x and x*s
    Matrix lmul(const E& s) const
    {
        Matrix m = *this;
        for (auto& x : m.a_) x = s * x;
        return m;
    }
    Matrix rmul(const E& s) const
    {
        Matrix m = *this;
        for (auto& x : m.a_) x = x * s;
        return m;
    }
    bool is_zero_matrix() const
    {
        for (const auto& x : a_)
            if (!is_zero(x)) return false;
        return true;
    }
    bool operator==(const Matrix& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

private:
    void same_shape(const Matrix& o) const
    {
        if (r_ != o.r_ || c_ != o.c_) throw PreconditionError("Matrix: shape mismatch");
    }
    int r_ = 0;
    int c_ = 0;
    std::vector<E> a_;
};

// (A^alpha)_{ij} = alpha(A_{ji})
template <class E>
Matrix<E> alpha(const Matrix<E>& m)
{
    Matrix<E> r(m.cols(), m.rows(), m.proto());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(j, i) = involute(m(i, j));
    return r;
}

template <class E>
std::string to_string(const Matrix<E>& m)
{
    std::string out = "[";
    for (int i = 0; i < m.rows(); ++i) {
        out += i ? "; " : "";
        for (int j = 0; j < m.cols(); ++j) out += (j ? ", " : "") + to_string(m(i, j));
    }
    return out + "]";
}

// X + X^alpha u = 0
template <class E>
bool lambda_membership(const Matrix<E>& m, const E& u)
{
    if (!m.square()) throw PreconditionError("lambda_membership: matrix not square");
    return (m + alpha(m).rmul(u)).is_zero_matrix();
}

// Canonical representative of a single entry modulo {x - alpha(x)u};
// `witness` receives an x with entry - result = x - alpha(x)u.
GAElem gamma_reduce_entry(const GAElem& a, const GAElem& u, GAElem* witness);
Poly gamma_reduce_entry(const Poly& a, const Poly& u, Poly* witness);

template <class E>
struct GammaReduction {
    Matrix<E> reduced;
    Matrix<E> witness;  // m - reduced = witness - witness^alpha u
};

// Off-diagonal pairs are gathered in the upper triangle; diagonal entries
// are reduced by gamma_reduce_entry.
template <class E>
GammaReduction<E> gamma_reduce(const Matrix<E>& m, const E& u)
{
    if (!m.square()) throw PreconditionError("gamma_reduce: matrix not square");
    const int n = m.rows();
    GammaReduction<E> g{m, Matrix<E>(n, n, m.proto())};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            // entry (i,j) below the diagonal moves to (j,i)
            E y = g.reduced(i, j);
            if (is_zero(y)) continue;
            g.witness(i, j) += y;
            g.reduced(i, j) = zero_like(y);
            g.reduced(j, i) += involute(y) * u;
        }
    for (int i = 0; i < n; ++i) {
        E w = zero_like(m.proto());
        g.reduced(i, i) = gamma_reduce_entry(g.reduced(i, i), u, &w);
        g.witness(i, i) += w;
    }
    return g;
}

template <class E>
bool gamma_membership(const Matrix<E>& m, const E& u)
{
    return gamma_reduce(m, u).reduced.is_zero_matrix();
}

// U_{2n} = (0 1; u 0), t(X) = U^-1 X^alpha U
template <class E>
Matrix<E> t_alpha_u(const Matrix<E>& m, const E& u)
{
    if (!m.square() || m.rows() % 2) throw PreconditionError("t_alpha_u: shape must be 2n x 2n");
    const int n = m.rows() / 2;
    auto uinv = try_inverse(u);
    if (!uinv) throw PreconditionError("t_alpha_u: u is not a unit");
    const E& p = m.proto();
    Matrix<E> z(n, n, p);
    Matrix<E> id = Matrix<E>::identity(n, p);
    Matrix<E> big_u = Matrix<E>::from_blocks(z, id, Matrix<E>::scalar(n, u), z);
    Matrix<E> big_uinv = Matrix<E>::from_blocks(z, Matrix<E>::scalar(n, *uinv), id, z);
    return big_uinv * alpha(m) * big_u;
}

// Membership in GQ_{2n} through the block equations
//   A^a D + C^a u B = 1,  A^a C + C^a u A = 0,  B^a D + D^a u B = 0
// and the diagonals of A^a C and B^a D lying in {x - alpha(x)u}.
template <class E>
bool is_gq(const Matrix<E>& m, const E& u)
{
    if (!m.square() || m.rows() % 2) throw PreconditionError("is_gq: shape must be 2n x 2n");
    const int n = m.rows() / 2;
    Matrix<E> a = m.block(0, 0, n, n), b = m.block(0, n, n, n);
    Matrix<E> c = m.block(n, 0, n, n), d = m.block(n, n, n, n);
    Matrix<E> aa = alpha(a), ba = alpha(b), ca = alpha(c), da = alpha(d);
    if (aa * d + ca.rmul(u) * b != Matrix<E>::identity(n, m.proto())) return false;
    Matrix<E> ac = aa * c, bd = ba * d;
    if (!(ac + ca.rmul(u) * a).is_zero_matrix()) return false;
    if (!(bd + da.rmul(u) * b).is_zero_matrix()) return false;
    for (int i = 0; i < n; ++i) {
        E w = zero_like(m.proto());
        if (!is_zero(gamma_reduce_entry(ac(i, i), u, &w))) return false;
        if (!is_zero(gamma_reduce_entry(bd(i, i), u, &w))) return false;
    }
    return true;
}

} // namespace qarf
