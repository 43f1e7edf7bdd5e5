#include "qarf/rings.hpp"

#include "qarf/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <climits>

namespace qarf {

using groups::Element;
using groups::GroupPtr;

// ---------------------------------------------------------------------------
// F_2[G]

GAElem::GAElem(GroupPtr g, const Element& x) : g_(std::move(g))
{
    g_->validate(x);
    t_.insert(x);
}

GAElem GAElem::one(GroupPtr g)
{
    Element e = g->identity();
    return GAElem(std::move(g), e);
}

void GAElem::toggle(const Element& x)
{
    auto it = t_.find(x);
    if (it != t_.end()) t_.erase(it);
    else t_.insert(x);
}

namespace {

const GroupPtr& common_group(const GroupPtr& a, const GroupPtr& b)
{
    if (!a) return b;
    if (b && a->id() != b->id()) throw PreconditionError("group algebra: elements of different groups");
    return a;
}

} // namespace

GAElem& GAElem::operator+=(const GAElem& o)
{
    g_ = common_group(g_, o.g_);
    for (const auto& x : o.t_) toggle(x);
    return *this;
}

GAElem operator*(const GAElem& a, const GAElem& b)
{
    GAElem r(common_group(a.g_, b.g_));
    if (a.is_zero() || b.is_zero()) return r;
    for (const auto& x : a.t_)
        for (const auto& y : b.t_) r.toggle(r.g_->mul(x, y));
    return r;
}

GAElem zero_like(const GAElem& x) { return GAElem(x.group()); }

GAElem int_like(const GAElem& x, std::int64_t k)
{
    if (k % 2 == 0) return GAElem(x.group());
    if (!x.group()) throw PreconditionError("group algebra: constant needs a group");
    return GAElem::one(x.group());
}

GAElem involute(const GAElem& x)
{
    GAElem r(x.group());
    for (const auto& g : x.terms()) r.toggle(x.group()->inv(g));
    return r;
}

bool is_zero(const GAElem& x) { return x.is_zero(); }

std::optional<GAElem> try_inverse(const GAElem& x)
{
    if (x.is_zero()) return std::nullopt;
    const auto& g = x.group();
    if (x.size() == 1) return GAElem(g, g->inv(*x.terms().begin()));
    if (!g->is_finite())
        throw UnknownError("group algebra: unit test for several terms needs a finite group");
    auto elems = g->window(0);
    const int n = static_cast<int>(elems.size());
    if (n > 4096) throw UnknownError("group algebra: group too large for unit test");
    std::map<Element, int, groups::ElementLess> pos;
    for (int i = 0; i < n; ++i) pos.emplace(elems[i], i);
    // columns x*h; solve sum c_h x*h = 1
    linalg::F2Subspace span(n, true);
    for (const auto& h : elems) {
        linalg::BitVec v(n);
        for (const auto& t : x.terms()) v.flip(pos.at(g->mul(t, h)));
        span.insert(v);
    }
    linalg::BitVec one(n);
    one.set(pos.at(g->identity()));
    auto w = span.witness(one);
    if (!w) return std::nullopt;
    GAElem y(g);
    for (int i : *w) y.toggle(elems[i]);
    // in a finite group algebra a right inverse is two-sided
    return y;
}

std::string to_string(const GAElem& x)
{
    if (x.is_zero()) return "0";
    std::string out;
    for (const auto& g : x.terms()) {
        if (!out.empty()) out += " + ";
        out += x.group()->format(g);
    }
    return out;
}

GAElem parse_ga(const GroupPtr& g, std::string_view text)
{
    GAElem r(g);
    int depth = 0;
    std::size_t start = 0;
    auto flush = [&](std::size_t end) {
        std::string piece(text.substr(start, end - start));
        piece.erase(0, piece.find_first_not_of(" \t"));
        piece.erase(piece.find_last_not_of(" \t") + 1);
        if (piece.empty()) throw ParseError("group algebra: empty term in '" + std::string(text) + "'");
        if (piece == "0") return;
        r.toggle(g->parse(piece));
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == '+' && depth == 0) {
            flush(i);
            start = i + 1;
        }
    }
    flush(text.size());
    return r;
}

GAElem gamma_reduce_entry(const GAElem& a, const GAElem& u, GAElem* witness)
{
    // {x + xbar u} is spanned by g + g^-1 c for u = c a central group element;
    // g <-> g^-1 c is an involution on G and each orbit keeps its minimum.
    if (u.size() != 1) throw PreconditionError("gamma_reduce: u must be a group element");
    const auto& g = common_group(a.group(), u.group());
    const Element c = *u.terms().begin();
    for (const auto& [name, s] : g->generators())
        if (g->mul(s, c) != g->mul(c, s)) throw PreconditionError("gamma_reduce: u must be central");
    GAElem r = a;
    GAElem w(g);
    for (const auto& x : a.terms()) {
        Element p = g->mul(g->inv(x), c);
        if (p == x || !groups::encoding_less(p, x)) continue;
        if (!r.contains(x)) continue;
        r.toggle(x);
        r.toggle(p);
        w.toggle(x);
    }
    if (witness) *witness = w;
    return r;
}

// ---------------------------------------------------------------------------
// Polynomial rings

PolyRing::PolyRing(std::vector<std::string> v, int ch, bool l, PolyInvolution inv, std::vector<int> nl)
    : vars(std::move(v)), characteristic(ch), laurent(l), involution(inv), nil(std::move(nl))
{
    if (ch < 0 || ch == 1) throw PreconditionError("poly ring: bad characteristic");
    for (int p = 2; p * p <= ch; ++p)
        if (ch % p == 0) throw PreconditionError("poly ring: characteristic must be 0 or prime");
    if (ch > 1000) throw PreconditionError("poly ring: characteristic too large");
    if (nil.empty()) nil.assign(vars.size(), 0);
    if (nil.size() != vars.size()) throw PreconditionError("poly ring: nilpotency bounds do not match variables");
    if (involution == PolyInvolution::InvertVariables && !laurent)
        throw PreconditionError("poly ring: inverting variables needs a Laurent ring");
    for (int b : nil) {
        if (b < 0) throw PreconditionError("poly ring: negative nilpotency bound");
        if (b > 0 && laurent) throw PreconditionError("poly ring: nilpotent variables in a Laurent ring");
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (vars[i] == vars[j]) throw PreconditionError("poly ring: repeated variable " + vars[i]);
}

int PolyRing::var_index(std::string_view name) const
{
    for (int i = 0; i < nvars(); ++i)
        if (vars[i] == name) return i;
    return -1;
}

bool PolyRing::all_nilpotent() const
{
    return std::all_of(nil.begin(), nil.end(), [](int b) { return b > 0; });
}

std::string PolyRing::describe() const
{
    std::string out = characteristic == 0 ? "Z" : "F" + std::to_string(characteristic);
    out += "[";
    for (int i = 0; i < nvars(); ++i) {
        out += (i ? "," : "") + vars[i];
        if (laurent) out += "^+-";
    }
    out += "]";
    bool any = false;
    for (int i = 0; i < nvars(); ++i)
        if (nil[i]) {
            out += any ? "," : "/(";
            out += vars[i] + "^" + std::to_string(nil[i]);
            any = true;
        }
    if (any) out += ")";
    return out;
}

PolyRingPtr make_poly_ring(std::vector<std::string> vars, int characteristic, bool laurent, PolyInvolution inv,
                           std::vector<int> nil)
{
    return std::make_shared<const PolyRing>(std::move(vars), characteristic, laurent, inv, std::move(nil));
}

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Error("polynomial coefficient overflow");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error("polynomial coefficient overflow");
    return r;
}

const PolyRingPtr& common_ring(const PolyRingPtr& a, const PolyRingPtr& b)
{
    if (!a) return b;
    if (b && a != b && a->vars != b->vars) throw PreconditionError("polynomial: elements of different rings");
    if (b && a != b && (a->characteristic != b->characteristic || a->laurent != b->laurent || a->nil != b->nil))
        throw PreconditionError("polynomial: elements of different rings");
    return a;
}

} // namespace

Poly Poly::constant(PolyRingPtr r, std::int64_t c)
{
    Poly p(r);
    p.add_term(Monomial(r->nvars(), 0), c);
    return p;
}

Poly Poly::var(PolyRingPtr r, int i)
{
    if (i < 0 || i >= r->nvars()) throw PreconditionError("polynomial: variable index out of range");
    Monomial e(r->nvars(), 0);
    e[i] = 1;
    return monomial(std::move(r), std::move(e));
}

Poly Poly::monomial(PolyRingPtr r, Monomial e, std::int64_t c)
{
    Poly p(r);
    p.add_term(e, c);
    return p;
}

std::int64_t Poly::coeff(const Monomial& e) const
{
    auto it = t_.find(e);
    return it == t_.end() ? 0 : it->second;
}

std::int64_t Poly::constant_term() const
{
    if (!r_) return 0;
    return coeff(Monomial(r_->nvars(), 0));
}

void Poly::add_term(const Monomial& e, std::int64_t c)
{
    if (!r_) throw PreconditionError("polynomial: no ring");
    if (static_cast<int>(e.size()) != r_->nvars()) throw PreconditionError("polynomial: exponent length mismatch");
    for (int i = 0; i < r_->nvars(); ++i) {
        if (e[i] < 0 && !r_->laurent) throw PreconditionError("polynomial: negative exponent in a polynomial ring");
        if (r_->nil[i] && e[i] >= r_->nil[i]) return;
    }
    const int p = r_->characteristic;
    if (p) c %= p;
    if (c == 0) return;
    auto it = t_.find(e);
    if (it == t_.end()) {
        t_.emplace(e, p ? (c + p) % p : c);
        return;
    }
    std::int64_t v = p ? ((it->second + c) % p + p) % p : checked_add(it->second, c);
    if (v == 0) t_.erase(it);
    else it->second = v;
}

Poly& Poly::operator+=(const Poly& o)
{
    r_ = common_ring(r_, o.r_);
    for (const auto& [e, c] : o.t_) add_term(e, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o)
{
    r_ = common_ring(r_, o.r_);
    for (const auto& [e, c] : o.t_) add_term(e, -c);
    return *this;
}

Poly Poly::operator-() const { return scaled(-1); }

Poly operator*(const Poly& a, const Poly& b)
{
    Poly r(common_ring(a.r_, b.r_));
    if (a.is_zero() || b.is_zero()) return r;
    const int n = r.r_->nvars();
    Monomial e(n);
    for (const auto& [ea, ca] : a.t_)
        for (const auto& [eb, cb] : b.t_) {
            for (int i = 0; i < n; ++i) e[i] = checked_add(ea[i], eb[i]);
            r.add_term(e, r.r_->characteristic ? ca * cb % r.r_->characteristic : checked_mul(ca, cb));
        }
    return r;
}

Poly Poly::scaled(std::int64_t c) const
{
    Poly r(r_);
    for (const auto& [e, x] : t_) r.add_term(e, r_->characteristic ? (c % r_->characteristic) * x : checked_mul(c, x));
    return r;
}

Poly Poly::pow(int k) const
{
    if (k < 0) {
        auto inv = try_inverse(*this);
        if (!inv) throw PreconditionError("polynomial: negative power of a non-unit");
        return inv->pow(-k);
    }
    Poly r = constant(r_, 1), b = *this;
    for (; k; k >>= 1, b = b * b)
        if (k & 1) r = r * b;
    return r;
}

Poly Poly::partial(int i) const
{
    Poly r(r_);
    for (const auto& [e, c] : t_) {
        if (e[i] == 0) continue;
        Monomial f = e;
        f[i] -= 1;
        r.add_term(f, checked_mul(c, e[i]));
    }
    return r;
}

Poly Poly::frobenius_substitute(int k) const
{
    Poly r(r_);
    for (const auto& [e, c] : t_) {
        Monomial f = e;
        for (auto& x : f) x = checked_mul(x, k);
        r.add_term(f, c);
    }
    return r;
}

Poly Poly::div_exact(std::int64_t k) const
{
    if (r_ && r_->characteristic) throw PreconditionError("polynomial: exact division needs characteristic 0");
    Poly r(r_);
    for (const auto& [e, c] : t_) {
        if (c % k) throw PreconditionError("polynomial: coefficient not divisible");
        r.add_term(e, c / k);
    }
    return r;
}

Poly Poly::mod2_split(Poly* half) const
{
    Poly r(r_), h(r_);
    for (const auto& [e, c] : t_) {
        std::int64_t m = ((c % 2) + 2) % 2;
        r.add_term(e, m);
        h.add_term(e, (c - m) / 2);
    }
    if (half) *half = h;
    return r;
}

Poly Poly::change_ring(PolyRingPtr r) const
{
    if (r_ && r->nvars() != r_->nvars()) throw PreconditionError("polynomial: ring change needs the same variables");
    Poly p(std::move(r));
    for (const auto& [e, c] : t_) p.add_term(e, c);
    return p;
}

Poly zero_like(const Poly& x) { return Poly(x.ring()); }

Poly int_like(const Poly& x, std::int64_t k)
{
    if (!x.ring()) throw PreconditionError("polynomial: constant needs a ring");
    return Poly::constant(x.ring(), k);
}

Poly involute(const Poly& x)
{
    if (!x.ring() || x.ring()->involution == PolyInvolution::Trivial) return x;
    Poly r(x.ring());
    for (const auto& [e, c] : x.terms()) {
        Monomial f = e;
        for (auto& v : f) v = -v;
        r.add_term(f, c);
    }
    return r;
}

bool is_zero(const Poly& x) { return x.is_zero(); }

std::optional<Poly> try_inverse(const Poly& x)
{
    if (x.is_zero()) return std::nullopt;
    const auto& r = x.ring();
    const int p = r->characteristic;
    auto unit_coeff = [&](std::int64_t c) -> std::optional<std::int64_t> {
        if (p) {
            if (c % p == 0) return std::nullopt;
            return linalg::mod_inverse(static_cast<int>(((c % p) + p) % p), p);
        }
        if (c == 1 || c == -1) return c;
        return std::nullopt;
    };
    if (r->all_nilpotent()) {
        // c + N with N nilpotent
        auto ci = unit_coeff(x.constant_term());
        if (!ci) return std::nullopt;
        Poly n = x - Poly::constant(r, x.constant_term());
        Poly m = n.scaled(-*ci);
        Poly y = Poly::constant(r, 1), pw = Poly::constant(r, 1);
        while (!(pw = pw * m).is_zero()) y += pw;
        return y.scaled(*ci);
    }
    if (x.terms().size() != 1) return std::nullopt;
    const auto& [e, c] = *x.terms().begin();
    auto ci = unit_coeff(c);
    if (!ci) return std::nullopt;
    Monomial f = e;
    for (auto& v : f) {
        if (v != 0 && !r->laurent) return std::nullopt;
        v = -v;
    }
    return Poly::monomial(r, f, *ci);
}

std::string format_monomial(const PolyRing& r, const Monomial& e)
{
    std::string out;
    for (int i = 0; i < r.nvars(); ++i) {
        if (e[i] == 0) continue;
        if (!out.empty()) out += "*";
        out += r.vars[i];
        if (e[i] != 1) out += "^" + std::to_string(e[i]);
    }
    return out;
}

std::string to_string(const Poly& x)
{
    if (x.is_zero()) return "0";
    std::string out;
    for (const auto& [e, c] : x.terms()) {
        std::string m = format_monomial(*x.ring(), e);
        std::int64_t a = c < 0 ? -c : c;
        std::string piece = m.empty() ? std::to_string(a) : (a == 1 ? m : std::to_string(a) + "*" + m);
        if (out.empty()) out = (c < 0 ? "-" : "") + piece;
        else out += (c < 0 ? " - " : " + ") + piece;
    }
    return out;
}

namespace {

class PolyParser {
public:
    PolyParser(const PolyRingPtr& r, std::string_view s) : r_(r), s_(s) {}

    Poly parse()
    {
        Poly p = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return p;
    }

private:
    void skip()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c)
    {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError("polynomial '" + std::string(s_) + "' at " + std::to_string(i_) + ": " + msg);
    }
    std::int64_t integer()
    {
        skip();
        bool neg = false;
        if (i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) neg = s_[i_++] == '-';
        if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) fail("expected an integer");
        std::int64_t v = 0;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
            v = checked_add(checked_mul(v, 10), s_[i_++] - '0');
        }
        return neg ? -v : v;
    }
    Poly expr()
    {
        skip();
        Poly acc(r_);
        bool neg = false;
        if (eat('-')) neg = true;
        else eat('+');
        Poly t = term();
        acc += neg ? -t : t;
        for (;;) {
            if (eat('+')) acc += term();
            else if (eat('-')) acc -= term();
            else break;
        }
        return acc;
    }
    Poly term()
    {
        Poly acc = factor();
        for (;;) {
            skip();
            if (eat('*')) {
                acc = acc * factor();
                continue;
            }
            // implicit product: "2X", "X Y"
            if (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '(')) {
                acc = acc * factor();
                continue;
            }
            break;
        }
        return acc;
    }
    Poly factor()
    {
        skip();
        Poly base(r_);
        if (eat('(')) {
            base = expr();
            if (!eat(')')) fail("expected ')'");
        } else if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
            base = Poly::constant(r_, integer());
        } else if (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
            std::size_t j = i_;
            while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
            std::string name(s_.substr(i_, j - i_));
            int v = r_->var_index(name);
            if (v < 0) {
                // allow single-letter juxtaposition "XY"
                std::size_t k = i_ + 1;
                std::string one(s_.substr(i_, 1));
                v = r_->var_index(one);
                if (v < 0) fail("unknown variable '" + name + "'");
                j = k;
            }
            i_ = j;
            base = Poly::var(r_, v);
        } else {
            fail("expected a factor");
        }
        if (eat('^')) {
            bool brace = eat('{');
            std::int64_t k = integer();
            if (brace && !eat('}')) fail("expected '}'");
            if (k > INT_MAX || k < INT_MIN) fail("exponent too large");
            base = base.pow(static_cast<int>(k));
        }
        return base;
    }

    const PolyRingPtr& r_;
    std::string_view s_;
    std::size_t i_ = 0;
};

} // namespace

Poly parse_poly(const PolyRingPtr& r, std::string_view text) { return PolyParser(r, text).parse(); }

Poly gamma_reduce_entry(const Poly& a, const Poly& u, Poly* witness)
{
    // u must be +1 or -1; {x - xbar u} is spanned by m - eps mbar.
    const auto& r = common_ring(a.ring(), u.ring());
    const int p = r->characteristic;
    std::int64_t eps = 0;
    if (u.terms().size() == 1 && u.constant_term() != 0) {
        std::int64_t c = u.constant_term();
        if (c == 1 || (p && (c - 1) % p == 0)) eps = 1;
        else if (c == -1 || (p && (c + 1) % p == 0)) eps = -1;
    }
    if (eps == 0) throw PreconditionError("gamma_reduce: u must be 1 or -1");
    Poly out = a;
    Poly w(r);
    for (const auto& [e, c0] : a.terms()) {
        std::int64_t c = out.coeff(e);
        if (c == 0) continue;
        Monomial f = e;
        if (r->involution == PolyInvolution::InvertVariables)
            for (auto& v : f) v = -v;
        if (f != e) {
            if (!(f < e)) continue;
            // subtract c(m - eps mbar)
            out.add_term(e, -c);
            out.add_term(f, eps * c);
            w.add_term(e, c);
            continue;
        }
        if (eps == 1 || p == 2) continue;  // x - x = 0, or 2x = 0
        if (p) {
            // 2 is a unit: everything is killed
            std::int64_t h = c * linalg::mod_inverse(2, p) % p;
            out.add_term(e, -c);
            w.add_term(e, h);
        } else {
            std::int64_t m = ((c % 2) + 2) % 2;
            out.add_term(e, m - c);
            w.add_term(e, (c - m) / 2);
        }
    }
    if (witness) *witness = w;
    return out;
}

// ---------------------------------------------------------------------------
// Truncated rings

std::vector<std::vector<std::int64_t>> exotic_powers(int n)
{
    // s = -T/(1+T) = sum_{j>=1} (-1)^j T^j
    std::vector<std::int64_t> s(n + 1, 0);
    for (int j = 1; j <= n; ++j) s[j] = (j % 2) ? -1 : 1;
    std::vector<std::vector<std::int64_t>> pw(n + 1, std::vector<std::int64_t>(n + 1, 0));
    pw[0][0] = 1;
    for (int k = 1; k <= n; ++k)
        for (int i = 0; i <= n; ++i) {
            if (!pw[k - 1][i]) continue;
            for (int j = 1; i + j <= n; ++j) pw[k][i + j] = checked_add(pw[k][i + j], checked_mul(pw[k - 1][i], s[j]));
        }
    return pw;
}

Truncated<Poly> parse_truncated(const PolyRingPtr& r, int n, std::string_view text, const std::string& tvar)
{
    if (r->var_index(tvar) >= 0) throw PreconditionError("parse_truncated: ring already has a variable " + tvar);
    std::vector<std::string> vars = r->vars;
    vars.push_back(tvar);
    std::vector<int> nil = r->nil;
    nil.push_back(n + 1);
    auto ext = make_poly_ring(vars, r->characteristic, false, PolyInvolution::Trivial, nil);
    if (r->laurent) {
        // Laurent base: parse with T adjoined as a free variable, then truncate
        ext = make_poly_ring(vars, r->characteristic, true, PolyInvolution::Trivial);
    }
    Poly p = parse_poly(ext, text);
    Truncated<Poly> t(n, Poly(r));
    const int nv = r->nvars();
    for (const auto& [e, c] : p.terms()) {
        std::int64_t k = e[nv];
        if (k < 0) throw ParseError("parse_truncated: negative power of " + tvar);
        if (k > n) continue;
        Monomial f(e.begin(), e.end() - 1);
        t[static_cast<int>(k)].add_term(f, c);
    }
    return t;
}

} // namespace qarf
