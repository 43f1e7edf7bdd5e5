#include "qarf/k2diff.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "qarf/linalg.hpp"

namespace qarf {

using groups::Element;

namespace {

void require_form_ring(const PolyRingPtr& r)
{
    if (!r) throw PreconditionError("differential form: no ring");
    for (int n : r->nil)
        if (n > 0) throw PreconditionError("differential form: rings with nilpotent variables are not supported");
}

std::int64_t mod2(std::int64_t c) { return ((c % 2) + 2) % 2; }

std::string trim(std::string_view s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

} // namespace

// ---------------------------------------------------------------------------
// Differential forms

DifferentialForm::DifferentialForm(PolyRingPtr r) : r_(std::move(r))
{
    require_form_ring(r_);
    c_.assign(r_->nvars(), Poly(r_));
}

DifferentialForm DifferentialForm::basis(PolyRingPtr r, int i)
{
    DifferentialForm w(r);
    w.c_.at(i) = Poly::constant(r, 1);
    return w;
}

bool DifferentialForm::is_zero() const
{
    for (const auto& p : c_)
        if (!p.is_zero()) return false;
    return true;
}

DifferentialForm& DifferentialForm::operator+=(const DifferentialForm& o)
{
    if (!r_) *this = DifferentialForm(o.r_);
    if (o.c_.size() != c_.size()) throw PreconditionError("differential form: different rings");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

DifferentialForm& DifferentialForm::operator-=(const DifferentialForm& o)
{
    return *this += -o;
}

DifferentialForm DifferentialForm::operator-() const
{
    DifferentialForm w = *this;
    for (auto& p : w.c_) p = -p;
    return w;
}

DifferentialForm operator*(const Poly& p, const DifferentialForm& w)
{
    DifferentialForm r = w;
    for (auto& c : r.c_) c = p * c;
    return r;
}

DifferentialForm delta(const Poly& p)
{
    DifferentialForm w(p.ring());
    for (int i = 0; i < w.size(); ++i) w.coeff(i) = p.partial(i);
    return w;
}

std::string to_string(const DifferentialForm& w)
{
    std::string out;
    for (int i = 0; i < w.size(); ++i) {
        const Poly& c = w.coeff(i);
        if (c.is_zero()) continue;
        std::string s = to_string(c);
        if (c.terms().size() > 1) s = "(" + s + ")";
        else if (s == "1") s.clear();
        else if (s == "-1") s = "-";
        if (!out.empty()) out += " + ";
        out += s + (s.empty() || s == "-" ? "" : " ") + "d" + w.ring()->vars[i];
    }
    return out.empty() ? "0" : out;
}

DifferentialForm parse_form(const PolyRingPtr& r, std::string_view text)
{
    DifferentialForm w(r);
    std::string t = trim(text);
    if (t == "0") return w;
    std::size_t start = 0, pos = 0;
    int depth = 0;
    bool any = false;
    while (pos < t.size()) {
        char ch = t[pos];
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        int var = -1;
        std::size_t len = 0;
        const bool boundary = pos == 0 || t[pos - 1] == ' ' || t[pos - 1] == '*' || t[pos - 1] == ')' ||
                              t[pos - 1] == '+' || t[pos - 1] == '-';
        if (depth == 0 && ch == 'd' && boundary) {
            for (int i = 0; i < r->nvars(); ++i) {
                const auto& v = r->vars[i];
                if (t.compare(pos + 1, v.size(), v) != 0 || v.size() + 1 <= len) continue;
                std::size_t end = pos + 1 + v.size();
                if (end < t.size() && std::isalnum(static_cast<unsigned char>(t[end]))) continue;
                var = i;
                len = v.size() + 1;
            }
        }
        if (var < 0) {
            ++pos;
            continue;
        }
        std::string coef = trim(std::string_view(t).substr(start, pos - start));
        if (!coef.empty() && coef.front() == '+') coef = trim(coef.substr(1));
        while (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
        if (coef.empty()) coef = "1";
        if (coef == "-") coef = "-1";
        bool neg = false;
        if (coef.size() > 1 && coef[0] == '-' && coef[1] == '(') {
            neg = true;
            coef = coef.substr(1);
        }
        if (coef.front() == '(' && coef.back() == ')') coef = coef.substr(1, coef.size() - 2);
        Poly c = parse_poly(r, coef);
        w.coeff(var) += neg ? -c : c;
        any = true;
        pos += len;
        start = pos;
    }
    if (!any || !trim(std::string_view(t).substr(start)).empty())
        throw ParseError("differential form: cannot parse '" + t + "'");
    return w;
}

namespace {

// Log-coordinates mod 2: M -> set of i with (M, i) present, where (M, i)
// stands for (M / x_i) dx_i.
using LogTerms = std::map<Monomial, std::set<int>>;

LogTerms log_terms_mod2(const DifferentialForm& w)
{
    LogTerms out;
    const int n = w.size();
    for (int i = 0; i < n; ++i) {
        for (const auto& [e, c] : w.coeff(i).terms()) {
            if (mod2(c) == 0) continue;
            Monomial m = e;
            m[i] += 1;
            auto& s = out[m];
            if (!s.erase(i)) s.insert(i);
        }
    }
    return out;
}

void toggle_log(LogTerms& t, const Monomial& m, int i)
{
    auto& s = t[m];
    if (!s.erase(i)) s.insert(i);
}

// (M, i) = sum_{j != i} M_j (M, j) for the first i with M_i odd.
void eliminate_delta(LogTerms& t, const Monomial& m)
{
    auto it = t.find(m);
    if (it == t.end()) return;
    int first = -1;
    for (int i = 0; i < static_cast<int>(m.size()); ++i)
        if (mod2(m[i])) {
            first = i;
            break;
        }
    if (first < 0 || !it->second.count(first)) return;
    it->second.erase(first);
    for (int j = first + 1; j < static_cast<int>(m.size()); ++j)
        if (mod2(m[j])) toggle_log(t, m, j);
}

DifferentialForm from_log_terms(const PolyRingPtr& r, const LogTerms& t)
{
    DifferentialForm w(r);
    for (const auto& [m, s] : t) {
        for (int i : s) {
            Monomial e = m;
            e[i] -= 1;
            w.coeff(i).add_term(e, 1);
        }
    }
    return w;
}

Monomial squaring_root(Monomial m)
{
    bool nonzero = false;
    for (auto v : m) nonzero |= v != 0;
    if (!nonzero) return m;
    for (;;) {
        bool even = true;
        for (auto v : m) even &= v % 2 == 0;
        if (!even) return m;
        for (auto& v : m) v /= 2;
    }
}

} // namespace

DifferentialForm reduce_mod_2_delta(const DifferentialForm& w)
{
    require_form_ring(w.ring());
    if (w.ring()->characteristic % 2 == 1) return DifferentialForm(w.ring());
    LogTerms t = log_terms_mod2(w);
    std::vector<Monomial> keys;
    for (const auto& [m, s] : t) keys.push_back(m);
    for (const auto& m : keys) eliminate_delta(t, m);
    return from_log_terms(w.ring(), t);
}

// ---------------------------------------------------------------------------
// lambda structure

std::optional<LambdaStructure> LambdaStructure::for_ring(const PolyRingPtr& r)
{
    if (!r || r->characteristic != 0) return std::nullopt;
    for (int n : r->nil)
        if (n > 0) return std::nullopt;
    return LambdaStructure(r);
}

LambdaStructure LambdaStructure::require(const PolyRingPtr& r)
{
    auto L = for_ring(r);
    if (!L)
        throw PreconditionError("lambda structure: none registered for " + (r ? r->describe() : std::string("?")) +
                                " (needs a torsion-free ring)");
    return *L;
}

Poly LambdaStructure::psi2(const Poly& a) const
{
    return a.change_ring(r_).frobenius_substitute(2);
}

Poly LambdaStructure::theta2(const Poly& a0) const
{
    Poly a = a0.change_ring(r_);
    return (a * a - psi2(a)).div_exact(2);
}

DifferentialForm phi2_generator(const LambdaStructure& L, const Poly& a, const Poly& b)
{
    return L.psi2(a) * (b * delta(b) - delta(L.theta2(b)));
}

DifferentialForm phi2(const LambdaStructure& L, const DifferentialForm& w)
{
    const auto& r = L.ring();
    DifferentialForm out(r);
    for (int i = 0; i < w.size(); ++i) {
        Poly x = Poly::var(r, i);
        for (const auto& [e, c] : w.coeff(i).terms()) out += phi2_generator(L, Poly::monomial(r, e, c), x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dennis-Stein symbols

DSSymbol make_symbol(const TPoly& a, const TPoly& b)
{
    if (a.degree() != b.degree()) throw PreconditionError("Dennis-Stein symbol: entries in different R_n");
    if (!a.in_ideal() && !b.in_ideal()) throw PreconditionError("Dennis-Stein symbol: neither entry lies in I_n");
    return DSSymbol{a, b};
}

DSSymbol steinberg_symbol(const TPoly& r, const TPoly& s)
{
    auto sinv = try_inverse(s);
    if (!sinv) throw PreconditionError("Steinberg symbol: s is not a unit");
    if (!try_inverse(r)) throw PreconditionError("Steinberg symbol: r is not a unit");
    TPoly one = TPoly::constant(r.degree(), Poly::constant(r[0].ring(), 1));
    return make_symbol((one - r) * *sinv, s);
}

std::string to_string(const DSSymbol& s)
{
    return "<" + to_string(s.a) + ", " + to_string(s.b) + ">";
}

namespace {

NuValue canonical(NuValue v)
{
    Poly half(v.r.ring());
    v.r = v.r.mod2_split(&half);
    if (v.n == 1) return v;
    v.gamma -= delta(half);
    return v;
}

NuValue make_nu(int n, const DifferentialForm& alpha, const Poly& r, const DifferentialForm& gamma)
{
    return canonical(NuValue{n, alpha, r, gamma});
}

// nu_2 <aT, b> for a, b in R
NuValue nu2_generator(const LambdaStructure& L, const Poly& a, const Poly& b)
{
    Poly ta = L.theta2(a), tb = L.theta2(b);
    DifferentialForm g = (a * a - ta) * delta(tb) + (ta * b) * delta(b) + (tb * a) * delta(a);
    return make_nu(2, a * delta(b), a * a * tb, g);
}

// nu <x, y> with x in I_n
NuValue nu_first_in_ideal(const LambdaStructure& L, const TPoly& x, const TPoly& y)
{
    const int n = x.degree();
    const auto& r = L.ring();
    DifferentialForm zero(r);
    const Poly& y0 = y[0];
    if (n == 1) {
        // <aT, y0 + y1 T> = <aT, y0> + <a y1 T, T>
        const Poly& a = x[1];
        return make_nu(1, a * delta(y0), a * a * L.theta2(y0) + a * y[1], zero);
    }
    // <x, y> = <x, y0> + <x, c>, c = (y - y0)(1 - x y0)^-1
    // <x, y0> = <x1 T, y0> + <x2 T^2, y0>
    // <x, c>  = <x1 c1 T, T> + <x1 T^2, c1>     (c in I_2)
    const Poly& x1 = x[1];
    const Poly& x2 = x[2];
    TPoly one = TPoly::constant(n, Poly::constant(r, 1));
    TPoly y0t = TPoly::constant(n, y0);
    TPoly c = (y - y0t) * truncated_inverse(one - x * y0t);
    const Poly& c1 = c[1];
    NuValue v = nu2_generator(L, x1, y0);
    v = v + make_nu(2, zero, Poly(r), x2 * delta(y0));
    v = v + make_nu(2, zero, x1 * c1, x1 * delta(c1));
    return v;
}

} // namespace

NuValue nu_zero(const PolyRingPtr& r, int n)
{
    return NuValue{n, DifferentialForm(r), Poly(r), DifferentialForm(r)};
}

NuValue operator+(const NuValue& x, const NuValue& y)
{
    if (x.n != y.n) throw PreconditionError("nu: values for different n");
    return canonical(NuValue{x.n, x.alpha + y.alpha, x.r + y.r, x.gamma + y.gamma});
}

NuValue operator-(const NuValue& x)
{
    return canonical(NuValue{x.n, -x.alpha, -x.r, -x.gamma});
}

NuValue operator-(const NuValue& x, const NuValue& y)
{
    return x + (-y);
}

std::string to_string(const NuValue& v)
{
    if (v.n == 1) return "(" + to_string(v.alpha) + ", [" + to_string(v.r) + "])";
    return "(" + to_string(v.alpha) + ", [" + to_string(v.r) + ", " + to_string(v.gamma) + "])";
}

NuValue nu(const LambdaStructure& L, const DSSymbol& s0)
{
    const int n = s0.a.degree();
    if (n != 1 && n != 2) throw PreconditionError("nu: only R_1 and R_2 are supported");
    DSSymbol s = make_symbol(s0.a, s0.b);
    TPoly a = s.a, b = s.b;
    for (int k = 0; k <= n; ++k) {
        a[k] = a[k].change_ring(L.ring());
        b[k] = b[k].change_ring(L.ring());
    }
    if (a.in_ideal()) return nu_first_in_ideal(L, a, b);
    return -nu_first_in_ideal(L, b, a);
}

NuValue nu1(const LambdaStructure& L, const DSSymbol& s)
{
    if (s.a.degree() != 1) throw PreconditionError("nu1: symbol not in K_2(R_1, I_1)");
    return nu(L, s);
}

NuValue nu2(const LambdaStructure& L, const DSSymbol& s)
{
    if (s.a.degree() != 2) throw PreconditionError("nu2: symbol not in K_2(R_2, I_2)");
    return nu(L, s);
}

NuValue nu(const LambdaStructure& L, const std::vector<DSSymbol>& sum)
{
    if (sum.empty()) throw PreconditionError("nu: empty sum has no degree");
    NuValue v = nu_zero(L.ring(), sum.front().a.degree());
    for (const auto& s : sum) v = v + nu(L, s);
    return v;
}

std::vector<DSSymbol> nu1_inverse(const LambdaStructure& L, const DifferentialForm& alpha, const Poly& c)
{
    const auto& r = L.ring();
    Poly zero(r), one = Poly::constant(r, 1);
    TPoly T({zero, one});
    auto times_T = [&](const Poly& p) { return TPoly({zero, p}); };
    std::vector<DSSymbol> out;
    for (int i = 0; i < alpha.size(); ++i) {
        const Poly& a = alpha.coeff(i);
        if (a.is_zero()) continue;
        Poly b = Poly::var(r, i);
        out.push_back(make_symbol(times_T(a), TPoly::constant(1, b)));
        out.push_back(make_symbol(times_T(a * a * L.theta2(b)), T));
    }
    out.push_back(make_symbol(times_T(c), T));
    return out;
}

std::string ds_relation_name(DSRelation r)
{
    switch (r) {
    case DSRelation::AntiSymmetry: return "anti-symmetry";
    case DSRelation::Additivity: return "additivity";
    case DSRelation::Multiplicativity: return "multiplicativity";
    }
    return "?";
}

NuValue ds_relation_residual(const LambdaStructure& L, DSRelation rel, const TPoly& a, const TPoly& b,
                             const std::optional<TPoly>& c)
{
    auto S = [](const TPoly& x, const TPoly& y) { return DSSymbol{x, y}; };
    switch (rel) {
    case DSRelation::AntiSymmetry:
        if (!a.in_ideal() && !b.in_ideal()) throw PreconditionError("anti-symmetry: a or b must lie in I");
        return nu(L, S(a, b)) + nu(L, S(b, a));
    case DSRelation::Additivity: {
        if (!c) throw PreconditionError("additivity: needs c");
        if (!a.in_ideal() && !(b.in_ideal() && c->in_ideal()))
            throw PreconditionError("additivity: a, or both b and c, must lie in I");
        return nu(L, S(a, b)) + nu(L, S(a, *c)) - nu(L, S(a, b + *c - a * b * *c));
    }
    case DSRelation::Multiplicativity: {
        if (!c) throw PreconditionError("multiplicativity: needs c");
        if (!a.in_ideal() && !b.in_ideal() && !c->in_ideal())
            throw PreconditionError("multiplicativity: a, b or c must lie in I");
        return nu(L, S(a, b * *c)) - nu(L, S(a * b, *c)) - nu(L, S(a * *c, b));
    }
    }
    throw PreconditionError("unknown relation");
}

// ---------------------------------------------------------------------------
// Omega / (2 Omega + delta R + {x dy + x^2 y dy})

OmegaQuotientClass::OmegaQuotientClass(const DifferentialForm& w)
{
    require_form_ring(w.ring());
    if (w.ring()->characteristic % 2 == 1) {
        rep_ = DifferentialForm(w.ring());
        return;
    }
    LogTerms raw = log_terms_mod2(w), t;
    for (const auto& [m, s] : raw) {
        Monomial root = squaring_root(m);
        for (int i : s) toggle_log(t, root, i);
    }
    std::vector<Monomial> keys;
    for (const auto& [m, s] : t) keys.push_back(m);
    for (const auto& m : keys) eliminate_delta(t, m);
    rep_ = from_log_terms(w.ring(), t);
}

OmegaQuotientClass& OmegaQuotientClass::operator+=(const OmegaQuotientClass& o)
{
    if (!rep_.ring()) {
        *this = o;
        return *this;
    }
    if (!o.rep_.ring()) return *this;
    *this = OmegaQuotientClass(rep_ + o.rep_);
    return *this;
}

std::string to_string(const OmegaQuotientClass& c)
{
    if (!c.rep().ring() || c.is_zero()) return "0";
    return "[" + to_string(c.rep()) + "]";
}

bool in_extra_span_window(const DifferentialForm& w, int window, int ysupport)
{
    const auto& r = w.ring();
    require_form_ring(r);
    DifferentialForm target = reduce_mod_2_delta(w);
    if (target.is_zero()) return true;
    // monomials of the window
    std::vector<Monomial> mons;
    const int n = r->nvars();
    const int lo = r->laurent ? -window : 0;
    Monomial e(n, lo);
    for (;;) {
        mons.push_back(e);
        int i = 0;
        while (i < n && e[i] == window) e[i++] = lo;
        if (i == n) break;
        ++e[i];
    }
    std::vector<Poly> ys;
    for (const auto& m : mons) ys.push_back(Poly::monomial(r, m));
    if (ysupport >= 2)
        for (std::size_t a = 0; a < mons.size(); ++a)
            for (std::size_t b = a + 1; b < mons.size(); ++b) ys.push_back(ys[a] + ys[b]);
    std::vector<DifferentialForm> rels;
    for (const auto& m : mons) {
        Poly x = Poly::monomial(r, m);
        for (const auto& y : ys) {
            DifferentialForm rel = reduce_mod_2_delta(x * delta(y) + (x * x * y) * delta(y));
            if (!rel.is_zero()) rels.push_back(rel);
        }
    }
    // coordinates
    std::map<std::pair<int, Monomial>, int> index;
    auto coords = [&](const DifferentialForm& f, bool grow) -> std::optional<std::vector<int>> {
        std::vector<int> out;
        for (int i = 0; i < f.size(); ++i)
            for (const auto& [m, c] : f.coeff(i).terms()) {
                auto key = std::make_pair(i, m);
                auto it = index.find(key);
                if (it == index.end()) {
                    if (!grow) return std::nullopt;
                    it = index.emplace(key, static_cast<int>(index.size())).first;
                }
                out.push_back(it->second);
            }
        return out;
    };
    std::vector<std::vector<int>> rc;
    for (const auto& f : rels) rc.push_back(*coords(f, true));
    auto tc = coords(target, false);
    if (!tc) return false;
    const int dim = static_cast<int>(index.size());
    linalg::F2Subspace span(dim);
    for (const auto& v : rc) {
        linalg::BitVec b(dim);
        for (int k : v) b.flip(k);
        span.insert(b);
    }
    linalg::BitVec t(dim);
    for (int k : *tc) t.flip(k);
    return span.contains(t);
}

OmegaQuotientClass omega2(const ArfExpression& e)
{
    if (e.flavor() != ArfFlavor::ReducedPairs) throw PreconditionError("omega2: needs a reduced expression <<a,b>>");
    const auto& r = e.ring_ptr();
    if (r->involution != PolyInvolution::Trivial) throw PreconditionError("omega2: needs the trivial involution");
    LambdaStructure::require(r);
    DifferentialForm w(r);
    for (const auto& p : e.ring_pairs()) w += p.a * delta(p.b);
    return OmegaQuotientClass(w);
}

TotalInvariant total_invariant(const ArfExpression& e)
{
    if (e.flavor() == ArfFlavor::GroupPairs) throw PreconditionError("total_invariant: needs a commutative ring expression");
    const auto& r = e.ring_ptr();
    require_form_ring(r);
    if (r->involution != PolyInvolution::Trivial) throw PreconditionError("total_invariant: needs the trivial involution");
    if (e.flavor() == ArfFlavor::RingPairs) {
        const Poly& u = e.unit();
        const bool ok = u == Poly::constant(r, -1) || (r->characteristic == 2 && u == Poly::constant(r, 1));
        if (!ok) throw PreconditionError("total_invariant: needs u = -1");
    }
    TotalInvariant t{CRClass(r), OmegaQuotientClass(DifferentialForm(r))};
    DifferentialForm w(r);
    for (const auto& p : e.ring_pairs()) {
        // <<a,b>> = <a,b> + <ab,1>: the [ab] terms cancel and d1 = 0
        if (e.flavor() == ArfFlavor::RingPairs) t.primary.add(p.a * p.b);
        w += p.a * delta(p.b);
    }
    t.secondary = OmegaQuotientClass(w);
    return t;
}

std::string to_string(const TotalInvariant& t)
{
    return "(" + to_string(t.primary) + ", " + to_string(t.secondary) + ")";
}

// ---------------------------------------------------------------------------
// The Z^2 x| C_2 example

PolyRingPtr z2c2_coefficient_ring()
{
    static const PolyRingPtr r = make_poly_ring({"X", "Y"}, 2, true);
    return r;
}

PolyRingPtr z2c2_involutive_ring()
{
    static const PolyRingPtr r = make_poly_ring({"X", "Y"}, 2, true, PolyInvolution::InvertVariables);
    return r;
}

Poly bar_variables(const Poly& p)
{
    Poly out(p.ring());
    for (const auto& [e, c] : p.terms()) {
        Monomial f = e;
        for (auto& v : f) v = -v;
        out.add_term(f, c);
    }
    return out;
}

namespace {

std::shared_ptr<const groups::SemidirectZnC2> z2c2_group(const ArfExpression& e)
{
    if (e.flavor() != ArfFlavor::GroupPairs) throw PreconditionError("Z^2 x| C_2: needs a group expression");
    auto g = std::dynamic_pointer_cast<const groups::SemidirectZnC2>(e.group_ptr());
    if (!g || g->rank() != 2) throw PreconditionError("Z^2 x| C_2: expression is not over <X,Y,S>");
    return g;
}

Poly mono(const PolyRingPtr& r, std::int64_t i, std::int64_t j)
{
    return Poly::monomial(r, Monomial{i, j});
}

// (i, j) of X^iY^jS; nullopt for the identity
std::optional<std::pair<std::int64_t, std::int64_t>> reflection_exponents(const groups::SemidirectZnC2& g,
                                                                          const Element& x)
{
    if (g.is_identity(x)) return std::nullopt;
    if (g.sign_bit(x) != 1) throw PreconditionError("Z^2 x| C_2: " + g.format(x) + " is not an involution");
    auto v = g.vec(x);
    return std::make_pair(v[0], v[1]);
}

std::int64_t floor_div2(std::int64_t x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

} // namespace

ArfExpression psi_representation_map(const ArfExpression& e)
{
    auto g = z2c2_group(e);
    const auto& R = z2c2_coefficient_ring();
    ArfExpression out = ArfExpression::ring(R, Poly::constant(R, 1));
    for (const auto& p : e.group_pairs()) {
        auto a = reflection_exponents(*g, p.a);
        auto b = reflection_exponents(*g, p.b);
        if (!a || !b)
            throw PreconditionError("psi: <" + g->format(p.a) + ", " + g->format(p.b) + "> is not of the form <fS, gS>");
        auto [i, j] = *a;
        auto [k, l] = *b;
        out.toggle(mono(R, -i, -j), mono(R, k, l));
        out.toggle(mono(R, i, j), mono(R, -k, -l));
    }
    return out;
}

Z2C2Invariant z2c2_invariant(const ArfExpression& e)
{
    auto g = z2c2_group(e);
    const auto& R = z2c2_coefficient_ring();
    const auto& Ri = z2c2_involutive_ring();
    Z2C2Invariant out{CRClass(Ri), OmegaQuotientClass(DifferentialForm(R))};
    DifferentialForm w(R);
    for (const auto& p : e.group_pairs()) {
        auto a = reflection_exponents(*g, p.a);
        auto b = reflection_exponents(*g, p.b);
        // <x, 1> = <1, 1> = <S, S>
        if (!a || !b) a = b = std::make_pair(0, 0);
        Poly f = mono(R, a->first, a->second), h = mono(R, b->first, b->second);
        out.primary.add((f * bar_variables(h)).change_ring(Ri));
        w += bar_variables(f) * delta(h) + f * delta(bar_variables(h));
    }
    out.secondary = OmegaQuotientClass(w);
    return out;
}

bool z2c2_is_basis(const Z2C2Basis& b)
{
    const bool m_odd = mod2(b.m) == 1, n_odd = mod2(b.n) == 1;
    switch (b.kind) {
    case Z2C2Kind::One: return b.m == 0 && b.n == 0;
    case Z2C2Kind::WithS:
        if (m_odd) return b.m > 0;
        return n_odd && b.n > 0;
    case Z2C2Kind::WithXS: return n_odd && b.n > 0;
    case Z2C2Kind::WithYS: return m_odd && n_odd && b.m > 0;
    }
    return false;
}

std::string to_string(const Z2C2Basis& b)
{
    auto word = [](std::int64_t m, std::int64_t n) {
        std::string s;
        auto part = [&](const char* v, std::int64_t k) {
            if (k == 0) return;
            s += v;
            if (k != 1) s += "^" + std::to_string(k);
        };
        part("X", m);
        part("Y", n);
        return s + "S";
    };
    switch (b.kind) {
    case Z2C2Kind::One: return "<1, 1>";
    case Z2C2Kind::WithS: return "<" + word(b.m, b.n) + ", S>";
    case Z2C2Kind::WithXS: return "<" + word(b.m, b.n) + ", XS>";
    case Z2C2Kind::WithYS: return "<" + word(b.m, b.n) + ", YS>";
    }
    return "?";
}

std::vector<Z2C2Basis> z2c2_normal_form_pair(std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t l)
{
    const std::vector<Z2C2Basis> one{Z2C2Basis{Z2C2Kind::One, 0, 0}};
    auto odd = [](std::int64_t x) { return mod2(x) == 1; };
    // all exponents odd: conjugate to <XYS, X^kY^lS>, then
    // <XYS, X^{2p+1}Y^{2q+1}S> = <XYS, X^{p+1}Y^{q+1}S>
    if (odd(i) && odd(j) && odd(k) && odd(l)) {
        k = k - i + 1;
        l = l - j + 1;
        i = j = 1;
        while (odd(k) && odd(l)) {
            if (k == 1 && l == 1) return one;  // <XYS, XYS> = <XYS, 1> = <1, 1>
            k = (k + 1) / 2;
            l = (l + 1) / 2;
        }
    }
    // conjugation by X^a Y^b moves a component with an even exponent to S, XS
    // or YS; then <a,b> = <b,a> puts it second
    std::int64_t m, n;
    if (!odd(i) || !odd(j)) {
        const std::int64_t a = -floor_div2(i), b = -floor_div2(j);
        i += 2 * a;
        j += 2 * b;
        m = k + 2 * a;
        n = l + 2 * b;
    } else {
        const std::int64_t a = -floor_div2(k), b = -floor_div2(l);
        k += 2 * a;
        l += 2 * b;
        m = i + 2 * a;
        n = j + 2 * b;
        i = k;
        j = l;
    }
    Z2C2Kind kind = i == 0 && j == 0 ? Z2C2Kind::WithS : i == 1 ? Z2C2Kind::WithXS : Z2C2Kind::WithYS;
    for (;;) {
        switch (kind) {
        case Z2C2Kind::WithS:
            if (!odd(m) && !odd(n)) {
                if (m == 0 && n == 0) return one;  // <S, S> = <1, 1>
                m /= 2;  // <X^{2m}Y^{2n}S, S> = <X^mY^nS, S>
                n /= 2;
                continue;
            }
            // <X^mY^nS, S> = <X^-mY^-nS, S>
            if ((odd(m) && m < 0) || (!odd(m) && n < 0)) {
                m = -m;
                n = -n;
            }
            return {Z2C2Basis{kind, m, n}};
        case Z2C2Kind::WithXS:
            if (!odd(n)) {
                if (!odd(m)) {
                    kind = Z2C2Kind::WithS;  // <X^{2m}Y^{2n}S, XS> = <X^{2m-1}Y^{2n}S, S>
                    m -= 1;
                    continue;
                }
                if (m == 1 && n == 0) return one;  // <XS, XS> = <1, 1>
                m = (m + 1) / 2;  // <X^{2m+1}Y^{2n}S, XS> = <X^{m+1}Y^nS, XS>
                n /= 2;
                continue;
            }
            if (n < 0) {
                m = 2 - m;  // <X^mY^nS, XS> = <X^{2-m}Y^-nS, XS>
                n = -n;
            }
            return {Z2C2Basis{kind, m, n}};
        case Z2C2Kind::WithYS:
            if (!odd(n)) {
                if (!odd(m)) {
                    kind = Z2C2Kind::WithS;  // <X^{2m}Y^{2n}S, YS> = <X^{2m}Y^{2n-1}S, S>
                    n -= 1;
                } else {
                    kind = Z2C2Kind::WithXS;  // <X^{2m+1}Y^{2n}S, YS> = <X^-2mY^{-2n+1}S, XS>
                    m = 1 - m;
                    n = 1 - n;
                }
                continue;
            }
            if (!odd(m)) {
                if (m == 0 && n == 1) return one;  // <YS, YS> = <1, 1>
                m /= 2;  // <X^{2m}Y^{2n+1}S, YS> = <X^mY^{n+1}S, YS>
                n = (n + 1) / 2;
                continue;
            }
            if (m < 0) {
                m = -m;  // <X^mY^nS, YS> = <X^-mY^{2-n}S, YS>
                n = 2 - n;
            }
            return {Z2C2Basis{kind, m, n}};
        case Z2C2Kind::One: return one;
        }
    }
}

std::vector<Z2C2Basis> z2c2_normal_form(const ArfExpression& e)
{
    auto g = z2c2_group(e);
    std::set<Z2C2Basis> acc;
    auto toggle = [&](const Z2C2Basis& b) {
        if (!acc.erase(b)) acc.insert(b);
    };
    for (const auto& p : e.group_pairs()) {
        auto a = reflection_exponents(*g, p.a);
        auto b = reflection_exponents(*g, p.b);
        if (!a || !b) {
            toggle(Z2C2Basis{});
            continue;
        }
        for (const auto& x : z2c2_normal_form_pair(a->first, a->second, b->first, b->second)) toggle(x);
    }
    return {acc.begin(), acc.end()};
}

Z2C2Coordinates z2c2_coordinates(const std::vector<Z2C2Basis>& nf)
{
    const auto& R = z2c2_coefficient_ring();
    Z2C2Coordinates c{Poly(R), Poly(R), Poly(R)};
    for (const auto& b : nf) {
        Poly x = mono(R, b.m, b.n);
        switch (b.kind) {
        case Z2C2Kind::One: c.f += Poly::constant(R, 1); break;
        case Z2C2Kind::WithS: c.f += x; break;
        case Z2C2Kind::WithXS: c.g += x; break;
        case Z2C2Kind::WithYS: c.h += x; break;
        }
    }
    return c;
}

DifferentialForm z2c2_constrained_form(const Poly& g, const Poly& h)
{
    const auto& R = z2c2_coefficient_ring();
    Poly X = mono(R, 1, 0), Xi = mono(R, -1, 0), Y = mono(R, 0, 1), Yi = mono(R, 0, -1);
    Poly gg = g.change_ring(R), hh = h.change_ring(R);
    DifferentialForm w(R);
    w.coeff(0) = (gg * Xi + bar_variables(gg) * X) * Xi;
    w.coeff(1) = (hh * Yi + bar_variables(hh) * Y) * Yi;
    return w;
}

QuotientDecision omega_quotient_decide(const DifferentialForm& w0)
{
    const auto& R = z2c2_coefficient_ring();
    if (!w0.ring() || w0.ring()->nvars() != 2 || w0.ring()->characteristic != 2 || !w0.ring()->laurent)
        throw PreconditionError("omega_quotient_decide: needs a form over F_2[X^+-1, Y^+-1]");
    DifferentialForm w(R);
    w.coeff(0) = w0.coeff(0).change_ring(R);
    w.coeff(1) = w0.coeff(1).change_ring(R);
    // (g X^-1 + gbar X) = P, (h Y^-1 + hbar Y) = Q
    Poly P = w.coeff(0) * mono(R, 1, 0), Q = w.coeff(1) * mono(R, 0, 1);
    QuotientDecision d{true, Poly(R), Poly(R), ""};
    for (const auto& [e, c] : P.terms())
        if (e[1] > 0) d.g.add_term(Monomial{e[0] + 1, e[1]}, c);
    for (const auto& [e, c] : Q.terms())
        if (e[0] > 0) d.h.add_term(Monomial{e[0], e[1] + 1}, c);
    if (z2c2_constrained_form(d.g, d.h) != w)
        throw PreconditionError("omega_quotient_decide: form is not of the shape (gX^-1 + gbar X)X^-1 dX + (hY^-1 + hbar Y)Y^-1 dY");
    // g = g_2^2 Y + g_3^2 XY with g_2, g_3 of nonnegative Y-degree; h = h_3^2 XY
    // with h_3 of nonnegative X-degree
    for (const auto& [e, c] : d.g.terms())
        if (mod2(e[1]) != 1 || e[1] < 1)
            throw PreconditionError("omega_quotient_decide: g violates the side conditions at " + format_monomial(*R, e));
    for (const auto& [e, c] : d.h.terms())
        if (mod2(e[0]) != 1 || mod2(e[1]) != 1 || e[0] < 1)
            throw PreconditionError("omega_quotient_decide: h violates the side conditions at " + format_monomial(*R, e));
    // The Frobenius parts of g and h are determined term by term, so the
    // proof's conclusion g_2 = g_3 = h_3 = 0 reads g = h = 0.
    d.zero = d.g.is_zero() && d.h.is_zero();
    if (!d.g.is_zero()) d.witness = "g has the term " + format_monomial(*R, d.g.terms().begin()->first);
    else if (!d.h.is_zero()) d.witness = "h has the term " + format_monomial(*R, d.h.terms().begin()->first);
    return d;
}

Z2C2Comparison z2c2_compare(const ArfExpression& e1, const ArfExpression& e2)
{
    ArfExpression sum = e1 + e2;
    Z2C2Comparison out;
    out.difference = z2c2_normal_form(sum);
    out.invariant = z2c2_invariant(sum);
    const bool nf_zero = out.difference.empty();
    const bool inv_zero = out.invariant.primary.is_zero() && out.invariant.secondary.is_zero();
    // route through the constrained decision on the normal-form coordinates
    auto c = z2c2_coordinates(out.difference);
    Poly f = c.f + c.g * mono(z2c2_coefficient_ring(), -1, 0) + c.h * mono(z2c2_coefficient_ring(), 0, -1);
    auto d = omega_quotient_decide(z2c2_constrained_form(c.g, c.h));
    const bool constrained_zero = d.zero && f.is_zero();
    if (nf_zero != inv_zero || nf_zero != constrained_zero)
        throw Error("z2c2_compare: normal form, invariant and constrained decision disagree");
    out.verdict = nf_zero ? Z2C2Verdict::Equal : Z2C2Verdict::Distinct;
    return out;
}

} // namespace qarf
