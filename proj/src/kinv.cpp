#include "qarf/kinv.hpp"

#include "qarf/linalg.hpp"

namespace qarf {

using groups::Element;

// ---------------------------------------------------------------------------
// K(G)

void KGClass::toggle(const Element& x)
{
    if (!g_) throw PreconditionError("KGClass: no group");
    Element c = g_->cl_canonical(x);
    auto it = reps_.find(c);
    if (it != reps_.end()) reps_.erase(it);
    else reps_.insert(c);
}

KGClass& KGClass::operator+=(const KGClass& o)
{
    if (!g_) g_ = o.g_;
    if (o.g_ && g_->id() != o.g_->id()) throw PreconditionError("KGClass: different groups");
    for (const auto& x : o.reps_) {
        auto it = reps_.find(x);
        if (it != reps_.end()) reps_.erase(it);
        else reps_.insert(x);
    }
    return *this;
}

std::string to_string(const KGClass& c)
{
    if (c.is_zero()) return "0";
    std::string out;
    for (const auto& x : c.reps()) out += (out.empty() ? "[" : " + [") + c.group()->format(x) + "]";
    return out;
}

// ---------------------------------------------------------------------------
// R/kappa(R)

std::optional<Monomial> cr_canonical(const PolyRing& r, const Monomial& m)
{
    if (r.characteristic % 2 == 1) return std::nullopt;
    for (int i = 0; i < r.nvars(); ++i)
        if (!r.nil.empty() && r.nil[i] > 0 && m[i] > 0) return std::nullopt;
    Monomial e = m;
    bool nonzero = false;
    for (auto v : e) nonzero |= v != 0;
    if (!nonzero) return e;
    for (;;) {
        bool even = true;
        for (auto v : e) even &= v % 2 == 0;
        if (!even) break;
        for (auto& v : e) v /= 2;
    }
    if (r.involution == PolyInvolution::InvertVariables) {
        for (auto v : e) {
            if (v == 0) continue;
            if (v < 0)
                for (auto& w : e) w = -w;
            break;
        }
    }
    return e;
}

void CRClass::toggle_monomial(const Monomial& m)
{
    if (!r_) throw PreconditionError("CRClass: no ring");
    auto c = cr_canonical(*r_, m);
    if (!c) return;
    auto it = reps_.find(*c);
    if (it != reps_.end()) reps_.erase(it);
    else reps_.insert(*c);
}

void CRClass::add(const Poly& p)
{
    if (!r_) r_ = p.ring();
    for (const auto& [m, c] : p.terms())
        if (c % 2 != 0) toggle_monomial(m);
}

CRClass& CRClass::operator+=(const CRClass& o)
{
    if (!r_) r_ = o.r_;
    for (const auto& m : o.reps_) {
        auto it = reps_.find(m);
        if (it != reps_.end()) reps_.erase(it);
        else reps_.insert(m);
    }
    return *this;
}

Poly CRClass::representative() const
{
    Poly p(r_);
    for (const auto& m : reps_) p.add_term(m, 1);
    return p;
}

CRClass cr_class(const Poly& p)
{
    CRClass c(p.ring());
    c.add(p);
    return c;
}

std::string to_string(const CRClass& c)
{
    if (c.is_zero()) return "0";
    std::string out;
    for (const auto& m : c.reps()) {
        std::string f = format_monomial(*c.ring(), m);
        out += (out.empty() ? "[" : " + [") + (f.empty() ? "1" : f) + "]";
    }
    return out;
}

CReduction c_reduce(const Poly& p)
{
    const auto& r = p.ring();
    if (r->involution != PolyInvolution::Trivial) throw PreconditionError("c_reduce: needs the trivial involution");
    CReduction out{Poly(r), Poly(r), Poly(r)};
    const int ch = r->characteristic;
    if (ch % 2 == 1) {
        out.x = p.scaled((ch + 1) / 2);
        return out;
    }
    auto residual = [&] { return p - out.x.scaled(2) - (out.y + out.y * out.y); };
    for (;;) {
        Poly rest = residual();
        if (ch == 0) {
            Poly half(r);
            rest.mod2_split(&half);
            out.x += half;
            rest = residual();
        }
        std::optional<Monomial> bad;
        for (const auto& [m, c] : rest.terms()) {
            auto can = cr_canonical(*r, m);
            if (!can || *can != m) {
                bad = m;
                break;
            }
        }
        if (!bad) {
            out.rest = rest;
            return out;
        }
        // m = r0^{2^j} with r0 canonical: y' = sum_{i<j} r0^{2^i}, so that
        // y' + y'^2 = r0 + m mod 2. A monomial in a nilpotent variable uses
        // its own powers until they vanish.
        auto can = cr_canonical(*r, *bad);
        Poly step(r);
        if (!can) {
            Poly t = Poly::monomial(r, *bad);
            while (!t.is_zero()) {
                step += t;
                t = t * t;
            }
        } else {
            Poly t = Poly::monomial(r, *can);
            Poly target = Poly::monomial(r, *bad);
            while (t != target) {
                step += t;
                t = t * t;
            }
        }
        out.y += step;
    }
}

// ---------------------------------------------------------------------------
// omega

KGClass omega_group(const ArfExpression& e)
{
    if (e.flavor() != ArfFlavor::GroupPairs) throw PreconditionError("omega_group: not a group expression");
    const auto& g = *e.group_ptr();
    KGClass c(e.group_ptr());
    // Tr(alpha(a) b) = a^-1 b = ab for an involution a
    for (const auto& p : e.group_pairs()) c.toggle(g.mul(p.a, p.b));
    return c;
}

CRClass omega_ring(const ArfExpression& e)
{
    if (e.flavor() == ArfFlavor::GroupPairs) throw PreconditionError("omega_ring: not a ring expression");
    CRClass c(e.ring_ptr());
    for (const auto& p : e.ring_pairs()) {
        c.add(involute(p.a) * p.b);
        // <<a,b>> = <a,b> + <ab,1>
        if (e.flavor() == ArfFlavor::ReducedPairs) c.add(involute(p.a * p.b));
    }
    return c;
}

OmegaValue omega(const ArfExpression& e)
{
    if (e.flavor() == ArfFlavor::GroupPairs) return omega_group(e);
    return omega_ring(e);
}

std::string to_string(const OmegaValue& v)
{
    return std::visit([](const auto& c) { return to_string(c); }, v);
}

bool operator==(const OmegaValue& a, const OmegaValue& b)
{
    if (a.index() != b.index()) return false;
    if (a.index() == 0) return std::get<0>(a) == std::get<0>(b);
    return std::get<1>(a) == std::get<1>(b);
}

// ---------------------------------------------------------------------------
// omega_1, lambda, mu

namespace {

using TP = Truncated<Poly>;

TP one_plus_over(const Poly& c, int n)
{
    // 1 + c T^2/(1+T) = 1 + c T^2 - c T^3 + ...
    TP f = TP::constant(n, Poly::constant(c.ring(), 1));
    for (int k = 2; k <= n; ++k) f[k] = k % 2 == 0 ? c : -c;
    return f;
}

void check_context(const PolyRingPtr& r, int n, const char* who)
{
    if (r->involution != PolyInvolution::Trivial)
        throw PreconditionError(std::string(who) + ": needs the trivial involution on R");
    if (n < 2 || n % 2 != 0) throw PreconditionError(std::string(who) + ": n must be even and at least 2");
}

} // namespace

bool in_cycles(const TP& f)
{
    const auto& r = f[0].ring();
    if (f[0] != Poly::constant(r, 1)) return false;
    return involute(f) == f;
}

UnitClass omega1(const ArfExpression& e, int n)
{
    if (e.flavor() == ArfFlavor::GroupPairs) throw PreconditionError("omega1: needs a commutative ring expression");
    if (n < 2) throw PreconditionError("omega1: n must be at least 2");
    const auto& r = e.ring_ptr();
    TP f = TP::constant(n, Poly::constant(r, 1));
    for (const auto& p : e.ring_pairs()) {
        f = f * one_plus_over(involute(p.a) * p.b, n);
        if (e.flavor() == ArfFlavor::ReducedPairs) f = f * one_plus_over(involute(p.a * p.b), n);
    }
    return UnitClass{f};
}

CRClass lambda(const UnitClass& f)
{
    const auto& r = f.rep[0].ring();
    check_context(r, f.degree(), "lambda");
    if (!in_cycles(f.rep)) throw PreconditionError("lambda: representative is not in Z");
    const Poly& b = f.rep[2];
    return cr_class(b * involute(b));
}

UnitClass mu(const CRClass& z, int n)
{
    check_context(z.ring(), n, "mu");
    return UnitClass{one_plus_over(z.representative(), n)};
}

std::optional<TP> norm_certificate(const TP& h)
{
    const int n = h.degree();
    const auto& r = h[0].ring();
    check_context(r, n, "norm_certificate");
    if (!in_cycles(h)) throw PreconditionError("norm_certificate: not in Z");
    const Poly one = Poly::constant(r, 1);
    TP cur = h;
    TP total = TP::constant(n, one);
    auto apply = [&](const TP& g) {
        cur = cur * g * involute(g);
        total = total * g;
    };
    // degree 2: h = 1 + bT^2 mod T^3 with b = 2x + y + y^2
    auto red = c_reduce(cur[2]);
    if (!red.rest.is_zero()) return std::nullopt;
    {
        TP g = TP::constant(n, one);
        g[1] = red.y;
        g[2] = -(red.x + red.y);
        apply(g);
    }
    // h = 1 + aT^{2k+1} + bT^{2k+2} mod T^{2k+3}
    for (int k = 1; 2 * k + 1 <= n; ++k) {
        const Poly a = cur[2 * k + 1];
        const Poly b = 2 * k + 2 <= n ? cur[2 * k + 2] : Poly(r);
        TP g = TP::constant(n, one);
        g[2 * k + 1] = b + a.scaled(k);
        if (2 * k + 2 <= n) g[2 * k + 2] = -b.scaled(k + 1);
        apply(g);
    }
    if (cur != TP::constant(n, one)) throw Error("norm_certificate: induction did not terminate at 1");
    return total;
}

bool unit_classes_equal(const UnitClass& f, const UnitClass& g)
{
    return norm_certificate(f.rep * truncated_inverse(g.rep)).has_value();
}

// ---------------------------------------------------------------------------
// Coker(delta) for group rings

H0Cokernel group_ring_h0_cokernel(const groups::FiniteGroupPtr& g)
{
    const auto& classes = g->conj_classes();
    std::vector<int> col(classes.size(), -1);
    H0Cokernel out;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        int rep = classes[c].front();
        if (g->conj_class_of(g->inv_index(rep)) == static_cast<int>(c)) {
            col[c] = static_cast<int>(out.self_inverse_classes.size());
            out.self_inverse_classes.push_back(g->element(rep));
        }
    }
    const int n = static_cast<int>(out.self_inverse_classes.size());
    linalg::F2Subspace rel(n);
    for (const auto& x : out.self_inverse_classes) {
        int i = g->index(x);
        linalg::BitVec v(n);
        v.flip(col[g->conj_class_of(i)]);
        v.flip(col[g->conj_class_of(g->mul_index(i, i))]);
        rel.insert(v);
    }
    linalg::F2Quotient q(rel);
    out.dimension = q.dim();
    for (int i = 0; i < q.dim(); ++i) out.basis.push_back(out.self_inverse_classes[q.free_column(i)]);
    return out;
}

} // namespace qarf
