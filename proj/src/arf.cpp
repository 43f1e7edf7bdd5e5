#include "qarf/arf.hpp"

#include <algorithm>
#include <cctype>

namespace qarf {

using groups::Element;
using groups::GroupPtr;

namespace {

bool group_pair_less(const GroupPair& x, const GroupPair& y)
{
    if (x.a != y.a) return groups::encoding_less(x.a, y.a);
    return groups::encoding_less(x.b, y.b);
}

bool poly_less(const Poly& x, const Poly& y) { return x.terms() < y.terms(); }

bool ring_pair_less(const RingPair& x, const RingPair& y)
{
    if (x.a != y.a) return poly_less(x.a, y.a);
    return poly_less(x.b, y.b);
}

template <class P, class Less>
void toggle_sorted(std::vector<P>& v, const P& p, Less less)
{
    auto it = std::lower_bound(v.begin(), v.end(), p, less);
    if (it != v.end() && *it == p) v.erase(it);
    else v.insert(it, p);
}

bool in_lambda(const Poly& a, const Poly& u) { return (a + involute(a) * u).is_zero(); }

// x alpha(x); the multiplier of relation 5 in a commutative ring
Poly norm(const Poly& x) { return x * involute(x); }

bool in_two_r(const Poly& a)
{
    const int p = a.ring()->characteristic;
    if (p != 0 && p != 2) return true;  // 2 is a unit
    for (const auto& [m, c] : a.terms())
        if (c % 2 != 0) return false;
    return true;
}

[[noreturn]] void reject(const std::string& rel, const std::string& why)
{
    throw PreconditionError(rel + ": " + why);
}

} // namespace

// ---------------------------------------------------------------------------
// ArfExpression

ArfExpression ArfExpression::group(GroupPtr g)
{
    if (!g) throw PreconditionError("ArfExpression: no group");
    ArfExpression e;
    e.flavor_ = ArfFlavor::GroupPairs;
    e.g_ = std::move(g);
    return e;
}

ArfExpression ArfExpression::ring(PolyRingPtr r, Poly u)
{
    if (!r) throw PreconditionError("ArfExpression: no ring");
    u = u.change_ring(r);
    auto inv = try_inverse(u);
    if (!inv) throw PreconditionError("ArfExpression: u is not a unit");
    if (involute(u) * u != Poly::constant(r, 1)) throw PreconditionError("ArfExpression: u alpha(u) != 1");
    ArfExpression e;
    e.flavor_ = ArfFlavor::RingPairs;
    e.r_ = std::move(r);
    e.u_ = std::move(u);
    return e;
}

ArfExpression ArfExpression::reduced(PolyRingPtr r)
{
    if (!r) throw PreconditionError("ArfExpression: no ring");
    if (r->involution != PolyInvolution::Trivial)
        throw PreconditionError("ArfExpression: reduced pairs need the trivial involution");
    ArfExpression e;
    e.flavor_ = ArfFlavor::ReducedPairs;
    e.u_ = Poly::constant(r, -1);
    e.r_ = std::move(r);
    return e;
}

void ArfExpression::toggle(const Element& a, const Element& b)
{
    if (flavor_ != ArfFlavor::GroupPairs) throw PreconditionError("ArfExpression: group pair in a ring expression");
    g_->validate(a);
    g_->validate(b);
    if (!g_->is_involution(a) || !g_->is_involution(b))
        throw PreconditionError("ArfExpression: <" + g_->format(a) + ", " + g_->format(b) +
                                "> has an entry that is not an involution");
    toggle_sorted(gp_, GroupPair{a, b}, group_pair_less);
}

void ArfExpression::toggle(const Poly& a0, const Poly& b0)
{
    if (flavor_ == ArfFlavor::GroupPairs) throw PreconditionError("ArfExpression: ring pair in a group expression");
    Poly a = a0.change_ring(r_), b = b0.change_ring(r_);
    if (flavor_ == ArfFlavor::RingPairs && (!in_lambda(a, u_) || !in_lambda(b, u_)))
        throw PreconditionError("ArfExpression: <" + to_string(a) + ", " + to_string(b) + "> has an entry outside Lambda_1");
    // <a,0> = <0,b> = 0 by bilinearity
    if (a.is_zero() || b.is_zero()) return;
    toggle_sorted(rp_, RingPair{a, b}, ring_pair_less);
}

void ArfExpression::toggle_lambda(const GAElem& a, const GAElem& b)
{
    if (flavor_ != ArfFlavor::GroupPairs) throw PreconditionError("ArfExpression: group pair in a ring expression");
    if (a != involute(a) || b != involute(b))
        throw PreconditionError("ArfExpression: entry outside Lambda_1(F_2[G])");
    std::vector<Element> ia, ib;
    for (const auto& g : a.terms())
        if (g_->is_involution(g)) ia.push_back(g);
    for (const auto& h : b.terms())
        if (g_->is_involution(h)) ib.push_back(h);
    for (const auto& g : ia)
        for (const auto& h : ib) toggle(g, h);
}

int ArfExpression::size() const
{
    return static_cast<int>(flavor_ == ArfFlavor::GroupPairs ? gp_.size() : rp_.size());
}

bool ArfExpression::compatible(const ArfExpression& o) const
{
    if (flavor_ != o.flavor_) return false;
    if (flavor_ == ArfFlavor::GroupPairs) return g_->id() == o.g_->id();
    return r_ == o.r_ && u_ == o.u_;
}

ArfExpression ArfExpression::empty_like() const
{
    ArfExpression e = *this;
    e.gp_.clear();
    e.rp_.clear();
    return e;
}

ArfExpression& ArfExpression::operator+=(const ArfExpression& o)
{
    if (!compatible(o)) throw PreconditionError("ArfExpression: sum of expressions over different contexts");
    for (const auto& p : o.gp_) toggle_sorted(gp_, p, group_pair_less);
    for (const auto& p : o.rp_) toggle_sorted(rp_, p, ring_pair_less);
    return *this;
}

bool ArfExpression::operator==(const ArfExpression& o) const
{
    return compatible(o) && gp_ == o.gp_ && rp_ == o.rp_;
}

namespace {

std::string open_bracket(const ArfExpression& e) { return e.flavor() == ArfFlavor::ReducedPairs ? "<<" : "<"; }
std::string close_bracket(const ArfExpression& e) { return e.flavor() == ArfFlavor::ReducedPairs ? ">>" : ">"; }

std::string format_pairs(const ArfExpression& e, bool display)
{
    if (e.empty()) return "0";
    std::vector<std::string> parts;
    const std::string o = open_bracket(e), c = close_bracket(e);
    if (e.flavor() == ArfFlavor::GroupPairs) {
        const auto& g = *e.group_ptr();
        for (const auto& p : e.group_pairs()) {
            bool flip = display && groups::encoding_less(p.b, p.a);
            parts.push_back(o + g.format(flip ? p.b : p.a) + ", " + g.format(flip ? p.a : p.b) + c);
        }
    } else {
        for (const auto& p : e.ring_pairs()) {
            bool flip = display && poly_less(p.b, p.a);
            parts.push_back(o + to_string(flip ? p.b : p.a) + ", " + to_string(flip ? p.a : p.b) + c);
        }
    }
    if (display) std::sort(parts.begin(), parts.end());
    std::string out;
    for (const auto& s : parts) out += (out.empty() ? "" : " + ") + s;
    return out;
}

// Splits "<x, y> + <z, w>" into entry strings. Commas and closing brackets
// inside parentheses are skipped.
std::vector<std::pair<std::string, std::string>> split_pairs(std::string_view text, bool doubled)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto fail = [&](const std::string& msg) -> void {
        throw ParseError("expression '" + std::string(text) + "' at " + std::to_string(i) + ": " + msg);
    };
    skip();
    if (text.substr(i) == "0") return out;
    auto trimmed = [](std::string_view s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return std::string(s.substr(a, b - a));
    };
    const int width = doubled ? 2 : 1;
    for (;;) {
        skip();
        for (int k = 0; k < width; ++k) {
            if (i >= text.size() || text[i] != '<') fail("expected '<'");
            ++i;
        }
        std::string entries[2];
        for (int slot = 0; slot < 2; ++slot) {
            std::size_t start = i;
            int depth = 0;
            const char stop = slot == 0 ? ',' : '>';
            while (i < text.size()) {
                char ch = text[i];
                if (ch == '(' || ch == '{') ++depth;
                else if (ch == ')' || ch == '}') --depth;
                else if (depth == 0 && ch == stop) break;
                ++i;
            }
            if (i >= text.size()) fail(std::string("expected '") + stop + "'");
            entries[slot] = trimmed(text.substr(start, i - start));
            if (entries[slot].empty()) fail("empty entry");
            if (slot == 0) ++i;
        }
        for (int k = 0; k < width; ++k) {
            if (i >= text.size() || text[i] != '>') fail("expected '>'");
            ++i;
        }
        out.emplace_back(entries[0], entries[1]);
        skip();
        if (i == text.size()) break;
        if (text[i] != '+') fail("expected '+'");
        ++i;
    }
    return out;
}

} // namespace

std::string to_string(const ArfExpression& e) { return format_pairs(e, false); }
std::string to_display_string(const ArfExpression& e) { return format_pairs(e, true); }

ArfExpression parse_group_expression(const GroupPtr& g, std::string_view text)
{
    ArfExpression e = ArfExpression::group(g);
    for (const auto& [a, b] : split_pairs(text, false)) e.toggle(g->parse(a), g->parse(b));
    return e;
}

ArfExpression parse_ring_expression(const PolyRingPtr& r, const Poly& u, std::string_view text)
{
    ArfExpression e = ArfExpression::ring(r, u);
    for (const auto& [a, b] : split_pairs(text, false)) e.toggle(parse_poly(r, a), parse_poly(r, b));
    return e;
}

ArfExpression parse_reduced_expression(const PolyRingPtr& r, std::string_view text)
{
    ArfExpression e = ArfExpression::reduced(r);
    for (const auto& [a, b] : split_pairs(text, true)) e.toggle(parse_poly(r, a), parse_poly(r, b));
    return e;
}

// ---------------------------------------------------------------------------
// Relations

std::string relation_name(Relation r)
{
    switch (r) {
    case Relation::Swap: return "Swap";
    case Relation::Conj: return "Conj";
    case Relation::Absorb: return "Absorb";
    case Relation::CentralAbsorb: return "CentralAbsorb";
    case Relation::PowerTwo: return "PowerTwo";
    case Relation::FiniteOrderCancel: return "FiniteOrderCancel";
    case Relation::BilinearSplit: return "BilinearSplit";
    case Relation::GammaDrop: return "GammaDrop";
    case Relation::UnitDrop: return "UnitDrop";
    }
    return "?";
}

Relation relation_from_name(std::string_view name)
{
    for (Relation r : {Relation::Swap, Relation::Conj, Relation::Absorb, Relation::CentralAbsorb, Relation::PowerTwo,
                       Relation::FiniteOrderCancel, Relation::BilinearSplit, Relation::GammaDrop, Relation::UnitDrop})
        if (relation_name(r) == name) return r;
    throw ParseError("unknown relation '" + std::string(name) + "'");
}

namespace {

ArfExpression apply_group_step(const ArfExpression& e, const DerivationStep& s)
{
    const std::string rel = relation_name(s.rel);
    const auto& g = *e.group_ptr();
    const auto& pairs = e.group_pairs();
    if (s.pair < 0 || s.pair >= static_cast<int>(pairs.size())) reject(rel, "pair index out of range");
    if (s.slot != 1 && s.slot != 2) reject(rel, "slot must be 1 or 2");
    const Element a = pairs[s.pair].a, b = pairs[s.pair].b;
    ArfExpression out = e;
    out.toggle(a, b);
    auto need = [&](const std::optional<Element>& v, const char* what) -> Element {
        if (!v) reject(rel, std::string("missing ") + what);
        g.validate(*v);
        return *v;
    };
    auto commute = [&](const Element& x, const Element& y) { return g.mul(x, y) == g.mul(y, x); };

    switch (s.rel) {
    case Relation::Swap:
        out.toggle(b, a);
        break;
    case Relation::Conj: {
        Element x = need(s.x, "conjugator");
        out.toggle(g.conj(x, a), g.conj(x, b));
        break;
    }
    case Relation::Absorb: {
        if (s.forward) {
            if (s.slot == 2) out.toggle(a, g.mul(g.mul(b, a), b));
            else out.toggle(g.mul(g.mul(a, b), a), b);
        } else {
            Element w = need(s.witness, "witness");
            if (!g.is_involution(w)) reject(rel, "witness is not an involution");
            if (s.slot == 2) {
                if (g.mul(g.mul(w, a), w) != b) reject(rel, "witness w does not satisfy w a w = b");
                out.toggle(a, w);
            } else {
                if (g.mul(g.mul(w, b), w) != a) reject(rel, "witness w does not satisfy w b w = a");
                out.toggle(w, b);
            }
        }
        break;
    }
    case Relation::CentralAbsorb: {
        Element c = need(s.x, "central element");
        if (!g.is_involution(c)) reject(rel, "c is not an involution");
        if (!commute(c, a) || !commute(c, b)) reject(rel, "c does not commute with both entries");
        if (s.slot == 2) out.toggle(a, g.mul(b, c));
        else out.toggle(g.mul(a, c), b);
        break;
    }
    case Relation::PowerTwo: {
        if (s.k < 0 || s.k > 40) reject(rel, "exponent k out of range");
        const std::int64_t m = std::int64_t{1} << s.k;
        if (s.forward) {
            Element ab = g.mul(a, b);
            if (s.slot == 2) out.toggle(a, g.mul(a, g.pow(ab, m)));
            else out.toggle(b, g.mul(b, g.pow(ab, m)));
        } else {
            // pair is <a, c> (slot 2) or <b, c> (slot 1); the witness is the
            // missing entry
            Element w = need(s.witness, "witness");
            if (!g.is_involution(w)) reject(rel, "witness is not an involution");
            if (s.slot == 2) {
                if (g.mul(a, g.pow(g.mul(a, w), m)) != b) reject(rel, "witness w does not satisfy a(aw)^{2^k} = c");
                out.toggle(a, w);
            } else {
                if (g.mul(a, g.pow(g.mul(w, a), m)) != b) reject(rel, "witness w does not satisfy b(wb)^{2^k} = c");
                out.toggle(w, a);
            }
        }
        break;
    }
    case Relation::FiniteOrderCancel: {
        const Element z = g.mul(a, b);
        auto finite = [&](const Element& p) {
            Element t = g.mul(g.mul(a, p), g.pow(z, s.k));
            return g.order(t).has_value();
        };
        if (s.pair2 >= 0) {
            if (s.pair2 >= static_cast<int>(pairs.size()) || s.pair2 == s.pair)
                reject(rel, "second pair index out of range");
            const Element c = pairs[s.pair2].a, d = pairs[s.pair2].b;
            if (g.mul(c, d) != z) reject(rel, "the two pairs do not share z");
            if (!finite(c)) reject(rel, "a b z^i does not have finite order");
            out.toggle(c, d);
        } else {
            Element w = need(s.witness, "witness");
            if (!g.is_involution(w) || !g.is_involution(g.mul(w, z)))
                reject(rel, "witness b or bz is not an involution");
            if (!finite(w)) reject(rel, "a b z^i does not have finite order");
            out.toggle(w, g.mul(w, z));
        }
        break;
    }
    default:
        reject(rel, "not a relation of the group flavor");
    }
    return out;
}

ArfExpression apply_ring_step(const ArfExpression& e, const DerivationStep& s)
{
    const std::string rel = relation_name(s.rel);
    const bool reduced = e.flavor() == ArfFlavor::ReducedPairs;
    const auto& pairs = e.ring_pairs();
    const auto& r = e.ring_ptr();
    if (s.pair < 0 || s.pair >= static_cast<int>(pairs.size())) reject(rel, "pair index out of range");
    if (s.slot != 1 && s.slot != 2) reject(rel, "slot must be 1 or 2");
    const Poly a = pairs[s.pair].a, b = pairs[s.pair].b;
    ArfExpression out = e;
    out.toggle(a, b);
    auto need = [&](const std::optional<Poly>& v, const char* what) -> Poly {
        if (!v) reject(rel, std::string("missing ") + what);
        return v->change_ring(r);
    };

    switch (s.rel) {
    case Relation::Swap:
        // u a u^-1 = a in a commutative ring
        out.toggle(b, a);
        break;
    case Relation::Conj: {
        Poly nx = norm(need(s.px, "x"));
        Poly w = need(s.pwitness, "witness");
        if (s.forward) {
            // <a, N(x) w> -> <N(x) a, w>
            if (nx * w != b) reject(rel, "second entry is not x alpha(x) times the witness");
            out.toggle(nx * a, w);
        } else {
            // <N(x) w, b> -> <w, N(x) b>
            if (nx * w != a) reject(rel, "first entry is not x alpha(x) times the witness");
            out.toggle(w, nx * b);
        }
        break;
    }
    case Relation::Absorb: {
        // <a,b> = <a, a b alpha(b)>
        if (s.slot != 2) reject(rel, "only slot 2 is available for ring pairs");
        if (s.forward) {
            out.toggle(a, a * norm(b));
        } else {
            Poly w = need(s.pwitness, "witness");
            if (a * norm(w) != b) reject(rel, "witness w does not satisfy a w alpha(w) = b");
            out.toggle(a, w);
        }
        break;
    }
    case Relation::BilinearSplit: {
        if (s.pair2 >= 0) {
            if (s.pair2 >= static_cast<int>(pairs.size()) || s.pair2 == s.pair)
                reject(rel, "second pair index out of range");
            const Poly c = pairs[s.pair2].a, d = pairs[s.pair2].b;
            out.toggle(c, d);
            if (s.slot == 2) {
                if (a != c) reject(rel, "first entries differ");
                out.toggle(a, b + d);
            } else {
                if (b != d) reject(rel, "second entries differ");
                out.toggle(a + c, b);
            }
        } else {
            Poly w = need(s.pwitness, "witness");
            if (s.slot == 2) {
                out.toggle(a, w);
                out.toggle(a, b - w);
            } else {
                out.toggle(w, b);
                out.toggle(a - w, b);
            }
        }
        break;
    }
    case Relation::GammaDrop: {
        const Poly& x = s.slot == 2 ? b : a;
        if (reduced) {
            if (!in_two_r(x)) reject(rel, "entry is not in 2R");
        } else {
            Poly w(r);
            if (!gamma_reduce_entry(x, e.unit(), &w).is_zero()) reject(rel, "entry is not in Gamma_1");
        }
        break;
    }
    case Relation::UnitDrop: {
        if (!reduced) reject(rel, "only for reduced pairs");
        const Poly& x = s.slot == 2 ? b : a;
        if (x != Poly::constant(r, 1)) reject(rel, "entry is not 1");
        break;
    }
    default:
        reject(rel, "not a relation of the ring flavors");
    }
    return out;
}

} // namespace

ArfExpression apply_step(const ArfExpression& e, const DerivationStep& s)
{
    if (e.flavor() == ArfFlavor::GroupPairs) return apply_group_step(e, s);
    return apply_ring_step(e, s);
}

std::string to_string(const DerivationStep& s, const ArfExpression& ctx)
{
    std::string out = relation_name(s.rel) + " pair " + std::to_string(s.pair);
    if (s.pair2 >= 0) out += "+" + std::to_string(s.pair2);
    switch (s.rel) {
    case Relation::Absorb:
    case Relation::PowerTwo:
    case Relation::CentralAbsorb:
    case Relation::BilinearSplit:
    case Relation::GammaDrop:
    case Relation::UnitDrop:
        out += " slot " + std::to_string(s.slot);
        break;
    default:
        break;
    }
    if (s.rel == Relation::Absorb || s.rel == Relation::PowerTwo || s.rel == Relation::Conj)
        out += s.forward ? " forward" : " backward";
    if (s.rel == Relation::PowerTwo || s.rel == Relation::FiniteOrderCancel) out += " k=" + std::to_string(s.k);
    if (ctx.flavor() == ArfFlavor::GroupPairs) {
        const auto& g = *ctx.group_ptr();
        if (s.x) out += " x=" + g.format(*s.x);
        if (s.witness) out += " w=" + g.format(*s.witness);
    } else {
        if (s.px) out += " x=" + to_string(*s.px);
        if (s.pwitness) out += " w=" + to_string(*s.pwitness);
    }
    return out;
}

DerivationResult check_derivation(const ArfExpression& start, const std::vector<DerivationStep>& steps,
                                  const ArfExpression& target)
{
    DerivationResult res;
    if (!start.compatible(target)) {
        res.failed_step = static_cast<int>(steps.size());
        res.message = "start and target live in different Arf groups";
        return res;
    }
    ArfExpression cur = start;
    res.transcript.push_back(to_display_string(cur));
    for (std::size_t i = 0; i < steps.size(); ++i) {
        try {
            cur = apply_step(cur, steps[i]);
        } catch (const Error& err) {
            res.failed_step = static_cast<int>(i);
            res.message = "step " + std::to_string(i) + " (" + to_string(steps[i], cur) + ") rejected: " + err.what();
            return res;
        }
        res.transcript.push_back(to_display_string(cur));
    }
    if (cur != target) {
        res.failed_step = static_cast<int>(steps.size());
        res.message = "derivation ends at " + to_display_string(cur) + ", not at " + to_display_string(target);
        return res;
    }
    res.ok = true;
    return res;
}

// ---------------------------------------------------------------------------
// Relation 7

namespace {

template <class E>
void check_form_preserving(const Matrix<E>& m, const E& u)
{
    if (!m.square() || m.rows() % 2) throw PreconditionError("gq_relation_instance: shape must be 2n x 2n");
    if (t_alpha_u(m, u) * m != Matrix<E>::identity(m.rows(), m.proto()))
        throw PreconditionError("gq_relation_instance: t(M) is not the inverse of M");
}

template <class E>
std::pair<Matrix<E>, Matrix<E>> relation7_products(const Matrix<E>& m)
{
    const int n = m.rows() / 2;
    Matrix<E> x = m.block(0, 0, n, n), y = m.block(0, n, n, n);
    Matrix<E> z = m.block(n, 0, n, n), t = m.block(n, n, n, n);
    return {alpha(x) * z, alpha(y) * t};
}

} // namespace

ArfExpression gq_relation_instance(const Matrix<GAElem>& m, const GAElem& u)
{
    const auto& g = m.proto().group();
    if (!g) throw PreconditionError("gq_relation_instance: matrix without a group");
    if (u != GAElem::one(g)) throw PreconditionError("gq_relation_instance: the group flavor needs u = 1");
    check_form_preserving(m, u);
    auto [xz, yt] = relation7_products(m);
    ArfExpression e = ArfExpression::group(g);
    for (int i = 0; i < xz.rows(); ++i) e.toggle_lambda(xz(i, i), yt(i, i));
    return e;
}

ArfExpression gq_relation_instance(const Matrix<Poly>& m, const Poly& u)
{
    const auto& r = m.proto().ring();
    if (!r) throw PreconditionError("gq_relation_instance: matrix without a ring");
    check_form_preserving(m, u);
    auto [xz, yt] = relation7_products(m);
    ArfExpression e = ArfExpression::ring(r, u);
    for (int i = 0; i < xz.rows(); ++i) e.toggle(xz(i, i), yt(i, i));
    return e;
}

} // namespace qarf
