#pragma once

#include <utility>

#include "qarf/arf.hpp"
#include "random_elems.hpp"

namespace qarf::testing {

inline const std::vector<groups::Element>& window_involutions(const groups::GroupPtr& g, int window)
{
    static thread_local std::map<std::pair<std::uint32_t, int>, std::vector<groups::Element>> cache;
    auto& v = cache[{g->id(), window}];
    if (v.empty()) v = groups::involutions(*g, window);
    return v;
}

inline const std::vector<groups::Element>& window_elements(const groups::GroupPtr& g, int window)
{
    static thread_local std::map<std::pair<std::uint32_t, int>, std::vector<groups::Element>> cache;
    auto& v = cache[{g->id(), window}];
    if (v.empty()) v = g->window(window);
    return v;
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v)
{
    return v[uniform(rng, 0, static_cast<int>(v.size()) - 1)];
}

inline ArfExpression random_group_expression(Rng& rng, const groups::GroupPtr& g, int pairs = 3, int window = 2)
{
    const auto& inv = window_involutions(g, window);
    ArfExpression e = ArfExpression::group(g);
    int k = uniform(rng, 1, pairs);
    for (int i = 0; i < k; ++i) e.toggle(pick(rng, inv), pick(rng, inv));
    return e;
}

// A random (expression, step) pair where the step applies. Relations whose
// side conditions fail on the drawn pair fall back to Swap.
inline std::pair<ArfExpression, DerivationStep> random_group_step(Rng& rng, ArfExpression e, int window = 2)
{
    using groups::Element;
    const auto& g = *e.group_ptr();
    if (e.empty()) e = random_group_expression(rng, e.group_ptr(), 2, window);
    const auto& inv = window_involutions(e.group_ptr(), window);
    const auto& all = window_elements(e.group_ptr(), window);
    DerivationStep s;
    s.pair = uniform(rng, 0, e.size() - 1);
    s.slot = uniform(rng, 1, 2);
    const Element a = e.group_pairs()[s.pair].a, b = e.group_pairs()[s.pair].b;
    auto commute = [&](const Element& x, const Element& y) { return g.mul(x, y) == g.mul(y, x); };
    switch (uniform(rng, 0, 5)) {
    case 0: s.rel = Relation::Swap; break;
    case 1:
        s.rel = Relation::Conj;
        s.x = pick(rng, all);
        break;
    case 2: {
        s.rel = Relation::Absorb;
        s.forward = uniform(rng, 0, 1) == 0;
        if (!s.forward) {
            const Element& fixed = s.slot == 2 ? a : b;
            const Element& target = s.slot == 2 ? b : a;
            for (const auto& w : inv)
                if (g.mul(g.mul(w, fixed), w) == target) s.witness = w;
            if (!s.witness) s.forward = true;
        }
        break;
    }
    case 3: {
        s.rel = Relation::CentralAbsorb;
        std::vector<Element> cs;
        for (const auto& c : inv)
            if (commute(c, a) && commute(c, b)) cs.push_back(c);
        if (cs.empty()) s.rel = Relation::Swap;
        else s.x = pick(rng, cs);
        break;
    }
    case 4:
        s.rel = Relation::PowerTwo;
        s.k = uniform(rng, 0, 3);
        break;
    default: {
        s.rel = Relation::FiniteOrderCancel;
        const Element z = g.mul(a, b);
        std::vector<std::pair<Element, int>> ws;
        for (const auto& w : inv) {
            if (!g.is_involution(g.mul(w, z))) continue;
            for (int i = -2; i <= 2; ++i)
                if (g.order(g.mul(g.mul(a, w), g.pow(z, i)))) {
                    ws.emplace_back(w, i);
                    break;
                }
        }
        if (ws.empty()) {
            s.rel = Relation::Swap;
        } else {
            auto [w, i] = pick(rng, ws);
            s.witness = w;
            s.k = i;
        }
        break;
    }
    }
    return {e, s};
}

// Element of Λ_1(R): p itself when it lies there, else p - alpha(p)u.
inline Poly random_lambda(Rng& rng, const PolyRingPtr& r, const Poly& u, int terms = 3, int maxexp = 2)
{
    Poly p = random_poly(rng, r, terms, maxexp, 3);
    if ((p + involute(p) * u).is_zero()) return p;
    return p - involute(p) * u;
}

inline ArfExpression random_ring_expression(Rng& rng, const ArfExpression& proto, int pairs = 3)
{
    ArfExpression e = proto.empty_like();
    const auto& r = e.ring_ptr();
    int k = uniform(rng, 1, pairs);
    for (int i = 0; i < k; ++i) {
        Poly a = e.flavor() == ArfFlavor::ReducedPairs ? random_poly(rng, r, 3, 2, 3) : random_lambda(rng, r, e.unit());
        Poly b = e.flavor() == ArfFlavor::ReducedPairs ? random_poly(rng, r, 3, 2, 3) : random_lambda(rng, r, e.unit());
        e.toggle(a, b);
    }
    return e;
}

// Random (expression, step) for the ring flavors. Relations that need a
// special shape first add a suitable pair to the expression.
inline std::pair<ArfExpression, DerivationStep> random_ring_step(Rng& rng, ArfExpression e)
{
    const auto& r = e.ring_ptr();
    const bool reduced = e.flavor() == ArfFlavor::ReducedPairs;
    auto entry = [&] { return reduced ? random_poly(rng, r, 3, 2, 3) : random_lambda(rng, r, e.unit()); };
    auto add_pair = [&](const Poly& a, const Poly& b) -> int {
        e.toggle(a, b);
        const auto& v = e.ring_pairs();
        for (int i = 0; i < static_cast<int>(v.size()); ++i)
            if (v[i].a == a && v[i].b == b) return i;
        return -1;  // the pair cancelled or has a zero entry
    };
    DerivationStep s;
    const int choice = uniform(rng, 0, reduced ? 6 : 5);
    for (int attempt = 0; attempt < 20; ++attempt) {
        s = DerivationStep{};
        s.slot = uniform(rng, 1, 2);
        int idx = -1;
        switch (choice) {
        case 0:
            s.rel = Relation::Swap;
            idx = add_pair(entry(), entry());
            break;
        case 1: {
            s.rel = Relation::Conj;
            s.forward = uniform(rng, 0, 1) == 0;
            Poly x = random_poly(rng, r, 2, 1, 2);
            Poly w = entry();
            Poly nx = x * involute(x);
            s.px = x;
            s.pwitness = w;
            idx = s.forward ? add_pair(entry(), nx * w) : add_pair(nx * w, entry());
            break;
        }
        case 2:
            s.rel = Relation::Absorb;
            s.slot = 2;
            idx = add_pair(entry(), entry());
            break;
        case 3: {
            s.rel = Relation::BilinearSplit;
            s.pwitness = entry();
            idx = add_pair(entry(), entry());
            break;
        }
        case 4: {
            s.rel = Relation::GammaDrop;
            Poly y = random_poly(rng, r, 2, 2, 3);
            Poly g = reduced ? y.scaled(2) : y - involute(y) * e.unit();
            idx = s.slot == 2 ? add_pair(entry(), g) : add_pair(g, entry());
            break;
        }
        case 5: {
            s.rel = Relation::BilinearSplit;
            // merge of <a,b1> + <a,b2>
            Poly a = entry(), b1 = entry(), b2 = entry();
            if (b1 == b2 || add_pair(a, b1) < 0 || add_pair(a, b2) < 0) break;
            s.slot = 2;
            for (int i = 0; i < e.size(); ++i) {
                if (e.ring_pairs()[i].a != a) continue;
                if (e.ring_pairs()[i].b == b1) idx = i;
                if (e.ring_pairs()[i].b == b2) s.pair2 = i;
            }
            if (s.pair2 < 0) idx = -1;
            break;
        }
        default: {
            s.rel = Relation::UnitDrop;
            Poly one = Poly::constant(r, 1);
            idx = s.slot == 2 ? add_pair(entry(), one) : add_pair(one, entry());
            break;
        }
        }
        if (idx >= 0) {
            s.pair = idx;
            return {e, s};
        }
    }
    // fall back to a swap on a fresh pair
    s = DerivationStep{};
    s.rel = Relation::Swap;
    if (e.empty()) e.toggle(Poly::constant(r, 1), Poly::constant(r, 1));
    return {e, s};
}

} // namespace qarf::testing
