#pragma once

#include <random>

#include "qarf/rings.hpp"

namespace qarf::testing {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Sparse element of F_2[G] drawn from a window of the group.
inline GAElem random_ga(Rng& rng, const groups::GroupPtr& g, int terms = 3, int window = 2)
{
    static thread_local std::map<std::pair<std::uint32_t, int>, std::vector<groups::Element>> cache;
    auto& elems = cache[{g->id(), window}];
    if (elems.empty()) elems = g->window(window);
    GAElem x(g);
    int k = uniform(rng, 0, terms);
    for (int i = 0; i < k; ++i) x.toggle(elems[uniform(rng, 0, static_cast<int>(elems.size()) - 1)]);
    return x;
}

// Polynomial with small exponents and coefficients.
inline Poly random_poly(Rng& rng, const PolyRingPtr& r, int terms = 3, int maxexp = 3, int maxcoef = 3)
{
    Poly p(r);
    int k = uniform(rng, 0, terms);
    for (int i = 0; i < k; ++i) {
        Monomial e(r->nvars());
        for (auto& x : e) x = uniform(rng, r->laurent ? -maxexp : 0, maxexp);
        p.add_term(e, uniform(rng, -maxcoef, maxcoef));
    }
    return p;
}

template <class E, class Gen>
Truncated<E> random_truncated(int n, const E& proto, Gen gen)
{
    std::vector<E> c;
    for (int k = 0; k <= n; ++k) c.push_back(gen());
    (void)proto;
    return Truncated<E>(std::move(c));
}

template <class E, class Gen>
Matrix<E> random_matrix(int r, int c, const E& proto, Gen gen)
{
    Matrix<E> m(r, c, proto);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = gen();
    return m;
}

} // namespace qarf::testing
