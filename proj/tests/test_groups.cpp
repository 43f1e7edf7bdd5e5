#include "doctest.h"

#include <random>
#include <set>

#include "qarf/group_library.hpp"

using namespace qarf;
using namespace qarf::groups;

namespace {

// Union-find closure of cl on a window: g ~ g^-1, g ~ x g x^-1, g ~ g^2.
std::map<Element, Element, ElementLess> window_closure(const Group& g, int bound)
{
    auto elems = g.window(bound);
    std::map<Element, Element, ElementLess> parent;
    for (const auto& x : elems) parent[x] = x;
    std::function<Element(const Element&)> find = [&](const Element& x) -> Element {
        Element r = x;
        while (parent.at(r) != r) r = parent.at(r);
        return r;
    };
    auto unite = [&](const Element& a, const Element& b) {
        if (!parent.count(b)) return;
        Element ra = find(a), rb = find(b);
        if (ra == rb) return;
        if (encoding_less(ra, rb)) parent[rb] = ra;
        else parent[ra] = rb;
    };
    std::vector<Element> conj;
    for (const auto& x : g.generator_elements()) {
        conj.push_back(x);
        conj.push_back(g.inv(x));
    }
    for (const auto& x : elems) {
        unite(x, g.inv(x));
        unite(x, g.mul(x, x));
        for (const auto& c : conj) unite(x, g.conj(c, x));
    }
    std::map<Element, Element, ElementLess> out;
    for (const auto& x : elems) out[x] = find(x);
    return out;
}

struct Signature {
    std::int64_t n;
    bool abelian;
    std::map<std::int64_t, int> orders;
    int center;
    std::map<std::int64_t, int> center_orders;
    std::multiset<int> root_counts;
    bool operator==(const Signature&) const = default;
};

Signature signature(const FiniteGroup& g)
{
    Signature s{g.n(), true, {}, 0, {}, {}};
    std::vector<int> roots(g.n(), 0);
    for (int a = 0; a < g.n(); ++a) ++roots[g.mul_index(a, a)];
    s.root_counts.insert(roots.begin(), roots.end());
    for (int a = 0; a < g.n(); ++a) {
        ++s.orders[*g.order(g.element(a))];
        bool central = true;
        for (int b = 0; b < g.n(); ++b)
            if (g.mul_index(a, b) != g.mul_index(b, a)) central = false;
        s.center += central;
        if (central) ++s.center_orders[*g.order(g.element(a))];
        s.abelian = s.abelian && central;
    }
    return s;
}

} // namespace

TEST_CASE("order-24 example has two cl classes")
{
    auto g = order24_example();
    CHECK(g->n() == 24);
    auto cls = cl_classes(*g, 0);
    REQUIRE(cls.size() == 2);
    CHECK(g->format(cls[0].rep) == "1");
    CHECK(g->format(cls[1].rep) == "X");
    CHECK(g->parse("SXS") == g->parse("X^5"));
}

TEST_CASE("small group library")
{
    auto lib = small_groups();
    REQUIRE(lib.size() == 42);
    std::map<int, int> count;
    for (const auto& g : lib) ++count[g->n()];
    CHECK(count[8] == 5);
    CHECK(count[12] == 5);
    CHECK(count[16] == 14);
    for (std::size_t i = 0; i < lib.size(); ++i)
        for (std::size_t j = i + 1; j < lib.size(); ++j) {
            if (lib[i]->n() != lib[j]->n()) continue;
            auto si = signature(*lib[i]), sj = signature(*lib[j]);
            INFO(lib[i]->name() << " vs " << lib[j]->name());
            CHECK_FALSE(si == sj);
        }
}

TEST_CASE("finite group tables are validated")
{
    CHECK_THROWS_AS(FiniteGroup::from_table("bad", {0, 1, 1, 1}, {}, {}), PreconditionError);
    CHECK_THROWS_AS(FiniteGroup::from_table("bad", {0, 1, 2}, {}, {}), PreconditionError);
    auto c3 = cyclic(3);
    auto z = z2_semidirect_c2();
    CHECK_THROWS_AS(c3->mul(c3->identity(), z->identity()), PreconditionError);
}

TEST_CASE("word parsing round trip")
{
    auto g = c2_ltimes_c_c12();
    for (const char* w : {"X^2*Y^3*S", "X^-1*Y^5", "S", "1", "X^4"}) CHECK(g->format(g->parse(w)) == w);
    CHECK(g->parse("SX^2Y^2") == g->mul(g->parse("S"), g->parse("X^2*Y^2")));
    CHECK_THROWS_AS(g->parse("Q"), ParseError);
    CHECK_THROWS_AS(g->parse("(X"), ParseError);
    CHECK_THROWS_AS(g->parse("X^"), ParseError);
}

TEST_CASE("example presentations hold")
{
    auto g = c2_ltimes_c_c12();
    CHECK(g->is_identity(g->parse("S^2")));
    CHECK(g->is_identity(g->parse("(XS)^2")));
    CHECK(g->is_identity(g->parse("Y^12")));
    CHECK(g->parse("SYS") == g->parse("Y^5"));
    CHECK(g->parse("XY") == g->parse("YX"));

    auto d = d4_extension();
    CHECK(d->is_identity(d->parse("S^2")));
    CHECK(d->is_identity(d->parse("(YS)^4")));
    CHECK(d->is_identity(d->parse("(Y^2S)^2")));
    Element c = d->parse("(YS)^2");
    CHECK(!d->is_identity(c));
    for (const auto& x : d->generator_elements()) CHECK(d->mul(x, c) == d->mul(c, x));
    // involutions: Y^{2i}S, (YS)^2, Y^{2i}S(YS)^2
    for (const auto& x : involutions(*d, 9)) {
        if (d->is_identity(x) || x == c) continue;
        CHECK(d->refl(x) == 1);
        CHECK(d->rot(x) % 2 == 0);
    }
    CHECK(!d->order(d->parse("Y")).has_value());
    CHECK(*d->order(d->parse("YS")) == 4);
}

TEST_CASE("group axioms on random window elements")
{
    std::mt19937 rng(7);
    std::vector<GroupPtr> gs{c2_ltimes_c_c12(), d4_extension(), z2_semidirect_c2(),
                             std::make_shared<SemidirectZnC2>(3), order24_example()};
    for (const auto& g : gs) {
        auto w = g->window(4);
        std::uniform_int_distribution<std::size_t> pick(0, w.size() - 1);
        for (int t = 0; t < 300; ++t) {
            const auto &a = w[pick(rng)], &b = w[pick(rng)], &c = w[pick(rng)];
            CHECK(g->mul(g->mul(a, b), c) == g->mul(a, g->mul(b, c)));
            CHECK(g->is_identity(g->mul(a, g->inv(a))));
            CHECK(g->mul(g->identity(), a) == a);
        }
    }
}

TEST_CASE("conjugacy decision agrees with brute force")
{
    std::vector<GroupPtr> gs{c2_ltimes_c_c12(), d4_extension(), z2_semidirect_c2()};
    for (const auto& g : gs) {
        auto w = g->window(2);
        auto big = g->window(6);
        for (const auto& a : w) {
            ElementSet orbit;
            for (const auto& x : big) orbit.insert(g->conj(x, a));
            for (const auto& b : w) {
                INFO(g->name() << " " << g->format(a) << " " << g->format(b));
                CHECK(g->are_conjugate(a, b) == (orbit.count(b) > 0));
            }
        }
    }
}

TEST_CASE("cl canonicalizer matches windowed closure")
{
    std::vector<GroupPtr> gs{c2_ltimes_c_c12(), d4_extension(), z2_semidirect_c2(),
                             std::make_shared<SemidirectZnC2>(3)};
    for (const auto& g : gs) {
        const int inner = g->family() == Family::SemidirectZnC2 ? 2 : 4;
        auto closure = window_closure(*g, g->family() == Family::SemidirectZnC2 ? 8 : 24);
        for (const auto& a : g->window(inner)) {
            Element ra = g->cl_canonical(a);
            CHECK(g->cl_canonical(ra) == ra);
            CHECK_FALSE(encoding_less(a, ra));
            for (const auto& b : g->window(inner)) {
                INFO(g->name() << " " << g->format(a) << " " << g->format(b));
                bool same_closure = closure.at(a) == closure.at(b);
                CHECK(same_closure == (ra == g->cl_canonical(b)));
            }
        }
    }
}

TEST_CASE("finite cl classes cover the group")
{
    for (const auto& g : small_groups()) {
        std::size_t total = 0;
        for (const auto& c : cl_classes(*g, 0)) {
            total += c.members.size();
            for (const auto& x : c.members) CHECK(g->cl_canonical(x) == c.rep);
        }
        CHECK(total == static_cast<std::size_t>(g->n()));
    }
}

TEST_CASE("centralizer generators")
{
    std::vector<GroupPtr> gs{c2_ltimes_c_c12(), d4_extension(), z2_semidirect_c2(), order24_example()};
    for (const auto& g : gs) {
        for (const auto& z : g->window(3)) {
            for (const auto& x : g->centralizer(z)) CHECK(g->mul(x, z) == g->mul(z, x));
            Element zi = g->inv(z);
            for (const auto& x : g->extended_centralizer(z)) {
                Element c = g->conj(x, z);
                CHECK((c == z || c == zi));
            }
        }
    }
}

TEST_CASE("elementary abelian quotient")
{
    auto d8 = dihedral(4, "R", "S");
    auto q = ab_mod_squares(d8, d8->generator_elements());
    CHECK(q.dim() == 2);
    auto c4 = cyclic(4);
    CHECK(ab_mod_squares(c4, c4->generator_elements()).dim() == 1);
    auto c3 = cyclic(3);
    CHECK(ab_mod_squares(c3, c3->generator_elements()).dim() == 0);
}
