// Acceptance checks: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "qarf/group_library.hpp"
#include "qarf/homology.hpp"
#include "qarf/k2diff.hpp"
#include "qarf/kinv.hpp"
#include "qarf/upsilon.hpp"
#include "random_arf.hpp"

using namespace qarf;
using namespace qarf::testing;
using groups::Element;
using groups::GroupPtr;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    int failures = 0;
    std::string first_failure;

    void check(bool cond, const std::string& what)
    {
        if (cond) return;
        ok = false;
        if (failures++ == 0) first_failure = what;
    }
};

ArfExpression pair_expr(const GroupPtr& g, const std::string& a, const std::string& b)
{
    ArfExpression e = ArfExpression::group(g);
    e.toggle(g->parse(a), g->parse(b));
    return e;
}

// ---------------------------------------------------------------------------

Outcome criterion1()
{
    Outcome o;
    auto g = groups::order24_example();
    auto cls = groups::cl_classes(*g, 0);
    std::string reps;
    for (const auto& c : cls) reps += (reps.empty() ? "" : ", ") + ("[" + g->format(c.rep) + "]");
    o.check(reps == "[1], [X]", "cl(G) = " + reps);
    const KGClass a = omega_group(pair_expr(g, "1", "1"));
    const KGClass b = omega_group(pair_expr(g, "X^2S", "S"));
    o.check(to_string(a) == "[1]", "omega(<1,1>) = " + to_string(a));
    o.check(to_string(b) == "[X]", "omega(<X^2S,S>) = " + to_string(b));
    // two vectors over F_2 are independent iff both are nonzero and distinct
    o.check(!a.is_zero() && !b.is_zero() && a != b, "images dependent");
    o.detail = "cl(G) = {" + reps + "}, omega(<1,1>) = " + to_string(a) + ", omega(<X^2S,S>) = " + to_string(b);
    return o;
}

Outcome criterion2()
{
    Outcome o;
    const WorkedDerivation d = chain_c2_c_c12();
    const DerivationResult r = check_derivation(d.start, d.steps, d.target);
    o.check(r.ok, "chain rejected at step " + std::to_string(r.failed_step) + ": " + r.message);
    GroupPtr g = groups::c2_ltimes_c_c12();
    const UpsilonDecision u = upsilon_distinguish(pair_expr(g, "S", "SX^2Y^2"), pair_expr(g, "SX", "SX^3Y^2"));
    // SameImage on the coordinates; the two-ends rule reports it as Equal
    const bool same = u.verdict == UpsilonVerdict::SameImage || u.verdict == UpsilonVerdict::Equal;
    o.check(same, "upsilon_distinguish: " + verdict_name(u.verdict));
    o.check(upsilon_eval(pair_expr(g, "S", "SX^2Y^2") + pair_expr(g, "SX", "SX^3Y^2")).is_zero(),
            "Upsilon of the difference is nonzero");
    o.detail = std::to_string(d.steps.size()) + " steps verified; Upsilon images coincide (SameImage), reported as " +
               verdict_name(u.verdict) + " since the group has two ends";
    return o;
}

Outcome criterion3()
{
    Outcome o;
    GroupPtr g = groups::c2_ltimes_c_c12();
    const ArfExpression e1 = pair_expr(g, "S", "SY^2"), e2 = pair_expr(g, "SX", "SXY^2");
    const KGClass w1 = omega_group(e1), w2 = omega_group(e2);
    o.check(w1 == w2, "omega differs: " + to_string(w1) + " vs " + to_string(w2));
    const UpsilonDecision u = upsilon_distinguish(e1, e2);
    o.check(u.verdict == UpsilonVerdict::Distinct, "upsilon_distinguish: " + verdict_name(u.verdict));
    o.detail = "omega = " + to_string(w1) + " for both; Distinct, witness " + u.witness;
    return o;
}

Outcome criterion4()
{
    Outcome o;
    auto g = groups::z2_semidirect_c2();
    GroupPtr gp = g;
    auto el = [&](std::int64_t x, std::int64_t y, int s) { return g->make_element({x, y}, s); };
    auto value = [&](const Element& a, const Element& b) {
        ArfExpression e = ArfExpression::group(gp);
        e.toggle(a, b);
        return upsilon_eval(e);
    };
    // Upsilon(<a,b>) = [h] in L([z]) with a single nonzero term
    auto matches = [&](const JValue& v, const Element& z, const Element& h) {
        LcGroup l = l_of_class(*g, z);
        auto im = l.image(z, h);
        return im && !im->is_zero() && v.terms.size() == 1 && v.terms[0].cls == g->cl_canonical(z) &&
               v.terms[0].coords == *im;
    };
    o.check(value(g->identity(), g->identity()).to_string() == "L([1]): t", "Upsilon(<1,1>) != t");
    const Element S = el(0, 0, 1), XS = el(1, 0, 1), YS = el(0, 1, 1);
    int count = 1;
    for (int i = -3; i <= 3; ++i)
        for (int j = -3; j <= 3; ++j) {
            const std::string at = " at i=" + std::to_string(i) + ", j=" + std::to_string(j);
            o.check(matches(value(el(2 * i, 2 * j + 1, 1), S), el(2 * i, 2 * j + 1, 0), S), "<X^2iY^2j+1S,S>" + at);
            o.check(matches(value(el(2 * i + 1, 2 * j, 1), S), el(2 * i + 1, 2 * j, 0), S), "<X^2i+1Y^2jS,S>" + at);
            o.check(matches(value(el(2 * i + 1, 2 * j + 1, 1), S), el(2 * i + 1, 2 * j + 1, 0), S),
                    "<X^2i+1Y^2j+1S,S>" + at);
            o.check(matches(value(el(2 * i + 1, 2 * j + 1, 1), XS), el(2 * i, 2 * j + 1, 0), XS),
                    "<X^2i+1Y^2j+1S,XS>" + at);
            o.check(matches(value(el(2 * i + 1, 2 * j + 1, 1), YS), el(2 * i + 1, 2 * j, 0), YS),
                    "<X^2i+1Y^2j+1S,YS>" + at);
            o.check(matches(value(el(2 * i, 2 * j + 1, 1), XS), el(2 * i - 1, 2 * j + 1, 0), XS),
                    "<X^2iY^2j+1S,XS>" + at);
            count += 6;
        }
    // L(c) = C_2 x C_2 as G_# / <X^2, Y>, G_# / <X, Y^2>, G_# / <X^2, XY>
    struct Case {
        Element z;
        std::vector<Element> zero, nonzero;
    };
    const std::vector<Case> cases{{el(2, 3, 0), {el(0, 1, 0), el(2, 0, 0)}, {el(1, 0, 0), S, XS}},
                                  {el(3, 2, 0), {el(1, 0, 0), el(0, 2, 0)}, {el(0, 1, 0), S, YS}},
                                  {el(1, 3, 0), {el(1, 1, 0), el(2, 0, 0)}, {el(1, 0, 0), S, XS}}};
    for (const auto& c : cases) {
        LcGroup l = l_of_class(*g, c.z);
        o.check(l.dim() == 2, "dim L([" + g->format(c.z) + "]) = " + std::to_string(l.dim()));
        for (const auto& x : c.zero) o.check(l.image(c.z, x)->is_zero(), "[" + g->format(x) + "] nonzero");
        for (const auto& x : c.nonzero) o.check(!l.image(c.z, x)->is_zero(), "[" + g->format(x) + "] zero");
    }
    o.detail = std::to_string(count) + " table entries for |i|, |j| <= 3; L(c) = C2 x C2 on 3 classes";
    return o;
}

Outcome criterion5()
{
    Outcome o;
    Rng rng(5005);
    // a cyclic pull-back: E = C_6 onto C_3
    auto c6 = groups::cyclic(6);
    std::vector<groups::DihedralM> hom(6);
    for (int i = 0; i < 6; ++i) hom[c6->index(c6->pow(c6->parse("X"), i))] = {i % 3, 0};
    auto pc = std::make_shared<groups::PullbackGroup>("C x_C3 C6", false, c6, 3, hom);
    pc->set_named_generators({{"T", pc->make_element(1, 0, c6->index(c6->parse("X")))}});

    const std::vector<GroupPtr> gs{groups::dihedral(4), groups::order24_example(), groups::group_by_name("A4"),
                                   groups::c2_ltimes_c_c12(), groups::d4_extension(), groups::z2_semidirect_c2(),
                                   pc};
    int group_checks = 0;
    for (const auto& g : gs) {
        for (int it = 0; it < 150; ++it) {
            auto [e, s] = random_group_step(rng, random_group_expression(rng, g));
            const ArfExpression f = apply_step(e, s);
            o.check(omega(e) == omega(f), "omega on " + g->name() + ": " + to_string(s, e));
            o.check(upsilon_eval(e + f).is_zero(), "Upsilon on " + g->name() + ": " + to_string(s, e));
            ++group_checks;
        }
    }
    auto zxy = make_poly_ring({"X", "Y"}, 0);
    auto f2l = make_poly_ring({"X", "Y"}, 2, true);
    const std::vector<ArfExpression> protos{ArfExpression::ring(zxy, Poly::constant(zxy, -1)),
                                            ArfExpression::reduced(zxy),
                                            ArfExpression::ring(f2l, Poly::constant(f2l, 1))};
    int ring_checks = 0;
    for (const auto& proto : protos) {
        for (int it = 0; it < 350; ++it) {
            auto [e, s] = random_ring_step(rng, random_ring_expression(rng, proto));
            const ArfExpression f = apply_step(e, s);
            o.check(omega(e) == omega(f), "omega on " + e.ring_ptr()->describe() + ": " + to_string(s, e));
            o.check(unit_classes_equal(omega1(e, 4), omega1(f, 4)), "omega1: " + to_string(s, e));
            o.check(total_invariant(e) == total_invariant(f), "total: " + to_string(s, e));
            ++ring_checks;
        }
    }
    o.detail = std::to_string(group_checks) + " group rewrites over 5 families (omega, Upsilon), " +
               std::to_string(ring_checks) + " ring rewrites over Z[X,Y], F2[X^+-1,Y^+-1] (omega, omega1, total)";
    return o;
}

FpVec random_vec(Rng& rng, int n, int p)
{
    FpVec v(n);
    for (auto& c : v) c = static_cast<std::uint8_t>(uniform(rng, 0, p - 1));
    return v;
}

FpVec random_cycle(Rng& rng, const HomologyGroup& h)
{
    FpVec v(h.ambient(), 0);
    for (const auto& c : h.cycles())
        v = linalg::fp_add(v, linalg::fp_scale(c, uniform(rng, 0, h.prime() - 1), h.prime()), h.prime());
    return v;
}

Outcome criterion6()
{
    Outcome o;
    Rng rng(6006);
    auto c2 = groups::cyclic(2);
    auto c2b = groups::cyclic(2, "Y");
    const std::vector<FiniteAlgebra> algs{
        FiniteAlgebra::group_algebra(c2, 2),
        FiniteAlgebra::group_algebra(groups::direct_product("C2xC2", *c2, *c2b), 2),
        FiniteAlgebra::group_algebra(groups::cyclic(3), 3)};
    int checks = 0;
    for (const auto& r : algs) {
        const HomologyGroup h0 = homology(r, HomologyKind::H0);
        const HomologyGroup h1 = homology(r, HomologyKind::H1);
        const HomologyGroup hc1 = homology(r, HomologyKind::HC1);
        for (int rep = 0; rep < 100; ++rep) {
            // H0: boundaries die
            FpVec x = random_vec(rng, r.dim(), r.p());
            FpVec bd0 = hochschild_b(r, random_vec(rng, tensor_size(r, 2), r.p()), 2);
            o.check(h0.equal(theta_p_h0(r, x), theta_p_h0(r, r.add(x, bd0))), "H0 boundary on " + r.name());
            // H1: boundaries die, and the choice of Gamma does not matter
            FpVec z = random_cycle(rng, h1);
            FpVec bd1 = hochschild_b(r, random_vec(rng, tensor_size(r, 3), r.p()), 3);
            FpVec t = theta_p_h1(r, decompose(r, z));
            o.check(hc1.is_cycle(t), "theta not a cycle on " + r.name());
            o.check(hc1.equal(t, theta_p_h1(r, decompose(r, r.add(z, bd1)))), "H1 boundary on " + r.name());
            o.check(hc1.equal(t, theta_p_h1(r, decompose(r, z), rng())), "Gamma choice on " + r.name());
            checks += 4;
        }
        for (int i = 0; i < r.dim(); ++i)
            for (int j = 0; j < r.dim(); ++j) {
                const FpVec u = r.basis(i), v = r.basis(j), uv = r.mul(u, v);
                o.check(hc1.equal(theta_p_h1(r, {{u, v}, {v, u}}), tensor(r, {r.pow(uv, r.p() - 1), uv})),
                        "symmetric identity on " + r.name());
                ++checks;
            }
    }
    o.detail = std::to_string(checks) + " checks on F2[C2], F2[C2xC2], F3[C3]";
    return o;
}

Outcome criterion7()
{
    Outcome o;
    for (const auto& r : {FiniteAlgebra::prime_field(2), FiniteAlgebra::group_algebra(groups::cyclic(2), 2)}) {
        const MoritaReport m = morita_check(r, 2, 3, 2);
        o.check(m.ok(), "M2(" + r.name() + "): " + (m.failures.empty() ? "" : m.failures.front()));
        const MoritaSquares s = morita_squares(r, 2);
        o.check(s.ok(), "squares for M2(" + r.name() + "): " + (s.failures.empty() ? "" : s.failures.front()));
    }
    o.detail = "M2(F2), M2(F2[C2]): Tr iota = 1 at levels 1-3, homotopy at levels 1-2, four squares";
    return o;
}

Poly random_monomial(Rng& rng, const PolyRingPtr& r, int maxexp = 3)
{
    Monomial e(r->nvars());
    for (auto& x : e) x = uniform(rng, 0, maxexp);
    return Poly::monomial(r, e, uniform(rng, 0, 1) ? 1 : -1);
}

TPoly random_tp(Rng& rng, const PolyRingPtr& r, int n, bool ideal)
{
    std::vector<Poly> c;
    for (int k = 0; k <= n; ++k) c.push_back(k == 0 && ideal ? Poly(r) : random_poly(rng, r, 2, 2, 3));
    return TPoly(std::move(c));
}

Outcome criterion8()
{
    Outcome o;
    Rng rng(8008);
    int count = 0, roundtrips = 0;
    const std::vector<PolyRingPtr> rings{make_poly_ring({}, 0), make_poly_ring({"X"}, 0),
                                         make_poly_ring({"X", "Y"}, 0)};
    for (int n : {1, 2}) {
        for (const auto& r : rings) {
            auto L = LambdaStructure::require(r);
            for (int t = 0; t < 200; ++t) {
                bool first = uniform(rng, 0, 1);
                TPoly a = random_tp(rng, r, n, first), b = random_tp(rng, r, n, !first || uniform(rng, 0, 1));
                o.check(ds_relation_residual(L, DSRelation::AntiSymmetry, a, b).is_zero(), "anti-symmetry");
                first = uniform(rng, 0, 1);
                a = random_tp(rng, r, n, first);
                b = random_tp(rng, r, n, !first);
                TPoly c = random_tp(rng, r, n, !first);
                o.check(ds_relation_residual(L, DSRelation::Additivity, a, b, c).is_zero(), "additivity");
                const int which = uniform(rng, 0, 2);
                a = random_tp(rng, r, n, which == 0);
                b = random_tp(rng, r, n, which == 1);
                c = random_tp(rng, r, n, which == 2);
                o.check(ds_relation_residual(L, DSRelation::Multiplicativity, a, b, c).is_zero(), "multiplicativity");
                count += 3;
            }
        }
    }
    for (const auto& r : rings) {
        auto L = LambdaStructure::require(r);
        for (int t = 0; t < 100; ++t) {
            TPoly a = random_tp(rng, r, 1, true), b = random_tp(rng, r, 1, false);
            const NuValue v = nu1(L, make_symbol(a, b));
            o.check(nu(L, nu1_inverse(L, v.alpha, v.r)) == v, "nu1 inverse");
            ++roundtrips;
        }
    }
    o.detail = std::to_string(count) + " relation instances over Z, Z[X], Z[X,Y] (F2[X] has no lambda structure), " +
               std::to_string(roundtrips) + " inverse round trips";
    return o;
}

Outcome criterion9()
{
    Outcome o;
    Rng rng(9009);
    auto r = make_poly_ring({"X", "Y"}, 0);
    auto red = [&](std::initializer_list<std::pair<Poly, Poly>> pairs) {
        ArfExpression e = ArfExpression::reduced(r);
        for (const auto& [a, b] : pairs) e.toggle(a, b);
        return total_invariant(e);
    };
    const Poly X = parse_poly(r, "X"), Y = parse_poly(r, "Y");
    int count = 0;
    for (int t = 0; t < 1000; ++t) {
        const Poly a = random_monomial(rng, r), b = random_monomial(rng, r), c = random_monomial(rng, r);
        o.check(red({{a, b * c}}) == red({{a * b, c}, {a * c, b}}),
                "<<a,bc>> at a=" + to_string(a) + ", b=" + to_string(b) + ", c=" + to_string(c));
        const Poly f = random_monomial(rng, r), g = random_monomial(rng, r);
        o.check(red({{f, g}}) == red({{f * g.partial(0), X}, {f * g.partial(1), Y}}),
                "partials at f=" + to_string(f) + ", g=" + to_string(g));
        count += 2;
    }
    o.detail = std::to_string(count) + " monomial instances over Z[X,Y]";
    return o;
}

Outcome criterion10()
{
    Outcome o;
    int eta = 0, single = 0, ngroups = 0;
    for (const auto& g : groups::small_groups()) {
        if (g->n() > 16) continue;
        ++ngroups;
        for (const auto& cls : g->conj_classes()) {
            const Element z = g->element(cls.front());
            SigmaSummand s(g, z);
            for (const auto& [k, c] : eta_relation_instances(*g, z)) {
                const std::string where = g->name() + " z=" + g->format(z) + " relation " + std::to_string(k);
                o.check(s.is_cycle(c), "not a cycle: " + where);
                o.check(s.eta(c).is_zero(), "eta nonzero: " + where);
                ++eta;
            }
        }
        const auto inv = groups::involutions(*g, 0);
        for (const auto& x : inv)
            for (const auto& y : inv) {
                ArfExpression e = ArfExpression::group(g);
                e.toggle(x, y);
                const JValue v = upsilon_eval(e);
                o.check(!v.is_zero() && v.exact, "Upsilon(" + to_string(e) + ") = 0 in " + g->name());
                ++single;
            }
    }
    o.detail = std::to_string(ngroups) + " groups: " + std::to_string(single) + " single pairs nonzero, " +
               std::to_string(eta) + " eta relation instances vanish";
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"cl and omega basis, order-24 group", criterion1},
        {"derivation chain and SameImage", criterion2},
        {"distinct despite equal omega", criterion3},
        {"Upsilon table in Z^2 x| C2", criterion4},
        {"well-definedness battery", criterion5},
        {"theta_p batteries", criterion6},
        {"Morita identities", criterion7},
        {"nu-presentation residuals", criterion8},
        {"Z[X,Y] total invariant identities", criterion9},
        {"finite-group Upsilon soundness", criterion10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.ok = false;
            o.first_failure = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
        std::cout << (o.ok ? "PASS " : "FAIL ") << i + 1 << ". " << criteria[i].first << " (" << timing << "): ";
        if (o.ok) std::cout << o.detail;
        else std::cout << o.failures << " failure(s), first: " << o.first_failure;
        std::cout << std::endl;
        failed += !o.ok;
    }
    return failed == 0 ? 0 : 1;
}
