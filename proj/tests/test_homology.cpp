#include "doctest.h"

#include "qarf/group_library.hpp"
#include "qarf/homology.hpp"
#include "random_elems.hpp"

using namespace qarf;
using namespace qarf::testing;

namespace {

FiniteAlgebra f2c2() { return FiniteAlgebra::group_algebra(groups::cyclic(2), 2); }
FiniteAlgebra f2v4()
{
    auto c2 = groups::cyclic(2);
    auto c2b = groups::cyclic(2, "Y");
    return FiniteAlgebra::group_algebra(groups::direct_product("C2xC2", *c2, *c2b), 2);
}
FiniteAlgebra f3c3() { return FiniteAlgebra::group_algebra(groups::cyclic(3), 3); }

FpVec random_vec(Rng& rng, int n, int p)
{
    FpVec v(n);
    for (auto& c : v) c = static_cast<std::uint8_t>(uniform(rng, 0, p - 1));
    return v;
}

// A random cycle of the given homology group.
FpVec random_cycle(Rng& rng, const HomologyGroup& h)
{
    FpVec v(h.ambient(), 0);
    for (const auto& c : h.cycles()) v = linalg::fp_add(v, linalg::fp_scale(c, uniform(rng, 0, h.prime() - 1), h.prime()), h.prime());
    return v;
}

// A random presentation: each basis tensor split into a random number of
// elementary tensors with random first factors.
Summands random_split(Rng& rng, const FiniteAlgebra& r, const FpVec& t)
{
    Summands s;
    for (const auto& [a, b] : decompose(r, t)) {
        FpVec rest = a;
        int parts = uniform(rng, 0, 2);
        for (int i = 0; i < parts; ++i) {
            FpVec x = random_vec(rng, r.dim(), r.p());
            s.emplace_back(x, b);
            rest = r.sub(rest, x);
        }
        s.emplace_back(rest, b);
    }
    std::shuffle(s.begin(), s.end(), rng);
    return s;
}

} // namespace

TEST_CASE("algebras satisfy the axioms")
{
    auto d4 = groups::dihedral(4);
    for (const auto& r : {FiniteAlgebra::prime_field(2), FiniteAlgebra::prime_field(3), f2c2(), f2v4(), f3c3(),
                          FiniteAlgebra::group_algebra(d4, 2), FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(2), 2),
                          FiniteAlgebra::matrix_algebra(f2c2(), 2), FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(3), 2)}) {
        CAPTURE(r.name());
        CHECK_NOTHROW(r.validate());
    }
    // a non-involution is rejected
    FiniteAlgebra bad(2, {"1", "g"}, {{FpVec{1, 0}, FpVec{0, 1}}, {FpVec{0, 1}, FpVec{1, 0}}}, FpVec{1, 0},
                      std::vector<FpVec>{FpVec{0, 1}, FpVec{1, 0}});
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("b squares to zero and x, y have the expected orders")
{
    Rng rng(11);
    for (const auto& r : {f2c2(), f3c3(), FiniteAlgebra::group_algebra(groups::dihedral(3), 3),
                          FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(3), 2)}) {
        CAPTURE(r.name());
        for (int k = 2; k <= 4; ++k)
            for (int rep = 0; rep < 20; ++rep) {
                FpVec t = random_vec(rng, tensor_size(r, k), r.p());
                if (k >= 3) CHECK(linalg::fp_is_zero(hochschild_b(r, hochschild_b(r, t, k), k - 1)));
                FpVec xs = t;
                for (int i = 0; i < k; ++i) xs = cyclic_x(r, xs, k);
                CHECK(xs == t);
                CHECK(dihedral_y(r, dihedral_y(r, t, k), k) == t);
                // y x y = x^-1
                FpVec yxy = dihedral_y(r, cyclic_x(r, dihedral_y(r, t, k), k), k);
                CHECK(cyclic_x(r, yxy, k) == t);
                // b(1 - x) = (1 - x) b'
                if (k >= 2) {
                    FpVec lhs = hochschild_b(r, r.sub(t, cyclic_x(r, t, k)), k);
                    FpVec bp = hochschild_bprime(r, t, k);
                    CHECK(lhs == r.sub(bp, cyclic_x(r, bp, k - 1)));
                }
            }
    }
}

TEST_CASE("H0 of a group algebra counts conjugacy classes")
{
    for (const auto& g : groups::small_groups()) {
        if (g->n() > 12) continue;
        for (int p : {2, 3}) {
            FiniteAlgebra r = FiniteAlgebra::group_algebra(g, p);
            CAPTURE(r.name());
            CHECK(homology(r, HomologyKind::H0).dim() == static_cast<int>(g->conj_classes().size()));
        }
    }
    CHECK(homology(FiniteAlgebra::prime_field(2), HomologyKind::H0).dim() == 1);
    CHECK(homology(FiniteAlgebra::prime_field(3), HomologyKind::HC1).dim() == 0);
    CHECK(homology(FiniteAlgebra::prime_field(2), HomologyKind::HC1).dim() == 0);
}

TEST_CASE("H1 and HC1 of small commutative algebras")
{
    // HH_1 = Omega^1 of the truncated polynomial ring and HC_1 = Omega^1 / dA
    CHECK(homology(f2c2(), HomologyKind::H1).dim() == 2);
    CHECK(homology(f2c2(), HomologyKind::HC1).dim() == 1);
    CHECK(homology(f3c3(), HomologyKind::H1).dim() == 3);
    CHECK(homology(f3c3(), HomologyKind::HC1).dim() == 1);
    CHECK(homology(f2v4(), HomologyKind::H1).dim() == 8);
    CHECK(homology(f2v4(), HomologyKind::HC1).dim() == 5);
    // p does not divide |G|: F_3[C_2] is semisimple
    CHECK(homology(FiniteAlgebra::group_algebra(groups::cyclic(2), 3), HomologyKind::H1).dim() == 0);
    // matrices over a field have the homology of the field
    CHECK(homology(FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(2), 2), HomologyKind::H0).dim() == 1);
    CHECK(homology(FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(2), 2), HomologyKind::H1).dim() == 0);
}

TEST_CASE("HQ1 presentation agrees with the total complex")
{
    std::vector<FiniteAlgebra> algs{FiniteAlgebra::prime_field(2), f2c2(), f2v4(),
                                    FiniteAlgebra::group_algebra(groups::cyclic(4), 2),
                                    FiniteAlgebra::group_algebra(groups::dihedral(3), 2),
                                    FiniteAlgebra::group_algebra(groups::dihedral(4), 2),
                                    FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(2), 2),
                                    FiniteAlgebra::matrix_algebra(f2c2(), 2)};
    for (const auto& r : algs) {
        CAPTURE(r.name());
        CHECK(homology(r, HomologyKind::HQ1).dim() == hq1_dimension_from_total_complex(r));
    }
    CHECK(homology(FiniteAlgebra::prime_field(2), HomologyKind::HQ1).dim() == 1);
}

TEST_CASE("gamma representatives")
{
    for (int p : {2, 3, 5})
        for (int n = 1; n <= 4; ++n) {
            auto g = gamma_representatives(n, p);
            // p prime: every non-constant orbit has p members
            long long total = 1;
            for (int i = 0; i < p; ++i) total *= n;
            CHECK(static_cast<long long>(g.size()) * p == total - n);
            auto h = gamma_representatives(n, p, 99);
            CHECK(h.size() == g.size());
        }
    CHECK(gamma_representatives(3, 2) == std::vector<std::vector<int>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("theta_p on H1 is well defined")
{
    Rng rng(5);
    std::vector<FiniteAlgebra> algs{f2c2(), f3c3(), f2v4(), FiniteAlgebra::group_algebra(groups::dihedral(3), 3),
                                    FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(3), 2)};
    for (const auto& r : algs) {
        CAPTURE(r.name());
        HomologyGroup h1 = homology(r, HomologyKind::H1);
        HomologyGroup hc1 = homology(r, HomologyKind::HC1);
        HomologyGroup hq = hc1_mod_q(r);
        const int reps = r.dim() > 4 ? 10 : 40;
        for (int rep = 0; rep < reps; ++rep) {
            FpVec z = random_cycle(rng, h1);
            Summands s = random_split(rng, r, z);
            FpVec t = theta_p_h1(r, s);
            CHECK(hc1.is_cycle(t));
            // another presentation of the same tensor
            CHECK(hc1.equal(t, theta_p_h1(r, random_split(rng, r, z))));
            // another choice of orbit representatives
            CHECK(hc1.equal(t, theta_p_h1(r, s, rng())));
            // boundaries die
            FpVec bd = hochschild_b(r, random_vec(rng, tensor_size(r, 3), r.p()), 3);
            CHECK(hc1.equal(t, theta_p_h1(r, random_split(rng, r, r.add(z, bd)))));
            // additivity modulo the image of q
            FpVec z2 = random_cycle(rng, h1);
            Summands both = s;
            for (const auto& x : random_split(rng, r, z2)) both.push_back(x);
            CHECK(hq.equal(theta_p_h1(r, both), r.add(t, theta_p_h1(r, decompose(r, z2)))));
        }
    }
}

TEST_CASE("theta_p on symmetric tensors lands in the image of q")
{
    for (const auto& r : {f2c2(), f3c3(), FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(2), 2)}) {
        CAPTURE(r.name());
        HomologyGroup hc1 = homology(r, HomologyKind::HC1);
        for (int i = 0; i < r.dim(); ++i)
            for (int j = 0; j < r.dim(); ++j) {
                FpVec u = r.basis(i), v = r.basis(j);
                FpVec t = theta_p_h1(r, {{u, v}, {v, u}});
                FpVec uv = r.mul(u, v);
                CHECK(hc1.equal(t, tensor(r, {r.pow(uv, r.p() - 1), uv})));
            }
        // q is additive into HC1
        Rng rng(3);
        for (int rep = 0; rep < 30; ++rep) {
            FpVec a = random_vec(rng, r.dim(), r.p()), b = random_vec(rng, r.dim(), r.p());
            CHECK(hc1.equal(q_map(r, r.add(a, b)), r.add(q_map(r, a), q_map(r, b))));
        }
    }
}

TEST_CASE("theta_p on H0 and Connes B")
{
    Rng rng(8);
    for (const auto& r : {f2c2(), f3c3(), FiniteAlgebra::group_algebra(groups::dihedral(3), 2),
                          FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(3), 2)}) {
        CAPTURE(r.name());
        HomologyGroup h0 = homology(r, HomologyKind::H0);
        HomologyGroup h1 = homology(r, HomologyKind::H1);
        for (int rep = 0; rep < 100; ++rep) {
            FpVec x = random_vec(rng, r.dim(), r.p());
            FpVec bd = hochschild_b(r, random_vec(rng, tensor_size(r, 2), r.p()), 2);
            CHECK(h0.equal(theta_p_h0(r, x), theta_p_h0(r, r.add(x, bd))));
            FpVec y = random_vec(rng, r.dim(), r.p());
            CHECK(h0.equal(theta_p_h0(r, r.add(x, y)), r.add(theta_p_h0(r, x), theta_p_h0(r, y))));
            CHECK(h1.is_cycle(connes_b(r, x)));
            CHECK(h1.equal(connes_b(r, x), connes_b(r, r.add(x, bd))));
        }
    }
}

TEST_CASE("auxiliary theta")
{
    Rng rng(21);
    for (const auto& r : {FiniteAlgebra::group_algebra(groups::dihedral(3), 2), FiniteAlgebra::group_algebra(groups::dihedral(4), 2),
                          FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(2), 2)}) {
        CAPTURE(r.name());
        HomologyGroup h0 = homology(r, HomologyKind::H0);
        for (int rep = 0; rep < 100; ++rep) {
            FpVec x = random_vec(rng, tensor_size(r, 2), 2), y = random_vec(rng, tensor_size(r, 2), 2);
            Summands sx = random_split(rng, r, x), sy = random_split(rng, r, y);
            // independent of the presentation
            CHECK(h0.equal(aux_theta(r, sx), aux_theta(r, random_split(rng, r, x))));
            Summands both = sx;
            both.insert(both.end(), sy.begin(), sy.end());
            FpVec rhs = r.add(r.add(aux_theta(r, sx), aux_theta(r, sy)),
                              r.mul(hochschild_b(r, x, 2), hochschild_b(r, y, 2)));
            CHECK(h0.equal(aux_theta(r, both), rhs));
        }
    }
}

TEST_CASE("vartheta is well defined on HQ1")
{
    Rng rng(13);
    std::vector<FiniteAlgebra> algs{FiniteAlgebra::prime_field(2), f2c2(), f2v4(),
                                    FiniteAlgebra::group_algebra(groups::dihedral(3), 2),
                                    FiniteAlgebra::group_algebra(groups::dihedral(4), 2),
                                    FiniteAlgebra::matrix_algebra(FiniteAlgebra::prime_field(2), 2)};
    for (const auto& r : algs) {
        CAPTURE(r.name());
        HomologyGroup hq = homology(r, HomologyKind::HQ1);
        HomologyGroup cm = coker_mu(r);
        const int reps = r.dim() > 4 ? 25 : 100;
        for (int rep = 0; rep < reps; ++rep) {
            FpVec v = random_cycle(rng, hq);
            auto [w, c] = hq_unpack(r, v);
            FpVec t = vartheta(r, random_split(rng, r, w), c);
            CHECK(cm.is_cycle(t));
            CHECK(cm.equal(t, vartheta(r, random_split(rng, r, w), c)));
            // relations of the presentation die
            FpVec rel = r.zero();
            FpVec rw(tensor_size(r, 2), 0);
            for (const auto& z : hq.boundaries().basis())
                if (uniform(rng, 0, 1)) {
                    auto [a, b] = hq_unpack(r, z);
                    rw = r.add(rw, a);
                    rel = r.add(rel, b);
                }
            CHECK(cm.equal(t, vartheta(r, random_split(rng, r, r.add(w, rw)), r.add(c, rel))));
            // additivity
            FpVec v2 = random_cycle(rng, hq);
            auto [w2, c2] = hq_unpack(r, v2);
            FpVec sum = r.add(t, vartheta(r, decompose(r, w2), c2));
            CHECK(cm.equal(vartheta(r, decompose(r, r.add(w, w2)), r.add(c, c2)), sum));
        }
    }
}

TEST_CASE("vartheta on Upsilon of group involutions")
{
    for (const auto& g : {groups::dihedral(4), groups::dihedral(3), groups::cyclic(2)}) {
        FiniteAlgebra r = FiniteAlgebra::group_algebra(g, 2);
        CAPTURE(r.name());
        HomologyGroup cm = coker_mu(r);
        for (int a = 0; a < g->n(); ++a)
            for (int b = 0; b < g->n(); ++b) {
                if (g->mul_index(a, a) != g->identity_index() || g->mul_index(b, b) != g->identity_index()) continue;
                FpVec ea = r.basis(a), eb = r.basis(b);
                FpVec v = upsilon_algebra(r, ea, eb);
                auto [w, c] = hq_unpack(r, v);
                FpVec aba = r.mul(r.mul(ea, eb), ea);
                CHECK(cm.equal(vartheta(r, decompose(r, w), c), upsilon_algebra(r, aba, eb)));
            }
    }
}

TEST_CASE("Coker(1 + vartheta)")
{
    FiniteAlgebra f2 = FiniteAlgebra::prime_field(2);
    HomologyGroup k = coker_one_plus_vartheta(f2);
    CHECK(k.dim() == 1);
    CHECK(!k.is_zero(upsilon_algebra(f2, f2.one(), f2.one())));
    FiniteAlgebra r = f2c2();
    HomologyGroup kr = coker_one_plus_vartheta(r);
    CHECK(kr.dim() >= 1);
    CHECK(!kr.is_zero(upsilon_algebra(r, r.one(), r.one())));
}

TEST_CASE("Morita identities")
{
    for (const auto& r : {FiniteAlgebra::prime_field(2), f2c2(), FiniteAlgebra::prime_field(3)}) {
        CAPTURE(r.name());
        MoritaReport rep = morita_check(r, 2, r.dim() > 1 ? 2 : 3, 2);
        for (const auto& f : rep.failures) MESSAGE(f);
        CHECK(rep.ok());
    }
    MoritaReport three = morita_check(FiniteAlgebra::prime_field(2), 3, 2, 2);
    CHECK(three.ok());
}

TEST_CASE("Morita squares")
{
    for (const auto& r : {FiniteAlgebra::prime_field(2), f2c2(), FiniteAlgebra::prime_field(3), f3c3()}) {
        CAPTURE(r.name());
        MoritaSquares sq = morita_squares(r, 2);
        for (const auto& f : sq.failures) MESSAGE(f);
        CHECK(sq.ok());
    }
}

TEST_CASE("dimension guard")
{
    auto g = groups::dihedral(6);  // order 12
    FiniteAlgebra r = FiniteAlgebra::matrix_algebra(FiniteAlgebra::group_algebra(g, 2), 2);
    CHECK_THROWS_AS(homology(r, HomologyKind::H1), PreconditionError);
}
