#include "qarf/group_library.hpp"

#include <deque>
#include <numeric>

namespace qarf::groups {

namespace {

std::string join_labels(const std::string& a, const std::string& b)
{
    if (a == "1") return b;
    if (b == "1") return a;
    return a + "*" + b;
}

int mod(long long a, int n)
{
    long long r = a % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

} // namespace

FiniteGroupPtr cyclic(int n, const std::string& gen, std::string name)
{
    if (n < 1) throw PreconditionError("cyclic: order must be positive");
    std::vector<int> t(n * n);
    std::vector<std::string> labels(n);
    for (int a = 0; a < n; ++a) {
        labels[a] = format_word({{gen, a}});
        for (int b = 0; b < n; ++b) t[a * n + b] = (a + b) % n;
    }
    std::vector<std::pair<std::string, int>> gens;
    if (n > 1) gens.emplace_back(gen, 1);
    return FiniteGroup::from_table(name.empty() ? "C" + std::to_string(n) : std::move(name), std::move(t),
                                   std::move(labels), std::move(gens));
}

FiniteGroupPtr cyclic_semidirect(std::string name, int n, int m, int r, const std::string& x, const std::string& y)
{
    long long rm = 1;
    for (int i = 0; i < m; ++i) rm = rm * r % n;
    if (rm != 1 % n) throw PreconditionError("cyclic_semidirect: r^m is not 1 mod n");
    std::vector<long long> rp(m, 1);
    for (int j = 1; j < m; ++j) rp[j] = rp[j - 1] * r % n;
    const int N = n * m;
    auto idx = [n](int i, int j) { return j * n + i; };
    std::vector<int> t(N * N);
    std::vector<std::string> labels(N);
    for (int j1 = 0; j1 < m; ++j1)
        for (int i1 = 0; i1 < n; ++i1) {
            labels[idx(i1, j1)] = format_word({{x, i1}, {y, j1}});
            for (int j2 = 0; j2 < m; ++j2)
                for (int i2 = 0; i2 < n; ++i2)
                    t[idx(i1, j1) * N + idx(i2, j2)] = idx(mod(i1 + rp[j1] * i2, n), (j1 + j2) % m);
        }
    return FiniteGroup::from_table(std::move(name), std::move(t), std::move(labels),
                                   {{x, idx(1 % n, 0)}, {y, idx(0, 1 % m)}});
}

FiniteGroupPtr dihedral(int n, const std::string& r, const std::string& s)
{
    return cyclic_semidirect("D" + std::to_string(2 * n), n, 2, n - 1, r, s);
}

FiniteGroupPtr dicyclic(int n, const std::string& a, const std::string& x)
{
    const int k = 2 * n, N = 4 * n;
    auto idx = [k](int i, int j) { return j * k + i; };
    std::vector<int> t(N * N);
    std::vector<std::string> labels(N);
    for (int j1 = 0; j1 < 2; ++j1)
        for (int i1 = 0; i1 < k; ++i1) {
            labels[idx(i1, j1)] = format_word({{a, i1}, {x, j1}});
            for (int j2 = 0; j2 < 2; ++j2)
                for (int i2 = 0; i2 < k; ++i2) {
                    int i = j1 ? i1 - i2 : i1 + i2;
                    if (j1 && j2) i += n;
                    t[idx(i1, j1) * N + idx(i2, j2)] = idx(mod(i, k), j1 ^ j2);
                }
        }
    std::string name = n == 2 ? "Q8" : "Dic" + std::to_string(n);
    if (n == 4) name = "Q16";
    return FiniteGroup::from_table(name, std::move(t), std::move(labels), {{a, idx(1, 0)}, {x, idx(0, 1)}});
}

FiniteGroupPtr direct_product(std::string name, const FiniteGroup& a, const FiniteGroup& b)
{
    const int na = a.n(), nb = b.n(), N = na * nb;
    std::vector<int> t(N * N);
    std::vector<std::string> labels(N);
    for (int x = 0; x < N; ++x) {
        labels[x] = join_labels(a.labels()[x / nb], b.labels()[x % nb]);
        for (int y = 0; y < N; ++y)
            t[x * N + y] = a.mul_index(x / nb, y / nb) * nb + b.mul_index(x % nb, y % nb);
    }
    std::vector<std::pair<std::string, int>> gens;
    for (const auto& [n, g] : a.generators()) gens.emplace_back(n, a.index(g) * nb + b.identity_index());
    for (const auto& [n, g] : b.generators()) gens.emplace_back(n, a.identity_index() * nb + b.index(g));
    return FiniteGroup::from_table(std::move(name), std::move(t), std::move(labels), std::move(gens));
}

std::vector<int> automorphism_from_generators(const FiniteGroup& a, const std::vector<int>& images)
{
    const auto& gens = a.generators();
    if (images.size() != gens.size()) throw PreconditionError("automorphism: one image per generator required");
    std::vector<int> gi;
    for (const auto& [n, g] : gens) gi.push_back(a.index(g));
    std::vector<int> phi(a.n(), -1);
    phi[a.identity_index()] = a.identity_index();
    std::deque<int> q{a.identity_index()};
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (std::size_t k = 0; k < gi.size(); ++k) {
            int y = a.mul_index(x, gi[k]);
            if (phi[y] >= 0) continue;
            phi[y] = a.mul_index(phi[x], images[k]);
            q.push_back(y);
        }
    }
    std::vector<char> hit(a.n(), 0);
    for (int x = 0; x < a.n(); ++x) {
        if (phi[x] < 0 || hit[phi[x]]++) throw PreconditionError("automorphism: map is not bijective");
        for (std::size_t k = 0; k < gi.size(); ++k)
            if (phi[a.mul_index(x, gi[k])] != a.mul_index(phi[x], images[k]))
                throw PreconditionError("automorphism: images do not define a homomorphism");
    }
    return phi;
}

FiniteGroupPtr semidirect_c2(std::string name, const FiniteGroup& a, const std::vector<int>& phi, const std::string& s)
{
    const int n = a.n(), N = 2 * n;
    if (static_cast<int>(phi.size()) != n) throw PreconditionError("semidirect_c2: automorphism has wrong length");
    for (int x = 0; x < n; ++x)
        if (phi[phi[x]] != x) throw PreconditionError("semidirect_c2: automorphism is not involutive");
    std::vector<int> t(N * N);
    std::vector<std::string> labels(N);
    for (int x = 0; x < N; ++x) {
        int ax = x % n, sx = x / n;
        labels[x] = join_labels(a.labels()[ax], sx ? s : "1");
        for (int y = 0; y < N; ++y) {
            int ay = y % n, sy = y / n;
            int b = sx ? phi[ay] : ay;
            t[x * N + y] = (sx ^ sy) * n + a.mul_index(ax, b);
        }
    }
    std::vector<std::pair<std::string, int>> gens;
    for (const auto& [nm, g] : a.generators()) gens.emplace_back(nm, a.index(g));
    gens.emplace_back(s, n + a.identity_index());
    return FiniteGroup::from_table(std::move(name), std::move(t), std::move(labels), std::move(gens));
}

std::vector<FiniteGroupPtr> small_groups()
{
    std::vector<FiniteGroupPtr> out;
    auto C = [](int n, const std::string& g = "X") { return cyclic(n, g); };
    auto prod = [](std::string name, FiniteGroupPtr a, FiniteGroupPtr b) { return direct_product(std::move(name), *a, *b); };

    for (int n : {1, 2, 3, 4}) out.push_back(C(n));
    out.push_back(prod("C2^2", C(2, "X"), C(2, "Y")));
    out.push_back(C(5));
    out.push_back(C(6));
    out.push_back(cyclic_semidirect("S3", 3, 2, 2, "X", "S"));
    out.push_back(C(7));
    // order 8
    out.push_back(C(8));
    out.push_back(prod("C4xC2", C(4, "X"), C(2, "Y")));
    out.push_back(prod("C2^3", prod("C2^2", C(2, "X"), C(2, "Y")), C(2, "Z")));
    out.push_back(dihedral(4, "X", "S"));
    out.push_back(dicyclic(2, "X", "Y"));
    // order 9, 10, 11
    out.push_back(C(9));
    out.push_back(prod("C3^2", C(3, "X"), C(3, "Y")));
    out.push_back(C(10));
    out.push_back(dihedral(5, "X", "S"));
    out.push_back(C(11));
    // order 12
    out.push_back(C(12));
    out.push_back(prod("C6xC2", C(6, "X"), C(2, "Y")));
    out.push_back(dihedral(6, "X", "S"));
    out.push_back(FiniteGroup::from_permutations("A4", 4, {{"X", {1, 2, 0, 3}}, {"Y", {1, 0, 3, 2}}}));
    out.push_back(dicyclic(3, "X", "Y"));
    // order 13, 14, 15
    out.push_back(C(13));
    out.push_back(C(14));
    out.push_back(dihedral(7, "X", "S"));
    out.push_back(C(15));
    // order 16
    out.push_back(C(16));
    out.push_back(prod("C4xC4", C(4, "X"), C(4, "Y")));
    {
        auto base = prod("C4xC2", C(4, "X"), C(2, "Y"));
        const int a = base->index(base->parse("X")), b = base->index(base->parse("Y"));
        auto phi = automorphism_from_generators(*base, {base->mul_index(a, b), b});
        out.push_back(semidirect_c2("(C4xC2)x|C2", *base, phi));
    }
    out.push_back(cyclic_semidirect("C4x|C4", 4, 4, 3, "X", "Y"));
    out.push_back(prod("C8xC2", C(8, "X"), C(2, "Y")));
    out.push_back(cyclic_semidirect("M16", 8, 2, 5, "X", "S"));
    out.push_back(dihedral(8, "X", "S"));
    out.push_back(cyclic_semidirect("QD16", 8, 2, 3, "X", "S"));
    out.push_back(dicyclic(4, "X", "Y"));
    out.push_back(prod("C4xC2^2", prod("C4xC2", C(4, "X"), C(2, "Y")), C(2, "Z")));
    out.push_back(prod("C2xD8", dihedral(4, "X", "S"), C(2, "Z")));
    out.push_back(prod("C2xQ8", dicyclic(2, "X", "Y"), C(2, "Z")));
    {
        auto base = prod("C4xC2", C(4, "X"), C(2, "Y"));
        const int a = base->index(base->parse("X")), b = base->index(base->parse("Y"));
        auto phi = automorphism_from_generators(*base, {a, base->mul_index(base->mul_index(a, a), b)});
        out.push_back(semidirect_c2("Pauli", *base, phi));
    }
    out.push_back(prod("C2^4", prod("C2^3", prod("C2^2", C(2, "X"), C(2, "Y")), C(2, "Z")), C(2, "W")));
    return out;
}

FiniteGroupPtr order24_example() { return cyclic_semidirect("G24", 12, 2, 5, "X", "S"); }

std::shared_ptr<const PullbackGroup> c2_ltimes_c_c12()
{
    auto e = cyclic_semidirect("E24", 12, 2, 5, "Y", "S");
    std::vector<DihedralM> hom(e->n());
    // elements Y^i S^j are stored at index j*12+i
    for (int x = 0; x < e->n(); ++x) hom[x] = {0, x >= 12 ? 1 : 0};
    auto fmt = [](const PullbackGroup& g, const Element& x) {
        std::string head = format_word({{"X", g.rot(x)}});
        return join_labels(head, g.e_group().labels()[g.epart(x)]);
    };
    auto g = std::make_shared<PullbackGroup>("C2 x| (C x C12)", true, e, 1, std::move(hom),
                                             std::vector<std::pair<std::string, Element>>{}, fmt);
    const int y = e->index(e->parse("Y"));
    g->set_named_generators({{"X", g->make_element(1, 0, e->identity_index())},
                             {"Y", g->make_element(0, 0, y)},
                             {"S", g->make_element(0, 1, e->index(e->parse("S")))}});
    return g;
}

std::shared_ptr<const PullbackGroup> d4_extension()
{
    // D4 = <sigma, tau | sigma^2 = (sigma tau)^2 = tau^4 = 1>; tau = R, sigma = S
    auto e = dihedral(4, "R", "S");
    std::vector<DihedralM> hom(e->n());
    // sigma -> s, tau -> s r in D_2
    const int sigma = e->index(e->parse("S")), tau = e->index(e->parse("R"));
    std::vector<char> done(e->n(), 0);
    hom[e->identity_index()] = {0, 0};
    done[e->identity_index()] = 1;
    std::deque<int> q{e->identity_index()};
    const DihedralM hs{0, 1}, ht{1, 1};
    auto dm = [](DihedralM a, DihedralM b) { return DihedralM{mod(a.k + (a.eps ? -b.k : b.k), 2), a.eps ^ b.eps}; };
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (auto [gen, img] : {std::pair{sigma, hs}, std::pair{tau, ht}}) {
            int y = e->mul_index(x, gen);
            if (done[y]) continue;
            done[y] = 1;
            hom[y] = dm(hom[x], img);
            q.push_back(y);
        }
    }
    auto fmt = [](const PullbackGroup& g, const Element& x) {
        // normal form Y^i S^eps, times the central involution (YS)^2 if needed
        const Element Y = g.generators()[0].second, S = g.generators()[1].second;
        Element base = g.mul(g.pow(Y, g.rot(x)), g.pow(S, g.refl(x)));
        std::string w = format_word({{"Y", g.rot(x)}, {"S", g.refl(x)}});
        if (base == x) return w;
        return w == "1" ? std::string("(YS)^2") : w + "*(YS)^2";
    };
    auto g = std::make_shared<PullbackGroup>("D4-extension", true, e, 2, std::move(hom),
                                             std::vector<std::pair<std::string, Element>>{}, fmt);
    g->set_named_generators({{"Y", g->make_element(1, 0, e->mul_index(sigma, tau))},
                             {"S", g->make_element(0, 1, sigma)}});
    return g;
}

std::shared_ptr<const SemidirectZnC2> z2_semidirect_c2() { return std::make_shared<SemidirectZnC2>(2); }

namespace {

struct Registry {
    std::vector<std::pair<std::string, GroupPtr>> entries;

    Registry()
    {
        entries.emplace_back("order24", order24_example());
        entries.emplace_back("c2-c-c12", c2_ltimes_c_c12());
        entries.emplace_back("d4-ext", d4_extension());
        entries.emplace_back("z2-c2", z2_semidirect_c2());
        entries.emplace_back("z3-c2", std::make_shared<SemidirectZnC2>(3));
        entries.emplace_back("z1-c2", std::make_shared<SemidirectZnC2>(1));
        for (const auto& g : small_groups()) entries.emplace_back(g->name(), g);
    }
};

const Registry& registry()
{
    static const Registry r;
    return r;
}

} // namespace

GroupPtr group_by_name(const std::string& name)
{
    for (const auto& [n, g] : registry().entries)
        if (n == name) return g;
    throw PreconditionError("unknown group descriptor '" + name + "'");
}

std::vector<std::string> group_names()
{
    std::vector<std::string> out;
    for (const auto& [n, g] : registry().entries) out.push_back(n);
    return out;
}

} // namespace qarf::groups
