#include "qarf/upsilon.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "qarf/error.hpp"

namespace qarf {

using groups::ElementLess;
using groups::Family;
using groups::FiniteGroup;
using groups::Group;
using groups::PullbackGroup;
using groups::SemidirectZnC2;
using linalg::F2Quotient;
using linalg::F2Subspace;

namespace {

constexpr int kModelCap = 1 << 14;

std::int64_t fmod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

BitVec mask_to_bits(std::uint64_t m, int n)
{
    BitVec v(n);
    for (int i = 0; i < n; ++i)
        if ((m >> i) & 1u) v.set(i);
    return v;
}

// J/<squares> of a finite group given on indices 0..n-1 by mul.
struct SharpCore {
    int dim = 0;
    std::vector<std::uint64_t> coords;
    std::vector<int> basis;
};

template <class Mul>
SharpCore sharp_core(int n, int id, Mul mul)
{
    // subgroup generated by squares
    std::vector<char> inq(n, 0);
    std::vector<int> q{id};
    inq[id] = 1;
    auto add_q = [&](int x) {
        if (inq[x]) return;
        std::deque<int> todo{x};
        inq[x] = 1;
        q.push_back(x);
        while (!todo.empty()) {
            int a = todo.front();
            todo.pop_front();
            for (std::size_t i = 0; i < q.size(); ++i) {
                for (int c : {mul(a, q[i]), mul(q[i], a)}) {
                    if (inq[c]) continue;
                    inq[c] = 1;
                    q.push_back(c);
                    todo.push_back(c);
                }
            }
        }
    };
    for (int x = 0; x < n; ++x) add_q(mul(x, x));
    // coset of each element
    std::vector<int> coset(n, -1);
    int ncos = 0;
    for (int x = 0; x < n; ++x) {
        if (coset[x] >= 0) continue;
        for (int y : q) coset[mul(x, y)] = ncos;
        ++ncos;
    }
    std::vector<int> rep(ncos, -1);
    for (int x = 0; x < n; ++x)
        if (rep[coset[x]] < 0) rep[coset[x]] = x;
    // greedy basis of the elementary abelian quotient
    SharpCore out;
    std::vector<std::int64_t> cc(ncos, -1);
    cc[coset[id]] = 0;
    std::vector<int> span{coset[id]};
    for (int x = 0; x < n; ++x) {
        if (cc[coset[x]] >= 0) continue;
        if (out.dim >= 63) throw PreconditionError("upsilon: J_# too large");
        const std::uint64_t bit = std::uint64_t{1} << out.dim;
        out.basis.push_back(x);
        ++out.dim;
        std::size_t old = span.size();
        for (std::size_t i = 0; i < old; ++i) {
            int c = coset[mul(rep[span[i]], x)];
            cc[c] = static_cast<std::int64_t>(static_cast<std::uint64_t>(cc[span[i]]) | bit);
            span.push_back(c);
        }
    }
    out.coords.resize(n);
    for (int x = 0; x < n; ++x) out.coords[x] = static_cast<std::uint64_t>(cc[coset[x]]);
    return out;
}

// Translation parts (semidirect) or rotations (pull-back) of elements of
// the subgroup generated by gens that lie in the infinite normal part:
// the generators themselves and products of two reflections.
std::vector<Element> translation_witnesses(const Group& g, const std::vector<Element>& gens,
                                           const std::function<bool(const Element&)>& is_reflection)
{
    std::vector<Element> out;
    std::vector<Element> refl;
    for (const auto& x : gens) {
        if (is_reflection(x)) refl.push_back(x);
        else out.push_back(x);
    }
    for (const auto& a : refl)
        for (const auto& b : refl) out.push_back(g.mul(a, b));
    return out;
}

// Reduction J -> J/N and the period 2M of N (0 when J is finite).
std::pair<std::function<Element(const Element&)>, std::int64_t> model_reduction(const Group& g,
                                                                                const std::vector<Element>& gens)
{
    if (g.family() == Family::SemidirectZnC2) {
        const auto& s = static_cast<const SemidirectZnC2&>(g);
        const int n = s.rank();
        auto tw = translation_witnesses(g, gens, [&](const Element& x) { return s.sign_bit(x) == 1; });
        bool infinite = false;
        std::vector<char> axis(n, 0);
        for (const auto& x : tw) {
            auto v = s.vec(x);
            int nz = 0, at = -1;
            for (int i = 0; i < n; ++i)
                if (v[i] != 0) ++nz, at = i;
            if (nz > 0) infinite = true;
            if (nz == 1 && std::llabs(v[at]) == 1) axis[at] = 1;
        }
        if (!infinite) return {[](const Element& x) { return x; }, 0};
        if (std::find(axis.begin(), axis.end(), 0) != axis.end())
            throw PreconditionError("upsilon: translation lattice of the subgroup is not supported");
        return {[&s](const Element& x) {
                    auto v = s.vec(x);
                    for (auto& c : v) c = fmod(c, 2);
                    return s.make_element(v, s.sign_bit(x));
                },
                2};
    }
    if (g.family() == Family::PullbackCyclic || g.family() == Family::PullbackDihedral) {
        const auto& p = static_cast<const PullbackGroup&>(g);
        auto tw = translation_witnesses(g, gens, [&](const Element& x) { return p.refl(x) == 1; });
        std::int64_t m = 0;
        for (const auto& x : tw) {
            if (p.rot(x) == 0) continue;
            std::int64_t ord = *p.e_group().order(p.e_group().element(p.epart(x)));
            m = std::gcd(m, static_cast<std::int64_t>(std::llabs(p.rot(x))) * ord);
        }
        if (m == 0) return {[](const Element& x) { return x; }, 0};
        const std::int64_t period = 2 * m;
        return {[&p, period](const Element& x) { return p.make_element(fmod(p.rot(x), period), p.refl(x), p.epart(x)); },
                period};
    }
    return {[](const Element& x) { return x; }, 0};
}

std::int64_t magnitude(const Group& g, const Element& x)
{
    if (g.family() == Family::SemidirectZnC2) {
        std::int64_t m = 0;
        for (std::size_t i = 1; i < x.code.size(); ++i) m = std::max(m, static_cast<std::int64_t>(std::llabs(x.code[i])));
        return m;
    }
    if (g.family() == Family::PullbackCyclic || g.family() == Family::PullbackDihedral)
        return static_cast<std::int64_t>(std::llabs(x.code[0]));
    return 0;
}

bool commutes(const Group& g, const Element& a, const Element& b) { return g.mul(a, b) == g.mul(b, a); }

std::string bracket(const Group& g, const Element& x) { return "[" + g.format(x) + "]"; }

} // namespace

// ---------------------------------------------------------------------------
// SharpGroup

SharpGroup make_sharp(const Group& g, const std::vector<Element>& gens,
                      const std::function<bool(const Element&)>& member)
{
    SharpGroup s;
    s.g_ = &g;
    s.member_ = member;
    auto [reduce, period] = model_reduction(g, gens);
    s.reduce_ = reduce;
    s.period_ = period;

    std::map<Element, int, ElementLess> index;
    std::vector<Element> elems{reduce(g.identity())};
    index[elems[0]] = 0;
    std::vector<Element> rgens;
    for (const auto& x : gens) rgens.push_back(reduce(x));
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (const auto& x : rgens) {
            Element y = reduce(g.mul(elems[i], x));
            if (index.count(y)) continue;
            if (static_cast<int>(elems.size()) >= kModelCap) throw PreconditionError("upsilon: J/N model too large");
            index[y] = static_cast<int>(elems.size());
            elems.push_back(y);
        }
    }
    // encoding order
    std::sort(elems.begin(), elems.end(), ElementLess{});
    for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i);
    const int n = static_cast<int>(elems.size());
    std::vector<int> table(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) table[static_cast<std::size_t>(a) * n + b] = index.at(reduce(g.mul(elems[a], elems[b])));
    SharpCore core = sharp_core(n, index.at(reduce(g.identity())),
                                [&](int a, int b) { return table[static_cast<std::size_t>(a) * n + b]; });
    s.dim_ = core.dim;
    for (int i = 0; i < n; ++i) s.coords_.push_back(mask_to_bits(core.coords[i], core.dim));
    for (int b : core.basis) s.basis_.push_back(elems[b]);
    s.index_ = std::move(index);
    s.elems_ = std::move(elems);
    return s;
}

bool SharpGroup::contains(const Element& g) const { return member_ && member_(g); }

BitVec SharpGroup::coords(const Element& x) const
{
    if (!contains(x)) throw PreconditionError("upsilon: " + g_->format(x) + " is not in the subgroup");
    auto it = index_.find(reduce_(x));
    if (it == index_.end()) throw PreconditionError("upsilon: " + g_->format(x) + " is missing from the model");
    return coords_[it->second];
}

SharpGroup centralizer_sharp(const Group& g, const Element& z, bool extended)
{
    const Element zi = g.inv(z);
    const Group* gp = &g;
    if (extended)
        return make_sharp(g, g.extended_centralizer(z), [gp, z, zi](const Element& x) {
            Element c = gp->mul(gp->mul(gp->inv(x), z), x);
            return c == z || c == zi;
        });
    return make_sharp(g, g.centralizer(z), [gp, z](const Element& x) { return commutes(*gp, x, z); });
}

// ---------------------------------------------------------------------------
// FzGroup

FzGroup::FzGroup(const Group& g, const Element& z, const std::vector<Element>& root_candidates)
    : g_(&g), z_(z), type_(g.type_of(z))
{
    sharp_ = centralizer_sharp(g, z, type_ == ElementType::Type2);
    root_ = F2Subspace(ambient());
    auto consider = [&](const Element& c) {
        Element x = c;
        for (int k = 0; k < 64; ++k) {
            if (x == z) {
                roots_.push_back(c);
                root_.insert(local(c));
                return;
            }
            Element y = g.mul(x, x);
            if (y == x) return;
            if (magnitude(g, y) > 2 * magnitude(g, z) + 2 && magnitude(g, y) > magnitude(g, x)) return;
            x = y;
        }
    };
    consider(z);
    for (const auto& c : root_candidates) consider(c);
}

BitVec FzGroup::local(const Element& g, int t) const
{
    BitVec v = sharp_.coords(g);
    if (type_ == ElementType::Type1) {
        v.resize(sharp_.dim() + 1);
        if (t & 1) v.set(sharp_.dim());
    }
    return v;
}

int FzGroup::w(const Element& g) const { return commutes(*g_, g, z_) ? 0 : 1; }

// ---------------------------------------------------------------------------
// LcGroup

std::optional<BitVec> LcGroup::image(const Element& z, const Element& g, int t) const
{
    auto v = ambient_image_(z, g, t);
    if (!v) return std::nullopt;
    return quotient_->coords(*v);
}

std::string LcGroup::format(const BitVec& v, const std::vector<std::tuple<Element, Element, int>>& hints) const
{
    if (v.is_zero()) return "0";
    auto name = [&](const Element& g, int t) {
        if (g_->is_identity(g)) return std::string(t ? "t" : "1");
        return bracket(*g_, g) + (t ? "+t" : "");
    };
    auto try_list = [&](const std::vector<std::tuple<Element, Element, int>>& list) -> std::optional<std::string> {
        for (const auto& [z, g, t] : list) {
            auto im = image(z, g, t);
            if (im && *im == v) return name(g, t);
        }
        return std::nullopt;
    };
    for (const auto& [z, g, t] : hints) {
        auto im = image(z, g, t);
        if (t && im && *im == v && image(z, g, 0)->is_zero()) return "t";
    }
    if (auto s = try_list(hints)) return *s;
    if (auto s = try_list(names_)) return *s;
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < v.size(); ++i) os << (i ? "," : "") << v.get(i);
    os << ")";
    return os.str();
}

namespace {

struct Vertex {
    Element z;
    FzGroup f;
    int offset = 0;
};

} // namespace

LcGroup l_of_class_window(const Group& g, const Element& rep0, int window, const std::vector<Element>& seeds)
{
    LcGroup out;
    out.g_ = &g;
    out.rep_ = g.cl_canonical(rep0);
    const bool finite = g.is_finite();
    out.source_ = finite ? "finite" : "window " + std::to_string(window);

    std::vector<Element> pool = g.window(window);
    std::set<Element, ElementLess> in_pool(pool.begin(), pool.end());
    std::map<Element, std::vector<Element>, ElementLess> roots_of;
    for (const auto& u : pool) {
        Element u2 = g.mul(u, u);
        if (in_pool.count(u2)) roots_of[u2].push_back(u);
    }
    std::vector<Element> conj_by;
    for (const auto& x : g.generator_elements()) {
        conj_by.push_back(x);
        conj_by.push_back(g.inv(x));
    }

    bool closed = true;
    std::map<Element, int, ElementLess> vid;
    std::vector<Element> order;
    std::deque<Element> todo;
    auto visit = [&](const Element& v) {
        if (!in_pool.count(v)) {
            closed = false;
            return;
        }
        if (vid.count(v)) return;
        vid[v] = -1;
        order.push_back(v);
        todo.push_back(v);
    };
    visit(out.rep_);
    for (const auto& s : seeds) {
        if (g.cl_canonical(s) != out.rep_) throw PreconditionError("upsilon: seed " + g.format(s) + " is not in the class");
        visit(s);
    }
    while (!todo.empty()) {
        Element v = todo.front();
        todo.pop_front();
        visit(g.mul(v, v));
        if (g.type_of(v) == ElementType::Type3) visit(g.inv(v));
        for (const auto& x : conj_by) visit(g.conj(g.inv(x), v));
        auto it = roots_of.find(v);
        if (it != roots_of.end())
            for (const auto& u : it->second) visit(u);
    }
    std::sort(order.begin(), order.end(), ElementLess{});

    std::vector<Vertex> vs;
    int total = 0;
    std::int64_t need = 0;
    for (const auto& v : order) {
        vid[v] = static_cast<int>(vs.size());
        Vertex vx{v, FzGroup(g, v, pool), total};
        total += vx.f.ambient();
        need = std::max(need, magnitude(g, v) + vx.f.sharp().period());
        vs.push_back(std::move(vx));
    }
    out.vertex_count_ = static_cast<int>(vs.size());
    out.exact_ = finite || (closed && need <= window);

    auto embed = [&vs, total](int i, const BitVec& local) {
        BitVec v(total);
        for (int k = 0; k < local.size(); ++k)
            if (local.get(k)) v.set(vs[i].offset + k);
        return v;
    };
    F2Subspace rel(total);
    for (int i = 0; i < static_cast<int>(vs.size()); ++i) {
        const FzGroup& f = vs[i].f;
        for (const auto& r : f.roots()) rel.insert(embed(i, f.local(r)));
        const auto& basis = f.sharp().basis();
        // ([b], t^j) for the basis, and t alone for type 1
        std::vector<std::pair<Element, int>> gens;
        for (const auto& b : basis) gens.emplace_back(b, 0);
        if (f.type() == ElementType::Type1) gens.emplace_back(g.identity(), 1);
        auto arrow = [&](const Element& target, const std::function<std::pair<Element, int>(const Element&, int)>& phi) {
            auto it = vid.find(target);
            if (it == vid.end() || it->second < 0) return;
            const FzGroup& ft = vs[it->second].f;
            for (const auto& [b, t] : gens) {
                auto [gb, tb] = phi(b, t);
                BitVec loc = ft.local(gb, ft.type() == ElementType::Type1 ? tb : 0);
                rel.insert(embed(i, f.local(b, t)) ^ embed(it->second, loc));
            }
        };
        const Element& z = vs[i].z;
        const Element z2 = g.mul(z, z);
        const ElementType t2 = g.type_of(z2);
        if (f.type() == ElementType::Type2 && t2 == ElementType::Type1)
            arrow(z2, [&](const Element& b, int) { return std::make_pair(b, f.w(b)); });
        else
            arrow(z2, [](const Element& b, int t) { return std::make_pair(b, t); });
        if (f.type() == ElementType::Type3)
            arrow(g.inv(z), [](const Element& b, int t) { return std::make_pair(b, t); });
        for (const auto& x : conj_by) {
            const Element xi = g.inv(x);
            arrow(g.conj(xi, z), [&](const Element& b, int t) { return std::make_pair(g.conj(xi, b), t); });
        }
    }
    out.quotient_.emplace(rel);

    auto shared_vs = std::make_shared<std::vector<Vertex>>(std::move(vs));
    auto shared_vid = std::make_shared<std::map<Element, int, ElementLess>>(std::move(vid));
    out.ambient_image_ = [shared_vs, shared_vid, total](const Element& z, const Element& x, int t) -> std::optional<BitVec> {
        auto it = shared_vid->find(z);
        if (it == shared_vid->end()) return std::nullopt;
        const Vertex& vx = (*shared_vs)[it->second];
        BitVec local = vx.f.local(x, t);
        BitVec v(total);
        for (int k = 0; k < local.size(); ++k)
            if (local.get(k)) v.set(vx.offset + k);
        return v;
    };
    // names: elements of the model at the representative, then t
    const Vertex& r0 = (*shared_vs)[shared_vid->at(out.rep_)];
    for (int t = 0; t < (r0.f.type() == ElementType::Type1 ? 2 : 1); ++t)
        for (const auto& x : r0.f.sharp().model())
            if (r0.f.sharp().contains(x)) out.names_.emplace_back(out.rep_, x, t);
    return out;
}

bool has_closed_form(const Group& g) { return g.family() == Family::SemidirectZnC2; }

LcGroup l_of_class_closed(const Group& g, const Element& rep0)
{
    if (!has_closed_form(g)) throw PreconditionError("upsilon: no closed form for " + g.name());
    const auto& s = static_cast<const SemidirectZnC2&>(g);
    const int n = s.rank();
    LcGroup out;
    out.g_ = &g;
    out.rep_ = g.cl_canonical(rep0);
    out.source_ = "closed form";
    out.exact_ = true;
    const Element rep = out.rep_;
    const Group* gp = &g;
    if (g.is_identity(rep)) {
        // L([1]) = C_2 on t
        F2Subspace w(1);
        out.quotient_.emplace(w);
        out.ambient_image_ = [gp, rep](const Element& z, const Element& x, int t) -> std::optional<BitVec> {
            if (gp->cl_canonical(z) != rep) return std::nullopt;
            if (!commutes(*gp, x, z)) throw PreconditionError("upsilon: " + gp->format(x) + " is not in G_z");
            BitVec v(1);
            if (t & 1) v.set(0);
            return v;
        };
        out.names_.emplace_back(rep, g.identity(), 1);
        return out;
    }
    // L(c) = G_# / <u mod 2>, u the odd part of the representative
    F2Subspace w(n + 1);
    {
        BitVec u(n + 1);
        auto v = s.vec(rep);
        for (int i = 0; i < n; ++i)
            if (fmod(v[i], 2)) u.set(i);
        w.insert(u);
    }
    out.quotient_.emplace(w);
    out.ambient_image_ = [&s, rep, n](const Element& z, const Element& x, int) -> std::optional<BitVec> {
        if (s.cl_canonical(z) != rep) return std::nullopt;
        BitVec v(n + 1);
        auto xv = s.vec(x);
        for (int i = 0; i < n; ++i)
            if (fmod(xv[i], 2)) v.set(i);
        if (s.sign_bit(x)) v.set(n);
        return v;
    };
    for (int mask = 1; mask < (1 << (n + 1)); ++mask) {
        std::vector<std::int64_t> v(n);
        for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1;
        out.names_.emplace_back(rep, s.make_element(v, (mask >> n) & 1), 0);
    }
    std::sort(out.names_.begin(), out.names_.end(), [](const auto& a, const auto& b) {
        return ElementLess{}(std::get<1>(a), std::get<1>(b));
    });
    return out;
}

LcGroup l_of_class(const Group& g, const Element& rep, int window, const std::vector<Element>& seeds)
{
    if (has_closed_form(g)) return l_of_class_closed(g, rep);
    return l_of_class_window(g, rep, window, seeds);
}

// ---------------------------------------------------------------------------
// Upsilon

std::string JValue::to_string() const
{
    if (terms.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < terms.size(); ++i) s += (i ? "; " : "") + terms[i].text;
    return s;
}

UpsilonSummand upsilon_summand(const Group& g, const Element& a, const Element& b)
{
    UpsilonSummand s{g.mul(a, b), b, 0};
    switch (g.type_of(s.z)) {
    case ElementType::Type1: s.t = 1; break;
    case ElementType::Type2: break;
    case ElementType::Type3:
        throw PreconditionError("upsilon: <" + g.format(a) + ", " + g.format(b) + "> has a product of type 3");
    }
    return s;
}

namespace {

// L(c) per (group, class, window); recomputed with more seeds when a
// summand lies outside the cached diagram
const LcGroup& cached_class(const Group& g, const Element& rep, int window, const std::vector<UpsilonSummand>& list)
{
    struct Entry {
        std::vector<Element> seeds;
        LcGroup l;
    };
    static thread_local std::map<std::tuple<std::uint32_t, std::vector<std::int64_t>, int>, Entry> cache;
    auto key = std::make_tuple(g.id(), rep.code, window);
    auto it = cache.find(key);
    bool fresh = it == cache.end();
    if (!fresh)
        for (const auto& s : list)
            if (!it->second.l.image(s.z, g.identity())) fresh = true;
    if (fresh) {
        std::vector<Element> seeds = it == cache.end() ? std::vector<Element>{} : it->second.seeds;
        for (const auto& s : list) seeds.push_back(s.z);
        std::sort(seeds.begin(), seeds.end(), ElementLess{});
        seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
        LcGroup l = l_of_class(g, rep, window, seeds);
        it = cache.insert_or_assign(key, Entry{std::move(seeds), std::move(l)}).first;
    }
    return it->second.l;
}

} // namespace

JValue upsilon_eval(const ArfExpression& e, int window)
{
    if (e.flavor() != ArfFlavor::GroupPairs) throw PreconditionError("upsilon: group expression expected");
    const Group& g = *e.group_ptr();
    std::map<Element, std::vector<UpsilonSummand>, ElementLess> by_class;
    for (const auto& p : e.group_pairs()) {
        UpsilonSummand s = upsilon_summand(g, p.a, p.b);
        by_class[g.cl_canonical(s.z)].push_back(s);
    }
    JValue out;
    for (const auto& [rep, list] : by_class) {
        // the squaring arrows out of each summand's vertex stay inside
        std::int64_t mag = 0;
        for (const auto& s : list) mag = std::max(mag, magnitude(g, s.z));
        const int w = g.is_finite() ? 0 : static_cast<int>(std::max<std::int64_t>(window, 2 * mag + 4));
        const LcGroup& l = cached_class(g, rep, w, list);
        BitVec acc(l.dim());
        std::vector<std::tuple<Element, Element, int>> hints;
        for (const auto& s : list) {
            auto im = l.image(s.z, s.h, s.t);
            if (!im) throw UnknownError("upsilon: " + g.format(s.z) + " lies outside the window");
            acc ^= *im;
            hints.emplace_back(s.z, s.h, s.t);
        }
        if (acc.is_zero()) continue;
        if (!l.exact()) out.exact = false;
        out.terms.push_back(JTerm{rep, acc, "L(" + bracket(g, rep) + "): " + l.format(acc, hints)});
    }
    return out;
}

std::string verdict_name(UpsilonVerdict v)
{
    switch (v) {
    case UpsilonVerdict::Distinct: return "Distinct";
    case UpsilonVerdict::SameImage: return "SameImage";
    case UpsilonVerdict::Equal: return "Equal";
    case UpsilonVerdict::Unknown: return "Unknown";
    }
    return "?";
}

bool has_two_ends(const Group& g)
{
    if (g.family() == Family::PullbackCyclic || g.family() == Family::PullbackDihedral) return true;
    if (g.family() == Family::SemidirectZnC2) return static_cast<const SemidirectZnC2&>(g).rank() == 1;
    return false;
}

UpsilonDecision upsilon_distinguish(const ArfExpression& e1, const ArfExpression& e2, int window, int max_window)
{
    if (!e1.compatible(e2)) throw PreconditionError("upsilon: expressions over different groups");
    const Group& g = *e1.group_ptr();
    const ArfExpression d = e1 + e2;
    UpsilonDecision out;
    for (int w = std::max(window, 1);; w *= 2) {
        JValue v = upsilon_eval(d, w);
        out.transcript.push_back("window " + std::to_string(w) + ": Upsilon(difference) = " + v.to_string() +
                                 (v.exact ? "" : " (not exact)"));
        if (v.is_zero()) {
            out.verdict = UpsilonVerdict::SameImage;
            if (has_two_ends(g)) {
                out.verdict = UpsilonVerdict::Equal;
                out.transcript.push_back(g.name() + " has two ends: Upsilon is injective");
            }
            return out;
        }
        if (v.exact) {
            out.verdict = UpsilonVerdict::Distinct;
            out.witness = v.terms.front().text;
            return out;
        }
        if (g.is_finite() || has_closed_form(g) || w * 2 > max_window) {
            out.verdict = UpsilonVerdict::Unknown;
            out.witness = v.terms.front().text;
            return out;
        }
    }
}

int j_dimension(const groups::FiniteGroupPtr& g)
{
    int d = 0;
    for (const auto& cls : g->cl_members()) d += l_of_class_window(*g, g->element(cls.front()), 0).dim();
    return d;
}

// ---------------------------------------------------------------------------
// Sigma(G)

SigmaSummand::SigmaSummand(const groups::FiniteGroupPtr& g, const Element& z) : g_(g), z_(z), type_(g->type_of(z))
{
    const FiniteGroup& G = *g;
    const Element zi = G.inv(z);
    // members of the extended centralizer (type 2) or of G_z
    std::vector<Element> base;
    for (int i = 0; i < G.n(); ++i) {
        Element x = G.element(i);
        Element c = G.conj(G.inv(x), z);
        if (c == z || (type_ == ElementType::Type2 && c == zi)) base.push_back(x);
    }
    auto w = [&](const Element& x) { return commutes(G, x, z) ? 0 : 1; };
    for (const auto& x : base) {
        if (type_ == ElementType::Type2) {
            for (int j = w(x); j < 4; j += 2) elems_.push_back(x), tpow_.push_back(j);
        } else {
            elems_.push_back(x), tpow_.push_back(0);
        }
    }
    const int n = static_cast<int>(elems_.size());
    std::map<std::pair<int, int>, int> index;
    for (int i = 0; i < n; ++i) index[{G.index(elems_[i]), tpow_[i]}] = i;
    auto mul = [&](int a, int b) {
        return index.at({G.index(G.mul(elems_[a], elems_[b])), (tpow_[a] + tpow_[b]) % 4});
    };
    SharpCore core = sharp_core(n, index.at({G.identity_index(), 0}), mul);
    sharp_dim_ = core.dim;
    const int amb = core.dim + (type_ == ElementType::Type1 ? 1 : 0);
    for (int i = 0; i < n; ++i) {
        BitVec v = mask_to_bits(core.coords[i], core.dim);
        v.resize(amb);
        coords_.push_back(v);
    }
    F2Subspace rel(amb);
    if (type_ == ElementType::Type1) rel.insert(model_coords(z, 0));
    if (type_ == ElementType::Type2) rel.insert(model_coords(z, 2));
    quotient_.emplace(rel);
}

int SigmaSummand::model_index(const Element& x, int tp) const
{
    for (std::size_t i = 0; i < elems_.size(); ++i)
        if (elems_[i] == x && tpow_[i] == tp) return static_cast<int>(i);
    throw PreconditionError("eta: " + g_->format(x) + " is outside the model");
}

BitVec SigmaSummand::model_coords(const Element& x, int tp) const
{
    return coords_[model_index(x, type_ == ElementType::Type2 ? ((tp % 4) + 4) % 4 : 0)];
}

bool SigmaSummand::is_cycle(const TotChain& c) const
{
    if (type_ == ElementType::Type3) return (c.n3 & 1) == (c.n4 & 1);
    if (type_ == ElementType::Type2) {
        int s = 0;
        for (const auto& [a, x] : c.terms) s += commutes(*g_, x, z_) ? 0 : 1;
        return (s & 1) == ((c.n3 - c.n4) & 1);
    }
    return true;
}

BitVec SigmaSummand::eta(const TotChain& c) const
{
    if (!is_cycle(c)) throw PreconditionError("eta: chain is not a cycle");
    const FiniteGroup& G = *g_;
    Element prod = G.identity();
    for (const auto& [a, x] : c.terms) prod = G.mul(prod, x);
    BitVec v;
    switch (type_) {
    case ElementType::Type1:
        v = model_coords(prod, 0);
        if ((c.n3 + c.n4) & 1) v.flip(sharp_dim_);
        break;
    case ElementType::Type2: {
        int n = 0, extra = c.n1 + c.n2 + c.n4;
        for (const auto& [a, x] : c.terms) {
            int wx = commutes(G, x, z_) ? 0 : 1;
            n += wx;
            extra += (a ? 1 : 0) * wx;
        }
        v = model_coords(prod, n + 2 * extra);
        break;
    }
    case ElementType::Type3:
        v = model_coords(G.mul(prod, G.pow(z_, c.n1 + c.n2 + c.n3)), 0);
        break;
    }
    return quotient_->coords(v);
}

std::vector<std::pair<int, TotChain>> eta_relation_instances(const FiniteGroup& G, const Element& z)
{
    const Element zi = G.inv(z);
    std::vector<Element> bar;
    for (int i = 0; i < G.n(); ++i) {
        Element x = G.element(i);
        Element c = G.conj(G.inv(x), z);
        if (c == z || c == zi) bar.push_back(x);
    }
    auto in_gz = [&](const Element& x) { return commutes(G, x, z); };
    // a in {z, z^-1} as the flag "a = z^-1"; for type 1 only a = z
    std::vector<bool> as{false};
    if (zi != z) as.push_back(true);
    auto elem = [&](bool a) { return a ? zi : z; };
    auto flag = [&](const Element& a) { return a != z; };

    std::vector<std::pair<int, TotChain>> out;
    for (bool a : as)
        for (const auto& g1 : bar)
            for (const auto& g2 : bar) {
                TotChain c;
                c.terms = {{flag(G.conj(G.inv(g1), elem(a))), g2}, {a, g1}, {a, G.mul(g1, g2)}};
                out.emplace_back(1, c);
            }
    {
        TotChain c;
        c.n1 = c.n2 = 1;
        out.emplace_back(2, c);
    }
    for (bool a : as) {
        TotChain c;
        (a ? c.n2 : c.n1) = 1;
        c.n3 = c.n4 = 1;
        out.emplace_back(3, c);
    }
    {
        TotChain c;
        c.n3 = c.n4 = 2;
        out.emplace_back(3, c);
    }
    {
        TotChain c;
        c.terms = {{false, z}};
        c.n3 = c.n4 = 1;
        out.emplace_back(4, c);
    }
    for (const auto& x : bar) {
        TotChain c;
        c.terms = {{false, x}, {true, x}};
        if (!in_gz(x)) c.n3 = c.n4 = 1;
        out.emplace_back(5, c);
    }
    for (const auto& g1 : bar)
        for (const auto& g2 : bar) {
            TotChain c;
            c.terms = {{false, g1}, {false, g2}, {false, G.mul(g1, g2)}};
            if (!in_gz(g1) && !in_gz(g2)) c.n3 = c.n4 = 1;
            out.emplace_back(6, c);
        }
    return out;
}

int sigma_dimension(const groups::FiniteGroupPtr& g)
{
    const FiniteGroup& G = *g;
    int d = 0;
    std::set<int> seen;
    for (const auto& cls : G.conj_classes()) {
        const int ci = G.conj_class_of(cls.front());
        if (seen.count(ci)) continue;
        seen.insert(ci);
        Element z = G.element(cls.front());
        if (G.type_of(z) == ElementType::Type3) seen.insert(G.conj_class_of(G.inv_index(cls.front())));
        d += SigmaSummand(g, z).dim();
    }
    return d;
}

} // namespace qarf
