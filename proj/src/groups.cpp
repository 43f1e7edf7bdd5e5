#include "qarf/groups.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <deque>
#include <numeric>
#include <sstream>

namespace qarf::groups {

namespace {

std::atomic<std::uint32_t> next_group_id{1};

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x)
    {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) p[b] = a;
        else p[a] = b;
    }
};

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Error("integer overflow in group arithmetic");
    return r;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace

bool encoding_less(const Element& a, const Element& b)
{
    if (a.gid != b.gid) return a.gid < b.gid;
    if (a.code.size() != b.code.size()) return a.code.size() < b.code.size();
    for (std::size_t i = 0; i < a.code.size(); ++i) {
        auto za = zigzag(a.code[i]), zb = zigzag(b.code[i]);
        if (za != zb) return za < zb;
    }
    return false;
}

std::size_t ElementHash::operator()(const Element& e) const
{
    std::size_t h = e.gid * 0x9e3779b97f4a7c15ULL;
    for (auto c : e.code) h ^= std::hash<std::int64_t>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::string family_name(Family f)
{
    switch (f) {
    case Family::FiniteTable: return "FiniteTable";
    case Family::FinitePerm: return "FinitePerm";
    case Family::SemidirectZnC2: return "SemidirectZnC2";
    case Family::PullbackCyclic: return "PullbackCyclic";
    case Family::PullbackDihedral: return "PullbackDihedral";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Group

Group::Group(Family f, std::string name) : family_(f), id_(next_group_id++), name_(std::move(name)) {}

std::vector<Element> Group::generator_elements() const
{
    std::vector<Element> out;
    for (const auto& kv : gens_) out.push_back(kv.second);
    return out;
}

void Group::check_same(const Element& a) const
{
    if (a.gid != id_) throw PreconditionError("element does not belong to group " + name_ + " (family mismatch)");
}

Element Group::pow(const Element& g, std::int64_t k) const
{
    Element base = k < 0 ? inv(g) : g;
    std::uint64_t e = k < 0 ? static_cast<std::uint64_t>(-(k + 1)) + 1 : static_cast<std::uint64_t>(k);
    Element r = identity();
    while (e) {
        if (e & 1) r = mul(r, base);
        e >>= 1;
        if (e) base = mul(base, base);
    }
    return r;
}

Element Group::conj(const Element& x, const Element& g) const { return mul(mul(x, g), inv(x)); }

bool Group::is_involution(const Element& g) const { return is_identity(mul(g, g)); }

ElementType Group::type_of(const Element& z) const
{
    Element zi = inv(z);
    if (zi == z) return ElementType::Type1;
    if (are_conjugate(z, zi)) return ElementType::Type2;
    return ElementType::Type3;
}

Element Group::parse(std::string_view word) const { return parse_word(*this, word); }

// ---------------------------------------------------------------------------
// Words

namespace {

struct WordParser {
    const Group& g;
    std::string_view s;
    std::size_t pos = 0;

    void skip()
    {
        while (pos < s.size() && (std::isspace(static_cast<unsigned char>(s[pos])) || s[pos] == '*')) ++pos;
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError("word '" + std::string(s) + "': " + what + " at position " + std::to_string(pos));
    }

    std::int64_t exponent()
    {
        skip();
        if (pos >= s.size() || s[pos] != '^') return 1;
        ++pos;
        bool brace = pos < s.size() && s[pos] == '{';
        if (brace) ++pos;
        bool neg = false;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
            neg = s[pos] == '-';
            ++pos;
        }
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) fail("expected exponent");
        std::int64_t v = std::stoll(std::string(s.substr(start, pos - start)));
        if (brace) {
            if (pos >= s.size() || s[pos] != '}') fail("expected '}'");
            ++pos;
        }
        return neg ? -v : v;
    }

    Element product(bool nested)
    {
        Element acc = g.identity();
        for (;;) {
            skip();
            if (pos >= s.size()) {
                if (nested) fail("unbalanced '('");
                return acc;
            }
            char c = s[pos];
            if (c == ')') {
                if (!nested) fail("unexpected ')'");
                ++pos;
                return acc;
            }
            Element f;
            if (c == '(') {
                ++pos;
                f = product(true);
            } else if (c == '1') {
                ++pos;
                f = g.identity();
            } else if (std::isalpha(static_cast<unsigned char>(c))) {
                std::string name(1, c);
                ++pos;
                bool found = false;
                for (const auto& [n, e] : g.generators()) {
                    if (n == name) {
                        f = e;
                        found = true;
                        break;
                    }
                }
                if (!found) fail("unknown generator '" + name + "'");
            } else {
                fail(std::string("unexpected character '") + c + "'");
            }
            acc = g.mul(acc, g.pow(f, exponent()));
        }
    }
};

} // namespace

Element parse_word(const Group& g, std::string_view word)
{
    WordParser p{g, word};
    return p.product(false);
}

std::string format_word(const std::vector<std::pair<std::string, std::int64_t>>& powers)
{
    std::string out;
    for (const auto& [n, k] : powers) {
        if (k == 0) continue;
        if (!out.empty()) out += "*";
        out += n;
        if (k != 1) out += "^" + std::to_string(k);
    }
    return out.empty() ? "1" : out;
}

// ---------------------------------------------------------------------------
// FiniteGroup

std::shared_ptr<FiniteGroup> FiniteGroup::from_table(std::string name, std::vector<int> table,
                                                     std::vector<std::string> labels,
                                                     std::vector<std::pair<std::string, int>> gens)
{
    std::size_t n = 0;
    while (n * n < table.size()) ++n;
    if (n == 0 || n * n != table.size()) throw PreconditionError("multiplication table is not square");
    auto g = std::shared_ptr<FiniteGroup>(new FiniteGroup(Family::FiniteTable, std::move(name)));
    g->n_ = static_cast<int>(n);
    const int N = g->n_;
    for (int v : table)
        if (v < 0 || v >= N) throw PreconditionError("table entry out of range");
    // Latin square
    for (int a = 0; a < N; ++a) {
        std::vector<char> row(N, 0), col(N, 0);
        for (int b = 0; b < N; ++b) {
            if (row[table[a * N + b]]++) throw PreconditionError("table is not a Latin square (row " + std::to_string(a) + ")");
            if (col[table[b * N + a]]++) throw PreconditionError("table is not a Latin square (column " + std::to_string(a) + ")");
        }
    }
    int e = -1;
    for (int a = 0; a < N && e < 0; ++a) {
        bool ok = true;
        for (int b = 0; b < N && ok; ++b) ok = table[a * N + b] == b && table[b * N + a] == b;
        if (ok) e = a;
    }
    if (e < 0) throw PreconditionError("table has no identity");
    g->identity_ = e;
    g->table_ = std::move(table);
    g->inv_.assign(N, -1);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            if (g->table_[a * N + b] == e) g->inv_[a] = b;
    for (int a = 0; a < N; ++a)
        if (g->inv_[a] < 0 || g->table_[g->inv_[a] * N + a] != e) throw PreconditionError("element without inverse");
    // associativity; exhaustive for moderate orders
    if (N <= 400) {
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                int ab = g->table_[a * N + b];
                for (int c = 0; c < N; ++c)
                    if (g->table_[ab * N + c] != g->table_[a * N + g->table_[b * N + c]])
                        throw PreconditionError("table is not associative");
            }
    }
    if (!labels.empty() && static_cast<int>(labels.size()) != N) throw PreconditionError("label count mismatch");
    g->labels_ = std::move(labels);
    g->finish(std::move(gens));
    return g;
}

std::shared_ptr<FiniteGroup> FiniteGroup::from_permutations(std::string name, int points,
                                                            std::vector<std::pair<std::string, std::vector<int>>> gens,
                                                            int cap)
{
    auto g = std::shared_ptr<FiniteGroup>(new FiniteGroup(Family::FinitePerm, std::move(name)));
    g->points_ = points;
    for (const auto& [n, p] : gens) {
        if (static_cast<int>(p.size()) != points) throw PreconditionError("permutation " + n + " has wrong length");
        std::vector<char> seen(points, 0);
        for (int x : p) {
            if (x < 0 || x >= points || seen[x]++) throw PreconditionError("generator " + n + " is not a permutation");
        }
    }
    auto compose = [points](const std::vector<int>& a, const std::vector<int>& b) {
        std::vector<int> r(points);
        for (int i = 0; i < points; ++i) r[i] = a[b[i]];
        return r;
    };
    std::vector<int> id(points);
    std::iota(id.begin(), id.end(), 0);
    std::set<std::vector<int>> seen{id};
    std::deque<std::vector<int>> q{id};
    while (!q.empty()) {
        auto x = q.front();
        q.pop_front();
        for (const auto& [n, p] : gens) {
            auto y = compose(x, p);
            if (seen.insert(y).second) {
                if (static_cast<int>(seen.size()) > cap)
                    throw PreconditionError("permutation group exceeds enumeration cap " + std::to_string(cap));
                q.push_back(std::move(y));
            }
        }
    }
    g->perms_.assign(seen.begin(), seen.end());
    g->n_ = static_cast<int>(g->perms_.size());
    for (int i = 0; i < g->n_; ++i) g->perm_index_[g->perms_[i]] = i;
    g->identity_ = g->perm_index_.at(id);
    const int N = g->n_;
    g->inv_.assign(N, 0);
    for (int i = 0; i < N; ++i) {
        std::vector<int> r(points);
        for (int x = 0; x < points; ++x) r[g->perms_[i][x]] = x;
        g->inv_[i] = g->perm_index_.at(r);
    }
    if (N <= 1024) {
        g->table_.assign(static_cast<std::size_t>(N) * N, 0);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) g->table_[a * N + b] = g->perm_index_.at(compose(g->perms_[a], g->perms_[b]));
    }
    std::vector<std::pair<std::string, int>> named;
    for (const auto& [n, p] : gens) named.emplace_back(n, g->perm_index_.at(p));
    g->finish(std::move(named));
    return g;
}

int FiniteGroup::mul_index(int a, int b) const
{
    if (!table_.empty()) return table_[static_cast<std::size_t>(a) * n_ + b];
    std::vector<int> r(points_);
    for (int i = 0; i < points_; ++i) r[i] = perms_[a][perms_[b][i]];
    return perm_index_.at(r);
}

void FiniteGroup::finish(std::vector<std::pair<std::string, int>> gens)
{
    const int N = n_;
    std::vector<std::pair<std::string, Element>> named;
    std::vector<int> conjugators;
    for (const auto& [n, i] : gens) {
        if (i < 0 || i >= N) throw PreconditionError("generator index out of range");
        named.emplace_back(n, element(i));
        conjugators.push_back(i);
    }
    if (!conjugators.empty() && static_cast<int>(subgroup_closure(*this, conjugators).size()) != N)
        throw PreconditionError("named generators do not generate the group");
    if (conjugators.empty()) {
        conjugators.resize(N);
        std::iota(conjugators.begin(), conjugators.end(), 0);
    }
    set_generators(std::move(named));

    if (labels_.empty()) {
        // shortest positive words in the named generators
        labels_.assign(N, "");
        std::vector<std::vector<std::pair<std::string, std::int64_t>>> words(N);
        std::vector<char> seen(N, 0);
        seen[identity_] = 1;
        std::deque<int> q{identity_};
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            for (const auto& [n, gi] : gens) {
                int y = mul_index(x, gi);
                if (seen[y]) continue;
                seen[y] = 1;
                words[y] = words[x];
                if (!words[y].empty() && words[y].back().first == n) ++words[y].back().second;
                else words[y].emplace_back(n, 1);
                q.push_back(y);
            }
        }
        for (int i = 0; i < N; ++i) labels_[i] = gens.empty() ? "g" + std::to_string(i) : format_word(words[i]);
        labels_[identity_] = "1";
    }

    UnionFind cj(N), cl(N);
    for (int a = 0; a < N; ++a) {
        for (int x : conjugators) {
            int c = mul_index(mul_index(x, a), inv_[x]);
            cj.unite(a, c);
            cl.unite(a, c);
        }
        cl.unite(a, inv_[a]);
        cl.unite(a, mul_index(a, a));
    }
    auto collect = [N](UnionFind& uf, std::vector<int>& cls, std::vector<std::vector<int>>& members) {
        cls.assign(N, -1);
        std::map<int, int> root_to_class;
        for (int a = 0; a < N; ++a) {
            int r = uf.find(a);
            auto it = root_to_class.find(r);
            if (it == root_to_class.end()) {
                it = root_to_class.emplace(r, static_cast<int>(members.size())).first;
                members.emplace_back();
            }
            cls[a] = it->second;
            members[it->second].push_back(a);
        }
    };
    collect(cj, conj_class_, conj_members_);
    collect(cl, cl_class_, cl_members_);
}

int FiniteGroup::index(const Element& g) const
{
    validate(g);
    return static_cast<int>(g.code[0]);
}

void FiniteGroup::validate(const Element& g) const
{
    check_same(g);
    if (g.code.size() != 1 || g.code[0] < 0 || g.code[0] >= n_) throw PreconditionError("invalid finite group element");
}

Element FiniteGroup::mul(const Element& a, const Element& b) const { return element(mul_index(index(a), index(b))); }

Element FiniteGroup::inv(const Element& a) const { return element(inv_[index(a)]); }

std::optional<std::int64_t> FiniteGroup::order(const Element& g) const
{
    int a = index(g), x = a;
    std::int64_t k = 1;
    while (x != identity_) {
        x = mul_index(x, a);
        ++k;
    }
    return k;
}

std::string FiniteGroup::format(const Element& g) const { return labels_[index(g)]; }

std::vector<Element> FiniteGroup::window(int) const
{
    std::vector<Element> out;
    out.reserve(n_);
    for (int i = 0; i < n_; ++i) out.push_back(element(i));
    return out;
}

bool FiniteGroup::are_conjugate(const Element& a, const Element& b) const
{
    return conj_class_[index(a)] == conj_class_[index(b)];
}

Element FiniteGroup::cl_canonical(const Element& g) const
{
    return element(cl_members_[cl_class_[index(g)]].front());
}

std::vector<Element> FiniteGroup::centralizer(const Element& z) const
{
    int zi = index(z);
    std::vector<Element> out;
    for (int x = 0; x < n_; ++x)
        if (mul_index(x, zi) == mul_index(zi, x)) out.push_back(element(x));
    return out;
}

std::vector<Element> FiniteGroup::extended_centralizer(const Element& z) const
{
    int zi = index(z), zinv = inv_[zi];
    std::vector<Element> out;
    for (int x = 0; x < n_; ++x) {
        int c = mul_index(mul_index(inv_[x], zi), x);
        if (c == zi || c == zinv) out.push_back(element(x));
    }
    return out;
}

// ---------------------------------------------------------------------------
// SemidirectZnC2

namespace {
const char* const kAxisNames[] = {"X", "Y", "Z", "W", "V", "U"};
}

SemidirectZnC2::SemidirectZnC2(int rank)
    : Group(Family::SemidirectZnC2, "Z^" + std::to_string(rank) + " x| C2"), n_(rank)
{
    if (rank < 1 || rank > 6) throw PreconditionError("SemidirectZnC2: rank must be in 1..6");
    std::vector<std::pair<std::string, Element>> g;
    for (int i = 0; i < n_; ++i) {
        std::vector<std::int64_t> v(n_, 0);
        v[i] = 1;
        g.emplace_back(kAxisNames[i], make_element(v, 0));
    }
    g.emplace_back("S", make_element(std::vector<std::int64_t>(n_, 0), 1));
    set_generators(std::move(g));
}

Element SemidirectZnC2::make_element(const std::vector<std::int64_t>& v, int s) const
{
    if (static_cast<int>(v.size()) != n_ || (s != 0 && s != 1)) throw PreconditionError("SemidirectZnC2: bad element data");
    std::vector<std::int64_t> c;
    c.reserve(n_ + 1);
    c.push_back(s);
    c.insert(c.end(), v.begin(), v.end());
    return make(std::move(c));
}

std::vector<std::int64_t> SemidirectZnC2::vec(const Element& g) const
{
    validate(g);
    return {g.code.begin() + 1, g.code.end()};
}

int SemidirectZnC2::sign_bit(const Element& g) const
{
    validate(g);
    return static_cast<int>(g.code[0]);
}

void SemidirectZnC2::validate(const Element& g) const
{
    check_same(g);
    if (static_cast<int>(g.code.size()) != n_ + 1 || (g.code[0] != 0 && g.code[0] != 1))
        throw PreconditionError("invalid SemidirectZnC2 element");
}

Element SemidirectZnC2::identity() const { return make_element(std::vector<std::int64_t>(n_, 0), 0); }

Element SemidirectZnC2::mul(const Element& a, const Element& b) const
{
    validate(a);
    validate(b);
    std::vector<std::int64_t> c(n_ + 1);
    c[0] = a.code[0] ^ b.code[0];
    for (int i = 1; i <= n_; ++i) c[i] = checked_add(a.code[i], a.code[0] ? -b.code[i] : b.code[i]);
    return make(std::move(c));
}

Element SemidirectZnC2::inv(const Element& a) const
{
    validate(a);
    if (a.code[0]) return a;
    std::vector<std::int64_t> c(a.code);
    for (int i = 1; i <= n_; ++i) c[i] = -c[i];
    return make(std::move(c));
}

std::optional<std::int64_t> SemidirectZnC2::order(const Element& g) const
{
    validate(g);
    if (g.code[0]) return 2;
    for (int i = 1; i <= n_; ++i)
        if (g.code[i]) return std::nullopt;
    return 1;
}

std::string SemidirectZnC2::format(const Element& g) const
{
    validate(g);
    std::vector<std::pair<std::string, std::int64_t>> w;
    for (int i = 0; i < n_; ++i) w.emplace_back(kAxisNames[i], g.code[i + 1]);
    w.emplace_back("S", g.code[0]);
    return format_word(w);
}

std::vector<Element> SemidirectZnC2::window(int bound) const
{
    std::vector<Element> out;
    std::vector<std::int64_t> v(n_, -bound);
    for (;;) {
        out.push_back(make_element(v, 0));
        out.push_back(make_element(v, 1));
        int i = 0;
        while (i < n_ && v[i] == bound) v[i++] = -bound;
        if (i == n_) break;
        ++v[i];
    }
    std::sort(out.begin(), out.end(), ElementLess{});
    return out;
}

bool SemidirectZnC2::are_conjugate(const Element& a, const Element& b) const
{
    validate(a);
    validate(b);
    if (a.code[0] != b.code[0]) return false;
    if (a.code[0]) {
        for (int i = 1; i <= n_; ++i)
            if (floor_mod(a.code[i] - b.code[i], 2) != 0) return false;
        return true;
    }
    bool same = true, neg = true;
    for (int i = 1; i <= n_; ++i) {
        same = same && a.code[i] == b.code[i];
        neg = neg && a.code[i] == -b.code[i];
    }
    return same || neg;
}

std::vector<std::int64_t> SemidirectZnC2::odd_part(const std::vector<std::int64_t>& v)
{
    std::vector<std::int64_t> w = v;
    bool nonzero = std::any_of(w.begin(), w.end(), [](std::int64_t x) { return x != 0; });
    if (!nonzero) return w;
    while (std::all_of(w.begin(), w.end(), [](std::int64_t x) { return x % 2 == 0; }))
        for (auto& x : w) x /= 2;
    return w;
}

Element SemidirectZnC2::cl_canonical(const Element& g) const
{
    validate(g);
    auto v = vec(g);
    if (g.code[0] || std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; })) return identity();
    auto w = odd_part(v);
    for (auto x : w) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : w) y = -y;
        break;
    }
    return make_element(w, 0);
}

std::vector<Element> SemidirectZnC2::centralizer(const Element& z) const
{
    validate(z);
    if (is_identity(z)) return generator_elements();
    if (z.code[0]) return {z};
    std::vector<Element> out;
    for (int i = 0; i < n_; ++i) out.push_back(generators()[i].second);
    return out;
}

std::vector<Element> SemidirectZnC2::extended_centralizer(const Element& z) const
{
    validate(z);
    if (is_identity(z)) return generator_elements();
    if (z.code[0]) return {z};
    return generator_elements();
}

// ---------------------------------------------------------------------------
// PullbackGroup

PullbackGroup::PullbackGroup(std::string name, bool dihedral, FiniteGroupPtr e, std::int64_t m,
                             std::vector<DihedralM> hom, std::vector<std::pair<std::string, Element>> gens,
                             Formatter fmt)
    : Group(dihedral ? Family::PullbackDihedral : Family::PullbackCyclic, std::move(name)),
      dihedral_(dihedral),
      e_(std::move(e)),
      m_(m),
      hom_(std::move(hom)),
      fmt_(std::move(fmt))
{
    if (!e_) throw PreconditionError("pull-back: missing finite group E");
    if (m_ < 1) throw PreconditionError("pull-back: modulus must be positive");
    const int n = e_->n();
    if (static_cast<int>(hom_.size()) != n) throw PreconditionError("pull-back: homomorphism has wrong length");
    for (auto& h : hom_) {
        if (!dihedral_ && h.eps != 0) throw PreconditionError("pull-back: cyclic target has no reflections");
        if (h.eps != 0 && h.eps != 1) throw PreconditionError("pull-back: bad reflection flag");
        h.k = floor_mod(h.k, m_);
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (!(dm_mul(hom_[a], hom_[b]) == hom_[e_->mul_index(a, b)]))
                throw PreconditionError("pull-back: map E -> D_m is not a homomorphism");
    for (const auto& [nm, g] : gens) validate(g);
    set_generators(std::move(gens));
}

DihedralM PullbackGroup::dm_mul(DihedralM a, DihedralM b) const
{
    return {floor_mod(a.k + (a.eps ? -b.k : b.k), m_), a.eps ^ b.eps};
}

DihedralM PullbackGroup::project(std::int64_t i, int eps) const { return {floor_mod(i, m_), eps}; }

Element PullbackGroup::make_element(std::int64_t i, int eps, int e) const
{
    Element g = dihedral_ ? make({i, eps, e}) : make({i, e});
    if (!dihedral_ && eps != 0) throw PreconditionError("pull-back: cyclic family has no reflections");
    validate(g);
    return g;
}

void PullbackGroup::validate(const Element& g) const
{
    check_same(g);
    const std::size_t want = dihedral_ ? 3 : 2;
    if (g.code.size() != want) throw PreconditionError("invalid pull-back element encoding");
    int e = epart(g);
    if (e < 0 || e >= e_->n()) throw PreconditionError("pull-back: E index out of range");
    int eps = refl(g);
    if (eps != 0 && eps != 1) throw PreconditionError("pull-back: bad reflection flag");
    if (!(project(rot(g), eps) == hom_[e]))
        throw PreconditionError("pull-back: projections to D_m disagree (not an element of the pull-back)");
}

Element PullbackGroup::identity() const
{
    return dihedral_ ? make({0, 0, e_->identity_index()}) : make({0, e_->identity_index()});
}

Element PullbackGroup::mul(const Element& a, const Element& b) const
{
    validate(a);
    validate(b);
    int ea = refl(a), eb = refl(b);
    std::int64_t i = checked_add(rot(a), ea ? -rot(b) : rot(b));
    int e = e_->mul_index(epart(a), epart(b));
    return dihedral_ ? make({i, ea ^ eb, e}) : make({i, e});
}

Element PullbackGroup::inv(const Element& a) const
{
    validate(a);
    int e = e_->inv_index(epart(a));
    if (refl(a)) return make({rot(a), 1, e});
    return dihedral_ ? make({-rot(a), 0, e}) : make({-rot(a), e});
}

std::optional<std::int64_t> PullbackGroup::order(const Element& g) const
{
    validate(g);
    if (refl(g)) {
        int e = epart(g);
        int e2 = e_->mul_index(e, e);
        return 2 * *e_->order(e_->element(e2));
    }
    if (rot(g) != 0) return std::nullopt;
    return e_->order(e_->element(epart(g)));
}

std::string PullbackGroup::format(const Element& g) const
{
    validate(g);
    if (fmt_) return fmt_(*this, g);
    std::string d = format_word({{"T", rot(g)}, {"S", refl(g)}});
    return "(" + d + "|" + e_->labels()[epart(g)] + ")";
}

std::vector<Element> PullbackGroup::window(int bound) const
{
    std::vector<Element> out;
    for (std::int64_t i = -bound; i <= bound; ++i)
        for (int eps = 0; eps <= (dihedral_ ? 1 : 0); ++eps)
            for (int e = 0; e < e_->n(); ++e)
                if (project(i, eps) == hom_[e]) out.push_back(dihedral_ ? make({i, eps, e}) : make({i, e}));
    std::sort(out.begin(), out.end(), ElementLess{});
    return out;
}

bool PullbackGroup::are_conjugate(const Element& a, const Element& b) const
{
    validate(a);
    validate(b);
    if (refl(a) != refl(b)) return false;
    const FiniteGroup& E = *e_;
    int ea = epart(a), eb = epart(b);
    std::int64_t i = rot(a), j = rot(b);
    for (int f = 0; f < E.n(); ++f) {
        if (E.mul_index(E.mul_index(f, ea), E.inv_index(f)) != eb) continue;
        const DihedralM h = hom_[f];
        if (!refl(a)) {
            std::int64_t target = h.eps ? -i : i;
            if (target == j) return true;
        } else {
            // conjugate of T^i S by T^b S^delta, b = k (mod m):
            // delta = 0: T^{i+2b} S; delta = 1: T^{2b-i} S
            std::int64_t d = h.eps ? j + i : j - i;
            if (floor_mod(d, 2) == 0 && floor_mod(d / 2 - h.k, m_) == 0) return true;
        }
    }
    return false;
}

bool PullbackGroup::level_related(std::int64_t x_rot, int x_e, std::int64_t y_rot, int y_e) const
{
    // (T^X, x) is conjugate to (T^Y, y) or to its inverse, |X| = |Y| != 0.
    const FiniteGroup& E = *e_;
    const int sgn = ((x_rot > 0) == (y_rot > 0)) ? 1 : -1;
    for (int f = 0; f < E.n(); ++f) {
        const int conj_sign = hom_[f].eps ? -1 : 1;
        int c = E.mul_index(E.mul_index(f, x_e), E.inv_index(f));
        if (c == y_e && conj_sign == sgn) return true;
        int ci = E.mul_index(E.mul_index(f, E.inv_index(x_e)), E.inv_index(f));
        if (ci == y_e && -conj_sign == sgn) return true;
    }
    return false;
}

Element PullbackGroup::cl_canonical(const Element& g) const
{
    validate(g);
    const FiniteGroup& E = *e_;
    auto sq = [&](int x) { return E.mul_index(x, x); };
    auto odd_core = [&](int x) {
        // repeated squaring until the order is odd
        for (;;) {
            auto o = *E.order(E.element(x));
            if (o % 2) return x;
            x = sq(x);
        }
    };
    if (refl(g) || rot(g) == 0) {
        // finite order: reduce to the odd core in E
        int h = refl(g) ? sq(epart(g)) : epart(g);
        h = odd_core(h);
        std::set<int> orb;
        std::vector<int> powers;
        int x = h;
        while (std::find(powers.begin(), powers.end(), x) == powers.end()) {
            powers.push_back(x);
            x = sq(x);
        }
        for (int p : powers)
            for (int f = 0; f < E.n(); ++f) {
                orb.insert(E.mul_index(E.mul_index(f, p), E.inv_index(f)));
                orb.insert(E.mul_index(E.mul_index(f, E.inv_index(p)), E.inv_index(f)));
            }
        for (int e = 0; e < E.n(); ++e) {
            if (!(hom_[e] == DihedralM{0, 0})) continue;
            if (orb.count(odd_core(e))) return dihedral_ ? make({0, 0, e}) : make({0, e});
        }
        throw Error("pull-back canonicalizer: no member at level zero");
    }
    // infinite order: search the lowest level of the class
    const std::int64_t a = rot(g);
    const int e = epart(g);
    std::int64_t A = a < 0 ? -a : a;
    std::vector<std::int64_t> levels{A};
    while (A % 2 == 0) {
        A /= 2;
        levels.push_back(A);
    }
    for (std::size_t j = levels.size(); j-- > 0;) {
        const std::int64_t L = levels[j];
        for (int c = 0; c < E.n(); ++c) {
            if (!(hom_[c] == project(L, 0))) continue;
            // compare c^{2^{l+j}} at level 2^{l+j} L with e^{2^l} at level 2^l a
            int x = c;
            for (std::size_t t = 0; t < j; ++t) x = sq(x);
            int y = e;
            std::set<std::pair<int, int>> seen;
            bool hit = false;
            while (seen.insert({x, y}).second) {
                if (level_related(L, x, a, y)) {
                    hit = true;
                    break;
                }
                x = sq(x);
                y = sq(y);
            }
            if (hit) return dihedral_ ? make({L, 0, c}) : make({L, c});
        }
    }
    throw Error("pull-back canonicalizer: element not found in its own class");
}

std::vector<Element> PullbackGroup::centralizer(const Element& z) const
{
    validate(z);
    const FiniteGroup& E = *e_;
    const int ez = epart(z);
    std::vector<Element> out;
    auto commutes_e = [&](int f) { return E.mul_index(f, ez) == E.mul_index(ez, f); };
    if (!refl(z)) {
        out.push_back(dihedral_ ? make({m_, 0, E.identity_index()}) : make({m_, E.identity_index()}));
        for (int f = 0; f < E.n(); ++f) {
            if (!commutes_e(f)) continue;
            const DihedralM h = hom_[f];
            if (h.eps && rot(z) != 0) continue;
            out.push_back(dihedral_ ? make({h.k, h.eps, f}) : make({h.k, f}));
        }
    } else {
        for (int f = 0; f < E.n(); ++f) {
            if (!commutes_e(f)) continue;
            const DihedralM h = hom_[f];
            if (h == DihedralM{0, 0}) out.push_back(make({0, 0, f}));
            if (h == project(rot(z), 1)) out.push_back(make({rot(z), 1, f}));
        }
    }
    std::sort(out.begin(), out.end(), ElementLess{});
    return out;
}

std::vector<Element> PullbackGroup::extended_centralizer(const Element& z) const
{
    validate(z);
    const FiniteGroup& E = *e_;
    const int ez = epart(z), ezi = E.inv_index(ez);
    auto conj_e = [&](int f) { return E.mul_index(E.mul_index(f, ez), E.inv_index(f)); };
    std::vector<Element> out;
    if (!refl(z)) {
        out.push_back(dihedral_ ? make({m_, 0, E.identity_index()}) : make({m_, E.identity_index()}));
        for (int f = 0; f < E.n(); ++f) {
            const DihedralM h = hom_[f];
            int c = conj_e(f);
            bool ok;
            if (rot(z) == 0) ok = c == ez || c == ezi;
            else ok = h.eps ? c == ezi : c == ez;
            if (ok) out.push_back(dihedral_ ? make({h.k, h.eps, f}) : make({h.k, f}));
        }
    } else {
        for (int f = 0; f < E.n(); ++f) {
            int c = conj_e(f);
            if (c != ez && c != ezi) continue;
            const DihedralM h = hom_[f];
            if (h == DihedralM{0, 0}) out.push_back(make({0, 0, f}));
            if (h == project(rot(z), 1)) out.push_back(make({rot(z), 1, f}));
        }
    }
    std::sort(out.begin(), out.end(), ElementLess{});
    return out;
}

// ---------------------------------------------------------------------------
// Module operations

std::vector<EquivClass> cl_classes(const Group& g, int window)
{
    std::vector<EquivClass> out;
    if (auto fg = dynamic_cast<const FiniteGroup*>(&g)) {
        for (const auto& mem : fg->cl_members()) {
            EquivClass c;
            c.rep = fg->element(mem.front());
            for (int i : mem) c.members.push_back(fg->element(i));
            c.canonicalizer = fg->canonicalizer_id();
            out.push_back(std::move(c));
        }
        std::sort(out.begin(), out.end(), [](const EquivClass& a, const EquivClass& b) { return encoding_less(a.rep, b.rep); });
        return out;
    }
    std::map<Element, std::vector<Element>, ElementLess> by_rep;
    for (const auto& x : g.window(window)) by_rep[g.cl_canonical(x)].push_back(x);
    for (auto& [rep, mem] : by_rep) {
        EquivClass c;
        c.rep = rep;
        c.members = std::move(mem);
        c.windowed = true;
        c.window = window;
        c.canonicalizer = g.canonicalizer_id();
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Element> involutions(const Group& g, int window)
{
    std::vector<Element> out;
    for (const auto& x : g.window(window))
        if (g.is_involution(x)) out.push_back(x);
    std::sort(out.begin(), out.end(), ElementLess{});
    return out;
}

std::vector<int> subgroup_closure(const FiniteGroup& g, const std::vector<int>& gens)
{
    std::vector<char> seen(g.n(), 0);
    std::vector<int> out{g.identity_index()};
    seen[g.identity_index()] = 1;
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (int s : gens) {
            int y = g.mul_index(out[k], s);
            if (!seen[y]) {
                seen[y] = 1;
                out.push_back(y);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

ElementaryAbelian2::ElementaryAbelian2(FiniteGroupPtr g, std::vector<int> subgroup)
    : g_(std::move(g)), members_(std::move(subgroup))
{
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    std::vector<int> squares;
    for (int h : members_) squares.push_back(g_->mul_index(h, h));
    std::vector<int> M = subgroup_closure(*g_, squares);
    for (int x : M) coord_[x] = 0;
    std::vector<int> span = M;
    for (int h : members_) {
        if (coord_.count(h)) continue;
        if (dim_ >= 64) throw Error("elementary abelian quotient too large");
        const std::uint64_t bit = std::uint64_t{1} << dim_;
        basis_.push_back(h);
        ++dim_;
        std::vector<int> add;
        for (int x : span) {
            int y = g_->mul_index(h, x);
            coord_[y] = coord_.at(x) | bit;
            add.push_back(y);
        }
        span.insert(span.end(), add.begin(), add.end());
    }
    if (span.size() != members_.size()) throw PreconditionError("ElementaryAbelian2: input is not a subgroup");
}

std::uint64_t ElementaryAbelian2::coords(int idx) const
{
    auto it = coord_.find(idx);
    if (it == coord_.end()) throw PreconditionError("ElementaryAbelian2: element outside the subgroup");
    return it->second;
}

ElementaryAbelian2 ab_mod_squares(FiniteGroupPtr g, const std::vector<Element>& gens)
{
    std::vector<int> idx;
    for (const auto& x : gens) idx.push_back(g->index(x));
    auto sub = subgroup_closure(*g, idx);
    return ElementaryAbelian2(std::move(g), std::move(sub));
}

} // namespace qarf::groups
