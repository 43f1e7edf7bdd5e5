#include "qarf/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qarf/arf.hpp"
#include "qarf/error.hpp"
#include "qarf/group_library.hpp"
#include "qarf/k2diff.hpp"
#include "qarf/kinv.hpp"
#include "qarf/upsilon.hpp"

#ifndef QARF_SCENARIO_DIR
#define QARF_SCENARIO_DIR "tools/scenarios"
#endif

namespace qarf::cli {

using groups::Element;
using groups::GroupPtr;
using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Helpers

std::string trim(std::string s)
{
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && issp(s[i])) ++i;
    return s.substr(i);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(std::string_view text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
}

const json& field(const json& j, const std::string& key, const std::string& ctx)
{
    if (!j.is_object() || !j.contains(key)) throw ParseError(ctx + ": missing field '" + key + "'");
    return j.at(key);
}

template <class T>
T field_as(const json& j, const std::string& key, const std::string& ctx)
{
    const json& v = field(j, key, ctx);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ParseError(ctx + ": field '" + key + "' has the wrong type");
    }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

// Named generators as [["X", value], ...].
template <class V>
std::vector<std::pair<std::string, V>> named_list(const json& j, const std::string& ctx)
{
    if (!j.is_array()) throw ParseError(ctx + ": field 'generators' must be a list of [name, value] pairs");
    std::vector<std::pair<std::string, V>> out;
    for (const auto& item : j) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_string())
            throw ParseError(ctx + ": field 'generators' entries must be [name, value]");
        try {
            out.emplace_back(item[0].get<std::string>(), item[1].get<V>());
        } catch (const json::exception&) {
            throw ParseError(ctx + ": generator '" + item[0].get<std::string>() + "' has the wrong value type");
        }
    }
    return out;
}

groups::FiniteGroupPtr finite_from_json(const json& j, const std::string& ctx)
{
    if (j.is_string()) {
        auto g = std::dynamic_pointer_cast<const groups::FiniteGroup>(groups::group_by_name(j.get<std::string>()));
        if (!g) throw ParseError(ctx + ": group '" + j.get<std::string>() + "' is not finite");
        return g;
    }
    const auto family = field_as<std::string>(j, "family", ctx);
    const auto name = j.value("name", std::string("custom"));
    if (family == "finite-table") {
        auto labels = field_as<std::vector<std::string>>(j, "labels", ctx);
        const json& t = field(j, "table", ctx);
        std::vector<int> table;
        for (const auto& row : t) {
            if (row.is_array()) {
                for (const auto& x : row) table.push_back(x.get<int>());
            } else {
                table.push_back(row.get<int>());
            }
        }
        if (table.size() != labels.size() * labels.size())
            throw ParseError(ctx + ": field 'table' must have " + std::to_string(labels.size() * labels.size()) +
                             " entries");
        return groups::FiniteGroup::from_table(name, std::move(table), std::move(labels),
                                               named_list<int>(field(j, "generators", ctx), ctx));
    }
    if (family == "finite-perm") {
        const int points = field_as<int>(j, "points", ctx);
        const int cap = j.value("cap", 10000);
        return groups::FiniteGroup::from_permutations(
            name, points, named_list<std::vector<int>>(field(j, "generators", ctx), ctx), cap);
    }
    throw ParseError(ctx + ": field 'family' must name a finite family, got '" + family + "'");
}

// ---------------------------------------------------------------------------
// Context: a group or a ring, and the expressions over it

struct Context {
    GroupPtr group;
    PolyRingPtr ring;
    Poly unit;
    bool reduced = false;

    ArfExpression parse(const std::string& text) const
    {
        if (group) return parse_group_expression(group, text);
        if (reduced) return parse_reduced_expression(ring, text);
        return parse_ring_expression(ring, unit, text);
    }
};

struct ContextOptions {
    std::string group;
    std::string group_file;
    std::string ring;
    std::string unit = "-1";
    bool invert = false;
    bool reduced = false;

    void add_to(CLI::App* app)
    {
        app->add_option("--group", group, "registry name or inline JSON group definition");
        app->add_option("--group-file", group_file, "JSON group definition");
        app->add_option("--ring", ring, "polynomial ring, e.g. Z[X,Y], F2[X^+-1], F2[E]/(E^2)");
        app->add_option("--unit", unit, "unit u of the anti-structure (ring contexts)");
        app->add_flag("--invert-variables", invert, "ring involution X -> X^-1");
        app->add_flag("--reduced", reduced, "reduced pairs <<a,b>> (u = -1, trivial involution)");
    }

    Context build() const
    {
        Context c;
        const int sources = !group.empty() + !group_file.empty() + !ring.empty();
        if (sources != 1) throw ParseError("exactly one of --group, --group-file, --ring is required");
        if (!group.empty()) {
            c.group = group.front() == '{' ? load_group_json(group) : groups::group_by_name(group);
        } else if (!group_file.empty()) {
            c.group = load_group_json(read_file(group_file));
        } else {
            c.ring = parse_ring_descriptor(ring, invert ? PolyInvolution::InvertVariables : PolyInvolution::Trivial);
            c.unit = parse_poly(c.ring, unit);
            c.reduced = reduced;
        }
        return c;
    }

    GroupPtr build_group() const
    {
        Context c = build();
        if (!c.group) throw ParseError("--group or --group-file is required");
        return c.group;
    }
};

std::string bracket(const groups::Group& g, const Element& x) { return "[" + g.format(x) + "]"; }

// ---------------------------------------------------------------------------
// Reports

struct Report {
    std::string text;
    json data = json::object();
    int code = kExitOk;
};

Report cmd_classes(const GroupPtr& g, int window)
{
    Report r;
    std::vector<std::string> parts;
    json classes = json::array();
    bool windowed = false;
    for (const auto& c : groups::cl_classes(*g, window)) {
        parts.push_back(bracket(*g, c.rep));
        json jc = {{"rep", g->format(c.rep)}};
        if (c.windowed) {
            windowed = true;
            jc["window"] = c.window;
            jc["canonicalizer"] = c.canonicalizer;
        } else {
            json members = json::array();
            for (const auto& m : c.members) members.push_back(g->format(m));
            jc["members"] = members;
        }
        classes.push_back(jc);
    }
    r.text = join(parts, ", ");
    if (windowed) {
        r.text += "\n(classes meeting the window of radius " + std::to_string(window) + ")";
        r.code = kExitUnknown;
    }
    r.data = {{"group", g->name()}, {"classes", classes}, {"complete", !windowed}};
    return r;
}

Report cmd_involutions(const GroupPtr& g, int window)
{
    Report r;
    std::vector<std::string> parts;
    for (const auto& x : groups::involutions(*g, window)) parts.push_back(g->format(x));
    r.text = join(parts, ", ");
    if (!g->is_finite()) {
        r.text += "\n(involutions in the window of radius " + std::to_string(window) + ")";
        r.code = kExitUnknown;
    }
    r.data = {{"group", g->name()}, {"involutions", parts}, {"complete", g->is_finite()}};
    return r;
}

Report cmd_arf_eval(const Context& c, const std::string& invariant, const std::string& expr, int n, int window)
{
    Report r;
    const ArfExpression e = c.parse(expr);
    r.data = {{"invariant", invariant}, {"expression", to_string(e)}};
    if (invariant == "omega") {
        r.text = to_string(omega(e));
    } else if (invariant == "omega1") {
        r.text = to_string(omega1(e, n).rep);
        r.data["n"] = n;
    } else if (invariant == "total") {
        r.text = to_string(total_invariant(e));
    } else if (invariant == "upsilon") {
        if (!c.group) throw ParseError("--invariant upsilon needs a group context");
        const JValue v = upsilon_eval(e, window);
        r.text = v.to_string();
        r.data["exact"] = v.exact;
        json terms = json::array();
        for (const auto& t : v.terms) terms.push_back(t.text);
        r.data["terms"] = terms;
        if (!v.is_zero() && !v.exact) {
            r.text += "\n(window diagram not closed; nonzero terms may vanish in L(c))";
            r.code = kExitUnknown;
        }
    } else {
        throw ParseError("--invariant must be omega, omega1, total or upsilon, got '" + invariant + "'");
    }
    r.data["value"] = r.text.substr(0, r.text.find('\n'));
    return r;
}

// ---------------------------------------------------------------------------
// Derivations

std::optional<WorkedDerivation> named_chain(const std::string& name)
{
    if (name == "c2-c-c12") return chain_c2_c_c12();
    std::smatch m;
    const std::string s = name;
    static const std::regex one(R"(d4-(shift|halve|reflect)-(-?\d+))");
    static const std::regex three(R"(d4-translate-(-?\d+)-(-?\d+)-(-?\d+))");
    if (std::regex_match(s, m, one)) {
        const int i = std::stoi(m[2]);
        if (m[1] == "shift") return chain_d4_shift(i);
        if (m[1] == "halve") return chain_d4_halve(i);
        return chain_d4_reflect(i);
    }
    if (std::regex_match(s, m, three)) return chain_d4_translate(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]));
    return std::nullopt;
}

DerivationStep step_from_json(const json& j, const Context& c, std::size_t index)
{
    const std::string ctx = "step " + std::to_string(index);
    DerivationStep s;
    try {
        s.rel = relation_from_name(field_as<std::string>(j, "rel", ctx));
    } catch (const PreconditionError& e) {
        throw ParseError(ctx + ": field 'rel': " + e.what());
    }
    s.pair = j.value("pair", 0);
    s.pair2 = j.value("pair2", -1);
    s.slot = j.value("slot", 2);
    s.forward = j.value("forward", true);
    s.k = j.value("k", 0);
    auto elem = [&](const char* key) -> std::optional<Element> {
        if (!j.contains(key)) return std::nullopt;
        try {
            return c.group->parse(j.at(key).get<std::string>());
        } catch (const Error& e) {
            throw ParseError(ctx + ": field '" + key + "': " + e.what());
        }
    };
    auto poly = [&](const char* key) -> std::optional<Poly> {
        if (!j.contains(key)) return std::nullopt;
        try {
            return parse_poly(c.ring, j.at(key).get<std::string>());
        } catch (const Error& e) {
            throw ParseError(ctx + ": field '" + key + "': " + e.what());
        }
    };
    if (c.group) {
        s.x = elem("x");
        s.witness = elem("witness");
    } else {
        s.px = poly("x");
        s.pwitness = poly("witness");
    }
    return s;
}

Report report_derivation(const std::string& name, const ArfExpression& start, const std::vector<DerivationStep>& steps,
                         const ArfExpression& target)
{
    Report r;
    const DerivationResult res = check_derivation(start, steps, target);
    std::string text;
    for (std::size_t i = 0; i < res.transcript.size(); ++i) {
        text += (i ? "  = " : "    ") + res.transcript[i];
        if (i > 0 && i - 1 < steps.size()) text += "    [" + to_string(steps[i - 1], start) + "]";
        text += "\n";
    }
    if (res.ok) {
        text += "OK " + name + ": " + std::to_string(steps.size()) + " steps";
    } else {
        text += "FAILED " + name + " at step " + std::to_string(res.failed_step) + ": " + res.message;
        r.code = kExitError;
    }
    r.text = text;
    r.data = {{"name", name},       {"ok", res.ok},           {"steps", steps.size()},
              {"failed_step", res.failed_step}, {"message", res.message}, {"transcript", res.transcript}};
    return r;
}

Report cmd_derive_check(const std::string& chain, const std::string& file)
{
    if (chain.empty() == file.empty()) throw ParseError("exactly one of --chain, --file is required");
    if (!chain.empty()) {
        auto d = named_chain(chain);
        if (!d) throw ParseError("--chain: unknown chain '" + chain + "'");
        return report_derivation(d->name, d->start, d->steps, d->target);
    }
    const json j = parse_json(read_file(file), "derivation file");
    ContextOptions o;
    if (j.contains("group")) {
        const json& g = j.at("group");
        o.group = g.is_string() ? g.get<std::string>() : g.dump();
    } else {
        o.ring = field_as<std::string>(j, "ring", "derivation file");
        o.unit = j.value("unit", std::string("-1"));
        o.reduced = j.value("reduced", false);
        o.invert = j.value("invert_variables", false);
    }
    const Context c = o.build();
    const ArfExpression start = c.parse(field_as<std::string>(j, "start", "derivation file"));
    const ArfExpression target = c.parse(field_as<std::string>(j, "target", "derivation file"));
    std::vector<DerivationStep> steps;
    const json& js = field(j, "steps", "derivation file");
    for (std::size_t i = 0; i < js.size(); ++i) steps.push_back(step_from_json(js[i], c, i));
    return report_derivation(j.value("name", file), start, steps, target);
}

Report cmd_distinguish(const Context& c, const std::string& s1, const std::string& s2, int window, int max_window)
{
    Report r;
    const ArfExpression e1 = c.parse(s1);
    const ArfExpression e2 = c.parse(s2);
    std::vector<std::string> transcript;
    std::string verdict;
    std::string witness;

    const OmegaValue o1 = omega(e1);
    const OmegaValue o2 = omega(e2);
    transcript.push_back("omega: " + to_string(o1) + " vs " + to_string(o2));
    if (!(o1 == o2)) {
        verdict = "Distinct";
        witness = "omega " + to_string(o1) + " != " + to_string(o2);
    } else if (c.group) {
        const auto* zn = dynamic_cast<const groups::SemidirectZnC2*>(c.group.get());
        if (zn && zn->rank() == 2) {
            const Z2C2Comparison cmp = z2c2_compare(e1, e2);
            std::vector<std::string> nf;
            for (const auto& b : cmp.difference) nf.push_back(to_string(b));
            transcript.push_back("normal form of the sum: " + (nf.empty() ? std::string("0") : join(nf, " + ")));
            if (cmp.verdict == Z2C2Verdict::Equal) {
                verdict = "Equal";
            } else {
                verdict = "Distinct";
                witness = "normal form " + join(nf, " + ");
            }
        } else {
            const UpsilonDecision d = upsilon_distinguish(e1, e2, window, max_window);
            transcript.insert(transcript.end(), d.transcript.begin(), d.transcript.end());
            verdict = verdict_name(d.verdict);
            witness = d.witness;
            if (d.verdict == UpsilonVerdict::Unknown) r.code = kExitUnknown;
        }
    } else {
        const ArfExpression d = e1 + e2;
        const TotalInvariant t = total_invariant(d);
        transcript.push_back("total invariant of the sum: " + to_string(t));
        if (t.primary.is_zero() && t.secondary.is_zero()) {
            verdict = "SameImage";
        } else {
            verdict = "Distinct";
            witness = "total invariant " + to_string(t);
        }
    }
    r.text = verdict + (witness.empty() ? "" : ": " + witness);
    for (const auto& line : transcript) r.text += "\n  " + line;
    r.data = {{"verdict", verdict}, {"witness", witness}, {"transcript", transcript}};
    return r;
}

// ---------------------------------------------------------------------------
// Homology

HomologyKind kind_from_name(const std::string& s)
{
    for (HomologyKind k : {HomologyKind::H0, HomologyKind::H1, HomologyKind::HC0, HomologyKind::HC1, HomologyKind::HQ1})
        if (homology_kind_name(k) == s) return k;
    throw ParseError("--kind must be H0, H1, HC0, HC1 or HQ1, got '" + s + "'");
}

std::string format_class(const FiniteAlgebra& a, HomologyKind k, const FpVec& v)
{
    switch (k) {
    case HomologyKind::H0:
    case HomologyKind::HC0: return a.format(v);
    case HomologyKind::H1:
    case HomologyKind::HC1: return format_tensor(a, v, 2);
    case HomologyKind::HQ1: {
        auto [w, c] = hq_unpack(a, v);
        return "(" + format_tensor(a, w, 2) + ", " + a.format(c) + ")";
    }
    }
    return "?";
}

std::string format_coords(const FpVec& v)
{
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out + ")";
}

FiniteAlgebra algebra_from_options(const std::string& desc, const std::string& file)
{
    if (desc.empty() == file.empty()) throw ParseError("exactly one of --algebra, --algebra-file is required");
    return desc.empty() ? load_algebra_json(read_file(file)) : parse_algebra_descriptor(desc);
}

Report cmd_homology(const FiniteAlgebra& a, const std::string& kind_name)
{
    Report r;
    const HomologyKind k = kind_from_name(kind_name);
    const HomologyGroup h = homology(a, k);
    r.text = kind_name + "(" + a.name() + "): dim " + std::to_string(h.dim());
    json basis = json::array();
    for (const auto& b : h.basis()) {
        const std::string s = format_class(a, k, b);
        r.text += "\n  " + s;
        basis.push_back(s);
    }
    r.data = {{"algebra", a.name()}, {"kind", kind_name}, {"dim", h.dim()}, {"basis", basis}};
    if (k == HomologyKind::HQ1 && a.p() == 2) {
        const int total = hq1_dimension_from_total_complex(a);
        r.text += "\n  total complex: dim " + std::to_string(total);
        r.data["total_complex_dim"] = total;
        if (total != h.dim()) r.code = kExitError;
    }
    return r;
}

Report cmd_theta(const FiniteAlgebra& a)
{
    Report r;
    const HomologyGroup h0 = homology(a, HomologyKind::H0);
    const HomologyGroup h1 = homology(a, HomologyKind::H1);
    const HomologyGroup hc1 = homology(a, HomologyKind::HC1);
    const std::string p = std::to_string(a.p());
    r.text = "theta_" + p + " on H0(" + a.name() + ")";
    json j0 = json::array();
    json j1 = json::array();
    for (const auto& b : h0.basis()) {
        const FpVec t = theta_p_h0(a, b);
        const std::string line = "[" + a.format(b) + "] -> [" + a.format(t) + "] = " + format_coords(h0.coords(t));
        r.text += "\n  " + line;
        j0.push_back(line);
    }
    r.text += "\ntheta_" + p + " on H1(" + a.name() + ") into HC1";
    for (const auto& b : h1.basis()) {
        const FpVec t = theta_p_h1(a, decompose(a, b));
        const std::string line =
            "[" + format_tensor(a, b, 2) + "] -> " + (hc1.is_zero(t) ? std::string("0") : format_coords(hc1.coords(t)));
        r.text += "\n  " + line;
        j1.push_back(line);
    }
    r.data = {{"algebra", a.name()}, {"p", a.p()}, {"h0", j0}, {"h1", j1}};
    return r;
}

Report cmd_morita(const FiniteAlgebra& a, int m, int levels, int homotopy_levels)
{
    Report r;
    const MoritaReport mr = morita_check(a, m, levels, homotopy_levels);
    const MoritaSquares sq = morita_squares(a, m);
    auto flag = [](bool b) { return std::string(b ? "PASS" : "FAIL"); };
    const std::string A = "M" + std::to_string(m) + "(" + a.name() + ")";
    r.text = A + "\n  Tr iota = 1, levels 1.." + std::to_string(levels) + ": " + flag(mr.trace_iota_identity) +
             "\n  b chi + chi b = 1 - iota Tr, levels 1.." + std::to_string(homotopy_levels) + ": " + flag(mr.homotopy) +
             "\n  Tr, iota chain maps: " + flag(mr.chain_maps) + "\n  Tr, iota commute with x, y: " +
             flag(mr.preserve_xy) + "\n  square B: " + flag(sq.connes_b) + "\n  square theta on H0: " +
             flag(sq.theta_h0) + "\n  square theta on HC1: " + flag(sq.theta_hc1) + "\n  square vartheta: " +
             flag(sq.vartheta);
    std::vector<std::string> failures = mr.failures;
    failures.insert(failures.end(), sq.failures.begin(), sq.failures.end());
    for (const auto& f : failures) r.text += "\n  failure: " + f;
    r.code = mr.ok() && sq.ok() ? kExitOk : kExitError;
    r.text += "\n" + flag(r.code == kExitOk);
    r.data = {{"algebra", A},
              {"trace_iota", mr.trace_iota_identity},
              {"homotopy", mr.homotopy},
              {"chain_maps", mr.chain_maps},
              {"preserve_xy", mr.preserve_xy},
              {"square_b", sq.connes_b},
              {"square_theta_h0", sq.theta_h0},
              {"square_theta_hc1", sq.theta_hc1},
              {"square_vartheta", sq.vartheta},
              {"failures", failures}};
    return r;
}

// ---------------------------------------------------------------------------
// Scenarios

int run_captured(const std::vector<std::string>& args, std::string& out, std::string& err)
{
    std::ostringstream o, e;
    const int code = run(args, o, e);
    out = o.str();
    err = e.str();
    return code;
}

Report cmd_scenario(const std::string& name, const std::string& dir, bool list)
{
    namespace fs = std::filesystem;
    Report r;
    if (list) {
        std::vector<std::string> names;
        if (fs::is_directory(dir))
            for (const auto& entry : fs::directory_iterator(dir))
                if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
        std::sort(names.begin(), names.end());
        r.text = join(names, "\n");
        r.data = {{"scenarios", names}};
        return r;
    }
    if (name.empty()) throw ParseError("scenario name required (or --list)");
    const fs::path path = fs::path(dir) / (name + ".json");
    if (!fs::exists(path)) throw ParseError("unknown scenario '" + name + "' (no " + path.string() + ")");
    const json j = parse_json(read_file(path.string()), "scenario " + name);
    const json& steps = field(j, "steps", "scenario " + name);

    bool all = true;
    json results = json::array();
    std::string text;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string ctx = "scenario " + name + " step " + std::to_string(i);
        const json& s = steps[i];
        const auto args = field_as<std::vector<std::string>>(s, "run", ctx);
        const auto prov = field_as<std::string>(s, "provenance", ctx);
        if (prov.rfind("PAPER", 0) != 0 && prov.rfind("TRIVIAL", 0) != 0 && prov.rfind("DERIVED", 0) != 0)
            throw ParseError(ctx + ": field 'provenance' must start with PAPER, TRIVIAL or DERIVED");
        const int want_code = s.value("exit", 0);
        std::string out, err;
        const int code = run_captured(args, out, err);
        out = trim(out);
        bool ok = code == want_code;
        std::string why;
        if (!ok) why = "exit " + std::to_string(code) + ", expected " + std::to_string(want_code);
        if (s.contains("expect")) {
            const auto want = trim(s.at("expect").get<std::string>());
            const std::string got = s.value("first_line", false) ? out.substr(0, out.find('\n')) : out;
            if (got != want) {
                ok = false;
                why = "got '" + got + "', expected '" + want + "'";
            }
        }
        if (s.contains("contains")) {
            const auto want = s.at("contains").get<std::string>();
            if (out.find(want) == std::string::npos) {
                ok = false;
                why = "output lacks '" + want + "'";
            }
        }
        all = all && ok;
        const std::string label = s.value("label", join(args, " "));
        text += std::string(ok ? "PASS" : "FAIL") + "  " + label + "  [" + prov + "]";
        if (!ok) text += "\n      " + why + (err.empty() ? "" : "\n      " + trim(err));
        text += "\n";
        results.push_back({{"label", label}, {"ok", ok}, {"provenance", prov}, {"output", out}, {"exit", code}});
    }
    text += std::string(all ? "PASS" : "FAIL") + " " + name;
    r.text = text;
    r.code = all ? kExitOk : kExitError;
    r.data = {{"scenario", name}, {"description", j.value("description", "")}, {"ok", all}, {"steps", results}};
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// Loaders

GroupPtr load_group_json(std::string_view text)
{
    const json j = parse_json(text, "group definition");
    const std::string ctx = "group definition";
    if (j.is_string()) return groups::group_by_name(j.get<std::string>());
    const auto family = field_as<std::string>(j, "family", ctx);
    if (family == "finite-table" || family == "finite-perm") return finite_from_json(j, ctx);
    if (family == "semidirect-zn-c2") {
        const int rank = field_as<int>(j, "rank", ctx);
        if (rank < 1) throw ParseError(ctx + ": field 'rank' must be positive");
        return std::make_shared<groups::SemidirectZnC2>(rank);
    }
    if (family == "pullback-cyclic" || family == "pullback-dihedral") {
        const bool dihedral = family == "pullback-dihedral";
        auto e = finite_from_json(field(j, "e", ctx), ctx + " field 'e'");
        const auto m = field_as<std::int64_t>(j, "m", ctx);
        std::vector<groups::DihedralM> hom;
        for (const auto& h : field(j, "hom", ctx)) {
            if (h.is_array()) {
                hom.push_back({h.at(0).get<std::int64_t>(), h.size() > 1 ? h.at(1).get<int>() : 0});
            } else {
                hom.push_back({h.get<std::int64_t>(), 0});
            }
        }
        if (static_cast<int>(hom.size()) != e->n())
            throw ParseError(ctx + ": field 'hom' must have one entry per element of 'e'");
        auto g = std::make_shared<groups::PullbackGroup>(j.value("name", std::string("custom")), dihedral, e, m,
                                                         std::move(hom));
        if (j.contains("generators")) {
            std::vector<std::pair<std::string, Element>> gens;
            for (const auto& [n, v] : named_list<std::vector<std::int64_t>>(j.at("generators"), ctx)) {
                const std::size_t want = dihedral ? 3 : 2;
                if (v.size() != want)
                    throw ParseError(ctx + ": generator '" + n + "' needs " + std::to_string(want) + " coordinates");
                const Element x = dihedral ? g->make_element(v[0], static_cast<int>(v[1]), static_cast<int>(v[2]))
                                           : g->make_element(v[0], 0, static_cast<int>(v[1]));
                g->validate(x);
                gens.emplace_back(n, x);
            }
            g->set_named_generators(std::move(gens));
        }
        return g;
    }
    throw ParseError(ctx + ": field 'family' has unknown value '" + family + "'");
}

PolyRingPtr parse_ring_descriptor(std::string_view text, PolyInvolution inv)
{
    static const std::regex re(R"(\s*(Z|F(\d+))\s*(\[([^\]]*)\])?\s*(/\s*\(([^)]*)\))?\s*)");
    std::cmatch m;
    if (!std::regex_match(text.begin(), text.end(), m, re))
        throw ParseError("ring descriptor '" + std::string(text) + "' is not of the form Z[X,Y] or F2[X]");
    const int characteristic = m[2].matched ? std::stoi(m[2]) : 0;
    std::vector<std::string> vars;
    bool laurent = false;
    if (m[4].matched) {
        std::stringstream ss(m[4].str());
        std::string v;
        while (std::getline(ss, v, ',')) {
            v = trim(v);
            if (v.empty()) continue;
            const auto pos = v.find("^+-1");
            if (pos != std::string::npos) {
                laurent = true;
                v = trim(v.substr(0, pos));
            }
            vars.push_back(v);
        }
    }
    std::vector<int> nil;
    if (m[6].matched) {
        nil.assign(vars.size(), 0);
        std::stringstream ss(m[6].str());
        std::string rel;
        static const std::regex pw(R"(\s*([A-Za-z]\w*)\s*\^\s*(\d+)\s*)");
        while (std::getline(ss, rel, ',')) {
            std::smatch pm;
            if (!std::regex_match(rel, pm, pw)) throw ParseError("ring relation '" + rel + "' is not of the form V^k");
            const auto it = std::find(vars.begin(), vars.end(), pm[1].str());
            if (it == vars.end()) throw ParseError("ring relation names unknown variable '" + pm[1].str() + "'");
            nil[it - vars.begin()] = std::stoi(pm[2]);
        }
    }
    return make_poly_ring(std::move(vars), characteristic, laurent, inv, std::move(nil));
}

FiniteAlgebra parse_algebra_descriptor(std::string_view text)
{
    static const std::regex mat(R"(\s*M(\d+)\s*\((.*)\)\s*)");
    static const std::regex grp(R"(\s*F(\d+)\s*\[(.*)\]\s*)");
    static const std::regex fld(R"(\s*F(\d+)\s*)");
    std::cmatch m;
    if (std::regex_match(text.begin(), text.end(), m, mat))
        return FiniteAlgebra::matrix_algebra(parse_algebra_descriptor(m[2].str()), std::stoi(m[1]));
    if (std::regex_match(text.begin(), text.end(), m, grp)) {
        auto g = std::dynamic_pointer_cast<const groups::FiniteGroup>(groups::group_by_name(trim(m[2].str())));
        if (!g) throw ParseError("algebra '" + std::string(text) + "': the group must be finite");
        return FiniteAlgebra::group_algebra(g, std::stoi(m[1]));
    }
    if (std::regex_match(text.begin(), text.end(), m, fld)) return FiniteAlgebra::prime_field(std::stoi(m[1]));
    throw ParseError("algebra descriptor '" + std::string(text) + "' is not of the form F2, F3[C3] or M2(F2[C2])");
}

FiniteAlgebra load_algebra_json(std::string_view text)
{
    const json j = parse_json(text, "algebra definition");
    const std::string ctx = "algebra definition";
    const int p = field_as<int>(j, "p", ctx);
    auto labels = field_as<std::vector<std::string>>(j, "labels", ctx);
    const int n = static_cast<int>(labels.size());
    auto vec = [&](const json& v, const std::string& key) {
        FpVec out;
        try {
            out = v.get<FpVec>();
        } catch (const json::exception&) {
            throw ParseError(ctx + ": field '" + key + "' must hold coefficient vectors");
        }
        if (static_cast<int>(out.size()) != n)
            throw ParseError(ctx + ": field '" + key + "' vectors must have length " + std::to_string(n));
        return out;
    };
    const FpVec unit = vec(field(j, "unit", ctx), "unit");
    std::vector<std::vector<FpVec>> mult(n, std::vector<FpVec>(n, FpVec(n, 0)));
    for (const auto& t : field(j, "products", ctx)) {
        if (!t.is_array() || t.size() != 4) throw ParseError(ctx + ": field 'products' entries must be [i, j, k, c]");
        const int a = t[0].get<int>(), b = t[1].get<int>(), k = t[2].get<int>(), c = t[3].get<int>();
        if (a < 0 || a >= n || b < 0 || b >= n || k < 0 || k >= n)
            throw ParseError(ctx + ": field 'products' index out of range");
        mult[a][b][k] = ((mult[a][b][k] + c) % p + p) % p;
    }
    std::optional<std::vector<FpVec>> inv;
    if (j.contains("involution")) {
        inv.emplace();
        for (const auto& v : j.at("involution")) inv->push_back(vec(v, "involution"));
        if (static_cast<int>(inv->size()) != n) throw ParseError(ctx + ": field 'involution' needs one image per basis element");
    }
    FiniteAlgebra a(p, std::move(labels), std::move(mult), unit, std::move(inv), j.value("name", std::string("custom")));
    a.validate();
    return a;
}

std::string default_scenario_dir() { return QARF_SCENARIO_DIR; }

// ---------------------------------------------------------------------------
// Entry point

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Arf-type invariants of quadratic forms over rings with anti-structure", "qarf"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable report");

    ContextOptions ctx;
    int window = 6;
    auto* classes = app.add_subcommand("classes", "equivalence classes cl(G)");
    auto* invols = app.add_subcommand("involutions", "involutions of G");
    for (auto* sc : {classes, invols}) {
        sc->add_option("--group", ctx.group, "registry name or inline JSON group definition");
        sc->add_option("--group-file", ctx.group_file, "JSON group definition");
        sc->add_option("--window", window, "word-length window for infinite groups");
    }

    std::string invariant = "omega";
    std::string expr;
    int n = 2;
    auto* arf_eval = app.add_subcommand("arf-eval", "evaluate an invariant on an Arf expression");
    ctx.add_to(arf_eval);
    arf_eval->add_option("--invariant", invariant, "omega, omega1, total or upsilon");
    arf_eval->add_option("--expr", expr, "expression, e.g. \"<S, SX^2> + <1, 1>\"")->required();
    arf_eval->add_option("--n", n, "truncation degree for omega1");
    arf_eval->add_option("--window", window, "initial window for upsilon");

    std::string chain, file;
    auto* derive = app.add_subcommand("derive-check", "check a derivation step by step");
    derive->add_option("--chain", chain, "built-in chain: c2-c-c12, d4-shift-I, d4-halve-I, d4-reflect-I, d4-translate-I-J-K");
    derive->add_option("--file", file, "JSON derivation");

    std::string expr1, expr2;
    int max_window = 24;
    auto* dist = app.add_subcommand("distinguish", "decide whether two expressions differ");
    ctx.add_to(dist);
    dist->add_option("--expr1", expr1, "first expression")->required();
    dist->add_option("--expr2", expr2, "second expression")->required();
    dist->add_option("--window", window, "initial window for upsilon");
    dist->add_option("--max-window", max_window, "largest window tried before reporting Unknown");

    std::string algebra, algebra_file, kind = "H0";
    int m = 2, levels = 3, homotopy_levels = 2;
    auto* hom = app.add_subcommand("homology", "homology of a finite-dimensional algebra");
    auto* theta = app.add_subcommand("theta", "reduced power operations on basis classes");
    auto* morita = app.add_subcommand("morita-check", "Morita trace identities and commuting squares");
    for (auto* sc : {hom, theta, morita}) {
        sc->add_option("--algebra", algebra, "F2, F3[C3], M2(F2[C2]), ...");
        sc->add_option("--algebra-file", algebra_file, "JSON algebra definition");
    }
    hom->add_option("--kind", kind, "H0, H1, HC0, HC1 or HQ1");
    morita->add_option("--m", m, "matrix size");
    morita->add_option("--levels", levels, "levels for Tr iota = 1");
    morita->add_option("--homotopy", homotopy_levels, "levels for the chain homotopy");

    std::string scenario_name, scenario_dir = default_scenario_dir();
    bool list = false;
    auto* scen = app.add_subcommand("scenario", "run a named scenario");
    scen->add_option("name", scenario_name, "scenario name");
    scen->add_option("--dir", scenario_dir, "scenario directory");
    scen->add_flag("--list", list, "list the available scenarios");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "qarf: " << e.what() << "\n";
        return kExitError;
    }

    Report r;
    try {
        if (classes->parsed()) {
            r = cmd_classes(ctx.build_group(), window);
        } else if (invols->parsed()) {
            r = cmd_involutions(ctx.build_group(), window);
        } else if (arf_eval->parsed()) {
            r = cmd_arf_eval(ctx.build(), invariant, expr, n, window);
        } else if (derive->parsed()) {
            r = cmd_derive_check(chain, file);
        } else if (dist->parsed()) {
            r = cmd_distinguish(ctx.build(), expr1, expr2, window, max_window);
        } else if (hom->parsed()) {
            r = cmd_homology(algebra_from_options(algebra, algebra_file), kind);
        } else if (theta->parsed()) {
            r = cmd_theta(algebra_from_options(algebra, algebra_file));
        } else if (morita->parsed()) {
            r = cmd_morita(algebra_from_options(algebra, algebra_file), m, levels, homotopy_levels);
        } else if (scen->parsed()) {
            r = cmd_scenario(scenario_name, scenario_dir, list);
        }
    } catch (const UnknownError& e) {
        err << "qarf: unknown: " << e.what() << "\n";
        return kExitUnknown;
    } catch (const Error& e) {
        err << "qarf: " << e.what() << "\n";
        return kExitError;
    } catch (const json::exception& e) {
        err << "qarf: malformed JSON: " << e.what() << "\n";
        return kExitError;
    }

    if (as_json) {
        r.data["exit"] = r.code;
        out << r.data.dump(2) << "\n";
    } else {
        out << r.text << "\n";
    }
    return r.code;
}

} // namespace qarf::cli
