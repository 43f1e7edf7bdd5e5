#include "qarf/arf.hpp"
#include "qarf/group_library.hpp"

namespace qarf {

namespace {

using groups::Element;
using groups::GroupPtr;

DerivationStep absorb(int slot, bool forward, std::optional<Element> w = std::nullopt)
{
    DerivationStep s;
    s.rel = Relation::Absorb;
    s.slot = slot;
    s.forward = forward;
    s.witness = std::move(w);
    return s;
}

DerivationStep conj(Element x)
{
    DerivationStep s;
    s.rel = Relation::Conj;
    s.x = std::move(x);
    return s;
}

DerivationStep central(int slot, Element c)
{
    DerivationStep s;
    s.rel = Relation::CentralAbsorb;
    s.slot = slot;
    s.x = std::move(c);
    return s;
}

DerivationStep swap_step()
{
    DerivationStep s;
    s.rel = Relation::Swap;
    return s;
}

ArfExpression single(const GroupPtr& g, const Element& a, const Element& b)
{
    ArfExpression e = ArfExpression::group(g);
    e.toggle(a, b);
    return e;
}

std::string y_power(int k) { return k == 0 ? "" : "Y^" + std::to_string(k); }

} // namespace

WorkedDerivation chain_c2_c_c12()
{
    GroupPtr g = groups::c2_ltimes_c_c12();
    auto p = [&](const char* w) { return g->parse(w); };
    WorkedDerivation d;
    d.name = "c2-c-c12";
    d.start = single(g, p("S"), p("SX^2Y^2"));
    d.target = single(g, p("SX"), p("SX^3Y^2"));
    d.steps = {
        absorb(2, true),                    // <S, SX^4Y^4>
        absorb(2, false, p("SX^2Y^8")),     // <S, SX^2Y^8>
        absorb(2, false, p("SXY^4")),       // <S, SXY^4>
        conj(p("SXY^2")),                   // <SX^2Y^4, SX>
        swap_step(),                        // <SX, SX^2Y^4>
        absorb(2, true),                    // <SX, SX^3Y^8>
        absorb(2, true),                    // <SX, SX^5Y^4>
        absorb(2, false, p("SX^3Y^2")),     // <SX, SX^3Y^2>
    };
    return d;
}

WorkedDerivation chain_d4_shift(int i)
{
    GroupPtr g = groups::d4_extension();
    auto p = [&](const std::string& w) { return g->parse(w); };
    WorkedDerivation d;
    d.name = "d4-shift-" + std::to_string(i);
    d.start = single(g, p(y_power(2 * i) + "S"), p("Y^2S"));
    d.target = single(g, p(y_power(2 * i - 2) + "S"), p("S"));
    d.steps = {
        central(2, p("(YS)^2")),  // <Y^{2i}S, YSY^-1>
        conj(p("Y^-1")),          // <Y^{2i-1}SY, S>
        central(1, p("(SY)^2")),  // <Y^{2i-2}S, S>
    };
    return d;
}

WorkedDerivation chain_d4_halve(int i)
{
    GroupPtr g = groups::d4_extension();
    auto p = [&](const std::string& w) { return g->parse(w); };
    WorkedDerivation d;
    d.name = "d4-halve-" + std::to_string(i);
    d.start = single(g, p(y_power(4 * i) + "S"), p("S"));
    d.target = single(g, p(y_power(2 * i) + "S"), p("S"));
    d.steps = {absorb(1, false, p(y_power(2 * i) + "S"))};
    return d;
}

WorkedDerivation chain_d4_reflect(int i)
{
    GroupPtr g = groups::d4_extension();
    auto p = [&](const std::string& w) { return g->parse(w); };
    WorkedDerivation d;
    d.name = "d4-reflect-" + std::to_string(i);
    d.start = single(g, p(y_power(2 * i) + "S"), p("S"));
    d.target = single(g, p(y_power(-2 * i) + "S"), p("S"));
    d.steps = {conj(p("S"))};
    return d;
}

WorkedDerivation chain_d4_translate(int i, int j, int k)
{
    GroupPtr g = groups::d4_extension();
    auto p = [&](const std::string& w) { return g->parse(w); };
    WorkedDerivation d;
    d.name = "d4-translate-" + std::to_string(i) + "-" + std::to_string(j) + "-" + std::to_string(k);
    d.start = single(g, p(y_power(2 * i) + "S"), p(y_power(2 * j) + "S"));
    d.target = single(g, p(y_power(2 * i - 4 * k) + "S"), p(y_power(2 * j - 4 * k) + "S"));
    d.steps = {conj(p(y_power(-2 * k)))};
    return d;
}

std::vector<WorkedDerivation> worked_derivations()
{
    std::vector<WorkedDerivation> out{chain_c2_c_c12()};
    for (int i = 1; i <= 3; ++i) {
        out.push_back(chain_d4_shift(i));
        out.push_back(chain_d4_halve(i));
        out.push_back(chain_d4_reflect(i));
    }
    out.push_back(chain_d4_translate(3, 1, 1));
    out.push_back(chain_d4_translate(2, -1, -2));
    return out;
}

} // namespace qarf
